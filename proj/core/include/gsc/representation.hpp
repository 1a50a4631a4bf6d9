#pragma once

// Symbol structures as filler/role bindings, the grid of discrete structures
// inside coefficient space, and the maps between the two.
//
// Coefficients y(filler, role) are stored flattened column-major over roles:
// flat index = role * F + filler (0-based). W and b are always expressed in
// this order.

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gsc {

inline constexpr std::uint64_t kDefaultGridCap = 1'000'000;

class FillerRoleSpec {
 public:
  // Throws InvalidArgument on empty/duplicate names, DimensionMismatch on
  // basis shape errors, SingularBasis when a basis matrix is not invertible.
  FillerRoleSpec(std::vector<std::string> fillers, std::vector<std::string> roles,
                 std::optional<Eigen::MatrixXd> filler_basis = std::nullopt,
                 std::optional<Eigen::MatrixXd> role_basis = std::nullopt);

  // Fillers "f1".."fF", roles "r1".."rR", identity bases.
  static FillerRoleSpec with_counts(int fillers, int roles);

  int filler_count() const { return static_cast<int>(fillers_.size()); }
  int role_count() const { return static_cast<int>(roles_.size()); }
  int dimension() const { return filler_count() * role_count(); }

  const std::vector<std::string>& fillers() const { return fillers_; }
  const std::vector<std::string>& roles() const { return roles_; }

  // Columns are the filler (resp. role) vectors; identity when not supplied.
  const Eigen::MatrixXd& filler_basis() const { return filler_basis_; }
  const Eigen::MatrixXd& role_basis() const { return role_basis_; }
  bool has_custom_bases() const { return custom_bases_; }

  int flat_index(int filler, int role) const { return role * filler_count() + filler; }

  // "y_<filler>_<role>", used as CSV column header.
  std::string coefficient_name(int filler, int role) const;

 private:
  std::vector<std::string> fillers_;
  std::vector<std::string> roles_;
  Eigen::MatrixXd filler_basis_;
  Eigen::MatrixXd role_basis_;
  bool custom_bases_ = false;
};

// One filler index (0-based) per role.
struct GridPoint {
  std::vector<int> assignment;

  auto operator<=>(const GridPoint&) const = default;
};

// "filler·role|filler·role|..." in role order.
std::string grid_label(const GridPoint& point, const FillerRoleSpec& spec);

class CoefficientState {
 public:
  CoefficientState() = default;
  CoefficientState(int fillers, int roles);
  CoefficientState(int fillers, int roles, Eigen::VectorXd flat);

  int filler_count() const { return fillers_; }
  int role_count() const { return roles_; }
  int dimension() const { return static_cast<int>(flat_.size()); }

  double operator()(int filler, int role) const { return flat_[role * fillers_ + filler]; }
  double& operator()(int filler, int role) { return flat_[role * fillers_ + filler]; }

  const Eigen::VectorXd& flat() const { return flat_; }
  Eigen::VectorXd& flat() { return flat_; }

  // F x R view of the coefficient array.
  Eigen::Map<const Eigen::MatrixXd> matrix() const {
    return {flat_.data(), fillers_, roles_};
  }

  bool all_finite() const { return flat_.allFinite(); }

  bool operator==(const CoefficientState& other) const {
    return fillers_ == other.fillers_ && roles_ == other.roles_ && flat_ == other.flat_;
  }

 private:
  int fillers_ = 0;
  int roles_ = 0;
  Eigen::VectorXd flat_;
};

// F^R, or nullopt if it does not fit in 64 bits.
std::optional<std::uint64_t> grid_size(const FillerRoleSpec& spec);

// All F^R grid points, lexicographic in (assignment[0], assignment[1], ...).
// Throws GridTooLarge above `cap`.
std::vector<GridPoint> enumerate_grid(const FillerRoleSpec& spec,
                                      std::uint64_t cap = kDefaultGridCap);

// Position of `point` within enumerate_grid's ordering.
std::uint64_t grid_rank(const GridPoint& point, const FillerRoleSpec& spec);

CoefficientState embed(const GridPoint& point, const FillerRoleSpec& spec);

// Nearest grid point; per role the largest coefficient wins, lowest filler
// index on ties.
GridPoint quantize(const CoefficientState& y);

struct GridResidual {
  Eigen::MatrixXd binary;  // y(1 - y), F x R
  Eigen::VectorXd norm;    // sum_f y^2 - 1, per role

  bool on_grid() const { return (binary.array() == 0.0).all() && (norm.array() == 0.0).all(); }
};

GridResidual grid_residual(const CoefficientState& y);

// sum y(f, r) * (f_vec outer r_vec), flattened column-major like the
// coefficients. With identity bases this is y.flat().
Eigen::VectorXd embed_to_ambient(const CoefficientState& y, const FillerRoleSpec& spec);

// Every coefficient equal to 1/F.
CoefficientState barycenter(const FillerRoleSpec& spec);

}  // namespace gsc
