#include "gsc/representation.hpp"

#include <set>
#include <sstream>
#include <utility>

#include "gsc/error.hpp"

namespace gsc {
namespace {

void require_unique(const std::vector<std::string>& names, const char* what) {
  if (names.empty()) {
    throw Error(ErrorKind::InvalidArgument, std::string("at least one ") + what + " is required");
  }
  std::set<std::string> seen;
  for (const auto& name : names) {
    if (!seen.insert(name).second) {
      throw Error(ErrorKind::InvalidArgument, std::string("duplicate ") + what + " name '" + name + "'");
    }
  }
}

Eigen::MatrixXd checked_basis(std::optional<Eigen::MatrixXd> basis, int size, const char* what) {
  if (!basis) return Eigen::MatrixXd::Identity(size, size);
  if (basis->rows() != size || basis->cols() != size) {
    std::ostringstream msg;
    msg << what << " basis must be " << size << "x" << size << ", got " << basis->rows() << "x"
        << basis->cols();
    throw Error(ErrorKind::DimensionMismatch, msg.str());
  }
  if (!basis->allFinite()) {
    throw Error(ErrorKind::SingularBasis, std::string(what) + " basis has non-finite entries");
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(*basis);
  if (!lu.isInvertible()) {
    throw Error(ErrorKind::SingularBasis,
                std::string(what) + " basis vectors are linearly dependent");
  }
  return std::move(*basis);
}

}  // namespace

FillerRoleSpec::FillerRoleSpec(std::vector<std::string> fillers, std::vector<std::string> roles,
                               std::optional<Eigen::MatrixXd> filler_basis,
                               std::optional<Eigen::MatrixXd> role_basis)
    : fillers_(std::move(fillers)), roles_(std::move(roles)) {
  require_unique(fillers_, "filler");
  require_unique(roles_, "role");
  custom_bases_ = filler_basis.has_value() || role_basis.has_value();
  filler_basis_ = checked_basis(std::move(filler_basis), filler_count(), "filler");
  role_basis_ = checked_basis(std::move(role_basis), role_count(), "role");
}

FillerRoleSpec FillerRoleSpec::with_counts(int fillers, int roles) {
  if (fillers < 1 || roles < 1) {
    throw Error(ErrorKind::InvalidArgument, "filler and role counts must be >= 1");
  }
  std::vector<std::string> f;
  std::vector<std::string> r;
  for (int i = 1; i <= fillers; ++i) f.push_back("f" + std::to_string(i));
  for (int i = 1; i <= roles; ++i) r.push_back("r" + std::to_string(i));
  return FillerRoleSpec(std::move(f), std::move(r));
}

std::string FillerRoleSpec::coefficient_name(int filler, int role) const {
  return "y_" + fillers_.at(filler) + "_" + roles_.at(role);
}

std::string grid_label(const GridPoint& point, const FillerRoleSpec& spec) {
  std::string label;
  for (std::size_t role = 0; role < point.assignment.size(); ++role) {
    if (role > 0) label += '|';
    label += spec.fillers().at(point.assignment[role]);
    label += "·";
    label += spec.roles().at(role);
  }
  return label;
}

CoefficientState::CoefficientState(int fillers, int roles)
    : fillers_(fillers), roles_(roles), flat_(Eigen::VectorXd::Zero(fillers * roles)) {}

CoefficientState::CoefficientState(int fillers, int roles, Eigen::VectorXd flat)
    : fillers_(fillers), roles_(roles), flat_(std::move(flat)) {
  if (flat_.size() != static_cast<Eigen::Index>(fillers) * roles) {
    throw Error(ErrorKind::DimensionMismatch, "coefficient vector length must equal F*R");
  }
}

std::optional<std::uint64_t> grid_size(const FillerRoleSpec& spec) {
  const auto base = static_cast<std::uint64_t>(spec.filler_count());
  std::uint64_t total = 1;
  for (int r = 0; r < spec.role_count(); ++r) {
    if (total > UINT64_MAX / base) return std::nullopt;
    total *= base;
  }
  return total;
}

std::vector<GridPoint> enumerate_grid(const FillerRoleSpec& spec, std::uint64_t cap) {
  const auto size = grid_size(spec);
  if (!size || *size > cap) {
    std::ostringstream msg;
    msg << "grid of " << spec.filler_count() << "^" << spec.role_count()
        << " points exceeds the cap of " << cap;
    throw Error(ErrorKind::GridTooLarge, msg.str());
  }
  const int fillers = spec.filler_count();
  std::vector<GridPoint> grid;
  grid.reserve(*size);
  GridPoint current{std::vector<int>(spec.role_count(), 0)};
  for (std::uint64_t i = 0; i < *size; ++i) {
    grid.push_back(current);
    // Odometer increment; the last role is the fastest-moving digit.
    for (int role = spec.role_count() - 1; role >= 0; --role) {
      if (++current.assignment[role] < fillers) break;
      current.assignment[role] = 0;
    }
  }
  return grid;
}

std::uint64_t grid_rank(const GridPoint& point, const FillerRoleSpec& spec) {
  std::uint64_t rank = 0;
  for (int filler : point.assignment) {
    rank = rank * static_cast<std::uint64_t>(spec.filler_count()) + static_cast<std::uint64_t>(filler);
  }
  return rank;
}

CoefficientState embed(const GridPoint& point, const FillerRoleSpec& spec) {
  if (static_cast<int>(point.assignment.size()) != spec.role_count()) {
    throw Error(ErrorKind::DimensionMismatch, "grid point must assign one filler per role");
  }
  CoefficientState y(spec.filler_count(), spec.role_count());
  for (int role = 0; role < spec.role_count(); ++role) {
    const int filler = point.assignment[role];
    if (filler < 0 || filler >= spec.filler_count()) {
      throw Error(ErrorKind::InvalidArgument,
                  "filler index " + std::to_string(filler) + " out of range for role " +
                      std::to_string(role));
    }
    y(filler, role) = 1.0;
  }
  return y;
}

GridPoint quantize(const CoefficientState& y) {
  GridPoint point{std::vector<int>(y.role_count(), 0)};
  for (int role = 0; role < y.role_count(); ++role) {
    int best = 0;
    for (int filler = 1; filler < y.filler_count(); ++filler) {
      if (y(filler, role) > y(best, role)) best = filler;
    }
    point.assignment[role] = best;
  }
  return point;
}

GridResidual grid_residual(const CoefficientState& y) {
  const auto m = y.matrix();
  GridResidual res;
  res.binary = (m.array() * (1.0 - m.array())).matrix();
  res.norm = m.colwise().squaredNorm().transpose().array() - 1.0;
  return res;
}

Eigen::VectorXd embed_to_ambient(const CoefficientState& y, const FillerRoleSpec& spec) {
  if (y.filler_count() != spec.filler_count() || y.role_count() != spec.role_count()) {
    throw Error(ErrorKind::DimensionMismatch, "state shape does not match filler/role spec");
  }
  // sum_{f,r} y(f,r) f_vec r_vec^T == Fb * Y * Rb^T
  const Eigen::MatrixXd ambient = spec.filler_basis() * y.matrix() * spec.role_basis().transpose();
  return Eigen::Map<const Eigen::VectorXd>(ambient.data(), ambient.size());
}

CoefficientState barycenter(const FillerRoleSpec& spec) {
  const int fillers = spec.filler_count();
  return CoefficientState(fillers, spec.role_count(),
                          Eigen::VectorXd::Constant(spec.dimension(), 1.0 / fillers));
}

}  // namespace gsc
