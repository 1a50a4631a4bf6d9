#pragma once

// Exact reference computations on the grid: brute-force optimum, Boltzmann
// weights, and Newton refinement of the local maxima of H_q that sit next to
// each grid point.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "gsc/error.hpp"
#include "gsc/harmony.hpp"
#include "gsc/representation.hpp"

namespace gsc {

struct OptimumReport {
  GridPoint point;
  std::uint64_t index = 0;  // position in enumerate_grid order
  double value = 0.0;       // H at the optimum
  double gap = 0.0;         // best - second best; +inf for a one-point grid
  bool tie = false;         // gap == 0
};

OptimumReport brute_force_optimum(const HarmonyParams& params, const FillerRoleSpec& spec,
                                  std::uint64_t cap = kDefaultGridCap);

// exp(H(x_i)/T) / Z over the grid, via max-subtracted log-sum-exp.
std::vector<double> boltzmann_distribution(const HarmonyParams& params, double temperature,
                                           const FillerRoleSpec& spec,
                                           std::uint64_t cap = kDefaultGridCap);

struct GridReport {
  std::vector<GridPoint> points;
  std::vector<double> harmony;
  std::vector<double> boltzmann;
  double temperature = 0.0;
  OptimumReport optimum;
};

GridReport grid_report(const HarmonyParams& params, double temperature,
                       const FillerRoleSpec& spec, std::uint64_t cap = kDefaultGridCap);

struct RefinedMaximum {
  GridPoint grid_point;
  CoefficientState location;         // x_q
  double value = 0.0;                // H_q(x_q)
  CoefficientState first_order;      // x* - q^-1 [D2Q(x*)]^-1 grad H(x*)
  double predicted_value = 0.0;      // H(x*) - (2q)^-1 gradH' [D2Q]^-1 gradH
  double gradient_norm = 0.0;
  int iterations = 0;
};

// Thrown when refinement fails; carries the last Newton iterate.
class RefinementError : public Error {
 public:
  RefinementError(ErrorKind kind, const std::string& message, CoefficientState last_iterate)
      : Error(kind, message), last_iterate_(std::move(last_iterate)) {}
  const CoefficientState& last_iterate() const { return last_iterate_; }

 private:
  CoefficientState last_iterate_;
};

inline constexpr double kRefineGradientTolerance = 1e-10;
inline constexpr int kRefineMaxIterations = 100;

// Damped Newton on grad H_q = 0 from embed(x*). Throws InvalidArgument for
// q <= 0, RefinementError(NewtonDiverged) when it does not converge, and
// RefinementError(NotAMaximum) when the limit is not a strict local maximum.
RefinedMaximum refine_local_maximum(const HarmonyParams& params, double q,
                                    const GridPoint& grid_point, const FillerRoleSpec& spec);

double predicted_value(const HarmonyParams& params, double q, const GridPoint& grid_point,
                       const FillerRoleSpec& spec);

struct GlobalMaximum {
  RefinedMaximum best;
  std::uint64_t index = 0;
  std::vector<RefinedMaximum> refined;  // one per grid point, grid order
  // Some pair of grid points is ordered differently by H on the grid and by
  // H_q at the refined maxima.
  bool ranking_flip = false;
  // The refined global maximum is not next to the H-optimal grid point.
  bool argmax_moved = false;
};

GlobalMaximum global_max_of_total(const HarmonyParams& params, double q,
                                  const FillerRoleSpec& spec,
                                  std::uint64_t cap = kDefaultGridCap);

}  // namespace gsc
