#include "gsc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace gsc {
namespace {

std::vector<double> grid_harmonies(const HarmonyParams& params, const std::vector<GridPoint>& grid,
                                   const FillerRoleSpec& spec) {
  std::vector<double> values;
  values.reserve(grid.size());
  for (const auto& point : grid) values.push_back(grammar_harmony(params, embed(point, spec)));
  return values;
}

OptimumReport optimum_of(const std::vector<GridPoint>& grid, const std::vector<double>& values) {
  OptimumReport report;
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  double second = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i != best) second = std::max(second, values[i]);
  }
  report.point = grid[best];
  report.index = best;
  report.value = values[best];
  report.gap = values.size() > 1 ? values[best] - second : std::numeric_limits<double>::infinity();
  report.tie = report.gap == 0.0;
  return report;
}

std::vector<double> boltzmann_of(const std::vector<double>& values, double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw Error(ErrorKind::InvalidArgument, "Boltzmann temperature must be finite and > 0");
  }
  const double top = *std::max_element(values.begin(), values.end());
  std::vector<double> probs(values.size());
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    probs[i] = std::exp((values[i] - top) / temperature);
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

// -[D2Q(x*)]^-1 grad H(x*), the first-order displacement per unit 1/q.
Eigen::VectorXd first_order_direction(const HarmonyParams& params, const CoefficientState& x) {
  return -hess_Q(x).ldlt().solve(grad_H(params, x));
}

}  // namespace

OptimumReport brute_force_optimum(const HarmonyParams& params, const FillerRoleSpec& spec,
                                  std::uint64_t cap) {
  const auto grid = enumerate_grid(spec, cap);
  return optimum_of(grid, grid_harmonies(params, grid, spec));
}

std::vector<double> boltzmann_distribution(const HarmonyParams& params, double temperature,
                                           const FillerRoleSpec& spec, std::uint64_t cap) {
  const auto grid = enumerate_grid(spec, cap);
  return boltzmann_of(grid_harmonies(params, grid, spec), temperature);
}

GridReport grid_report(const HarmonyParams& params, double temperature,
                       const FillerRoleSpec& spec, std::uint64_t cap) {
  GridReport report;
  report.points = enumerate_grid(spec, cap);
  report.harmony = grid_harmonies(params, report.points, spec);
  report.boltzmann = boltzmann_of(report.harmony, temperature);
  report.temperature = temperature;
  report.optimum = optimum_of(report.points, report.harmony);
  return report;
}

double predicted_value(const HarmonyParams& params, double q, const GridPoint& grid_point,
                       const FillerRoleSpec& spec) {
  const CoefficientState x = embed(grid_point, spec);
  const Eigen::VectorXd g = grad_H(params, x);
  const Eigen::VectorXd solved = hess_Q(x).ldlt().solve(g);
  return grammar_harmony(params, x) - 0.5 * g.dot(solved) / q;
}

RefinedMaximum refine_local_maximum(const HarmonyParams& params, double q,
                                    const GridPoint& grid_point, const FillerRoleSpec& spec) {
  if (!(q > 0.0) || !std::isfinite(q)) {
    throw Error(ErrorKind::InvalidArgument, "refinement needs finite q > 0");
  }
  const CoefficientState start = embed(grid_point, spec);
  RefinedMaximum out;
  out.grid_point = grid_point;
  out.first_order = start;
  out.first_order.flat() += first_order_direction(params, start) / q;
  out.predicted_value = predicted_value(params, q, grid_point, spec);

  CoefficientState x = start;
  Eigen::VectorXd g = grad_total(params, q, x);
  double gnorm = g.norm();
  int iter = 0;
  while (gnorm > kRefineGradientTolerance) {
    if (iter == kRefineMaxIterations) {
      std::ostringstream msg;
      msg << "Newton did not converge in " << kRefineMaxIterations << " iterations at q = " << q
          << " (|grad| = " << gnorm << ")";
      throw RefinementError(ErrorKind::NewtonDiverged, msg.str(), x);
    }
    ++iter;
    const Eigen::VectorXd step = hess_total(params, q, x).fullPivLu().solve(-g);
    if (!step.allFinite()) {
      throw RefinementError(ErrorKind::NewtonDiverged, "singular Hessian during refinement", x);
    }
    // Halve until the gradient norm decreases.
    double alpha = 1.0;
    bool accepted = false;
    for (int halvings = 0; halvings < 40; ++halvings, alpha *= 0.5) {
      CoefficientState trial = x;
      trial.flat() += alpha * step;
      const Eigen::VectorXd trial_g = grad_total(params, q, trial);
      const double trial_norm = trial_g.norm();
      if (trial_norm < gnorm) {
        x = std::move(trial);
        g = trial_g;
        gnorm = trial_norm;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      std::ostringstream msg;
      msg << "line search stalled at |grad| = " << gnorm << " (q = " << q << ")";
      throw RefinementError(ErrorKind::NewtonDiverged, msg.str(), x);
    }
  }

  Eigen::LLT<Eigen::MatrixXd> llt(-hess_total(params, q, x));
  if (llt.info() != Eigen::Success) {
    throw RefinementError(ErrorKind::NotAMaximum,
                          "refined stationary point is not a strict local maximum", x);
  }
  out.location = x;
  out.value = total_harmony(params, q, x);
  out.gradient_norm = gnorm;
  out.iterations = iter;
  return out;
}

GlobalMaximum global_max_of_total(const HarmonyParams& params, double q,
                                  const FillerRoleSpec& spec, std::uint64_t cap) {
  if (!(q > 0.0)) throw Error(ErrorKind::InvalidArgument, "global maximum of H_q needs q > 0");
  const auto grid = enumerate_grid(spec, cap);
  const auto on_grid = grid_harmonies(params, grid, spec);
  const auto optimum = optimum_of(grid, on_grid);

  GlobalMaximum result;
  result.refined.reserve(grid.size());
  for (const auto& point : grid) result.refined.push_back(refine_local_maximum(params, q, point, spec));

  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (result.refined[i].value > result.refined[best].value) best = i;
  }
  result.best = result.refined[best];
  result.index = best;
  result.argmax_moved = best != optimum.index;

  // Sort by (H, H_q); a flip is a later, strictly higher-H point whose H_q
  // falls below something seen at a strictly lower H.
  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (on_grid[a] != on_grid[b]) return on_grid[a] < on_grid[b];
    return result.refined[a].value < result.refined[b].value;
  });
  double max_below = -std::numeric_limits<double>::infinity();
  for (std::size_t start = 0; start < order.size() && !result.ranking_flip;) {
    std::size_t end = start;
    double group_max = -std::numeric_limits<double>::infinity();
    while (end < order.size() && on_grid[order[end]] == on_grid[order[start]]) {
      const double v = result.refined[order[end]].value;
      if (v < max_below) result.ranking_flip = true;
      group_max = std::max(group_max, v);
      ++end;
    }
    max_below = std::max(max_below, group_max);
    start = end;
  }
  return result;
}

}  // namespace gsc
