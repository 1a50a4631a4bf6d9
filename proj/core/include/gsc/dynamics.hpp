#pragma once

// Euler-Maruyama integration of dy = grad H_q(y) dt + sqrt(2T) dB under a
// (q, T) schedule. Every trajectory owns an RNG stream derived from
// (seed, trajectory index), so batches are reproducible in any thread order.

#include <cstdint>
#include <optional>
#include <random>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "gsc/harmony.hpp"
#include "gsc/representation.hpp"
#include "gsc/schedule.hpp"

namespace gsc {

struct BarycenterInit {};
struct GivenInit {
  CoefficientState state;
};
struct GaussianInit {
  double sigma = 0.1;  // around the barycenter
};
using InitialCondition = std::variant<BarycenterInit, GivenInit, GaussianInit>;

struct SdeConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  std::uint64_t seed = 0;
  InitialCondition init = BarycenterInit{};
  // Keep every `record_stride`-th state (plus t = 0 and the final state);
  // 0 keeps the final state only.
  std::uint64_t record_stride = 0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<CoefficientState> states;
  std::uint64_t record_stride = 0;
};

struct NumericalFailure {
  std::uint64_t step = 0;  // index of the step whose result was non-finite
  double time = 0.0;       // time that step would have reached
};

struct RunDiagnostics {
  std::uint64_t trajectory_index = 0;
  std::uint64_t steps_taken = 0;
  std::optional<NumericalFailure> failure;
  ScheduleValue final_schedule;
  double wall_time_seconds = 0.0;
};

struct RunResult {
  // Last finite state; on failure, the state before the failing step.
  CoefficientState final_state;
  Trajectory trajectory;
  RunDiagnostics diagnostics;

  bool ok() const { return !diagnostics.failure.has_value(); }
};

// mt19937_64 seeded from splitmix64(seed ^ index).
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index);

// y + grad H_q(y) dt + sqrt(2 T dt) noise. Throws NonFiniteState.
CoefficientState euler_maruyama_step(const CoefficientState& y, const HarmonyParams& params,
                                     double q, double temperature, double dt,
                                     const Eigen::VectorXd& noise);

// Number of steps: round(t_end / dt). Throws InvalidArgument on bad dt/t_end.
std::uint64_t step_count(const SdeConfig& cfg);

CoefficientState initial_state(const SdeConfig& cfg, const FillerRoleSpec& spec,
                               std::mt19937_64& rng);

// q and T are evaluated at the start of each step. Non-finite states end
// the run and are reported in diagnostics rather than thrown.
RunResult run_trajectory(const SdeConfig& cfg, const Schedule& schedule,
                         const HarmonyParams& params, const FillerRoleSpec& spec,
                         std::uint64_t trajectory_index = 0);

// Runs trajectories 0..n_runs-1 on up to `jobs` threads (0 = hardware
// concurrency). Results are ordered by trajectory index.
std::vector<RunResult> run_batch(const SdeConfig& cfg, const Schedule& schedule,
                                 const HarmonyParams& params, const FillerRoleSpec& spec,
                                 std::uint64_t n_runs, unsigned jobs = 0);

}  // namespace gsc
