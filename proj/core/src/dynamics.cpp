#include "gsc/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "gsc/error.hpp"

namespace gsc {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

template <class Noise>
void em_update(Eigen::Ref<Eigen::VectorXd> y, const Eigen::VectorXd& grad, double dt,
               double sigma, const Noise& noise) {
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    y[i] = y[i] + grad[i] * dt + sigma * noise[i];
  }
}

}  // namespace

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(splitmix64(seed ^ index));
}

CoefficientState euler_maruyama_step(const CoefficientState& y, const HarmonyParams& params,
                                     double q, double temperature, double dt,
                                     const Eigen::VectorXd& noise) {
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be > 0");
  if (!(temperature >= 0.0)) throw Error(ErrorKind::InvalidArgument, "T must be >= 0");
  if (noise.size() != y.dimension()) {
    throw Error(ErrorKind::DimensionMismatch, "noise length must equal the state dimension");
  }
  const Eigen::VectorXd grad = grad_total(params, q, y);
  CoefficientState next = y;
  em_update(next.flat(), grad, dt, std::sqrt(2.0 * temperature * dt), noise);
  if (!next.all_finite()) {
    throw Error(ErrorKind::NonFiniteState,
                "Euler-Maruyama step produced a non-finite state (step too large for q?)");
  }
  return next;
}

std::uint64_t step_count(const SdeConfig& cfg) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) {
    throw Error(ErrorKind::InvalidArgument, "dt must be finite and > 0");
  }
  if (!std::isfinite(cfg.t_end)) throw Error(ErrorKind::InvalidArgument, "t_end must be finite");
  const double ratio = cfg.t_end / cfg.dt;
  if (ratio < 1.0 - 1e-9) throw Error(ErrorKind::InvalidArgument, "t_end must be >= dt");
  if (ratio >= 9.2e18) throw Error(ErrorKind::InvalidArgument, "step count overflows 64 bits");
  return static_cast<std::uint64_t>(std::llround(ratio));
}

CoefficientState initial_state(const SdeConfig& cfg, const FillerRoleSpec& spec,
                               std::mt19937_64& rng) {
  if (const auto* given = std::get_if<GivenInit>(&cfg.init)) {
    if (given->state.filler_count() != spec.filler_count() ||
        given->state.role_count() != spec.role_count()) {
      throw Error(ErrorKind::DimensionMismatch, "initial state shape does not match the filler/role layout");
    }
    if (!given->state.all_finite()) {
      throw Error(ErrorKind::NonFiniteState, "initial state has non-finite entries");
    }
    return given->state;
  }
  CoefficientState y = barycenter(spec);
  if (const auto* gauss = std::get_if<GaussianInit>(&cfg.init)) {
    std::normal_distribution<double> normal(0.0, gauss->sigma);
    for (Eigen::Index i = 0; i < y.flat().size(); ++i) y.flat()[i] += normal(rng);
  }
  return y;
}

RunResult run_trajectory(const SdeConfig& cfg, const Schedule& schedule,
                         const HarmonyParams& params, const FillerRoleSpec& spec,
                         std::uint64_t trajectory_index) {
  const auto started = std::chrono::steady_clock::now();
  if (params.dimension() != spec.dimension()) {
    throw Error(ErrorKind::DimensionMismatch, "Harmony parameters do not match the filler/role layout");
  }
  const std::uint64_t steps = step_count(cfg);
  auto rng = make_stream(cfg.seed, trajectory_index);
  std::normal_distribution<double> normal(0.0, 1.0);

  RunResult result;
  result.diagnostics.trajectory_index = trajectory_index;
  result.trajectory.record_stride = cfg.record_stride;

  CoefficientState current = initial_state(cfg, spec, rng);
  const int fillers = spec.filler_count();
  const Eigen::Index n = current.dimension();
  Eigen::VectorXd y = current.flat();
  Eigen::VectorXd previous = y;
  Eigen::VectorXd grad(n);
  Eigen::VectorXd noise = Eigen::VectorXd::Zero(n);

  auto record = [&](double t, const Eigen::VectorXd& v) {
    result.trajectory.times.push_back(t);
    result.trajectory.states.emplace_back(fillers, spec.role_count(), v);
  };
  if (cfg.record_stride > 0) record(0.0, y);

  std::uint64_t k = 0;
  ScheduleValue sv{};
  for (; k < steps; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    sv = schedule.at(t);
    grad_total_into(params, sv.q, fillers, y, grad);
    const double sigma = std::sqrt(2.0 * sv.temperature * cfg.dt);
    if (sigma > 0.0) {
      for (Eigen::Index i = 0; i < n; ++i) noise[i] = normal(rng);
    } else {
      noise.setZero();
    }
    previous = y;
    em_update(y, grad, cfg.dt, sigma, noise);
    if (!y.allFinite()) {
      result.diagnostics.failure =
          NumericalFailure{k, static_cast<double>(k + 1) * cfg.dt};
      y = previous;
      break;
    }
    const std::uint64_t done = k + 1;
    if (cfg.record_stride > 0 && (done % cfg.record_stride == 0 || done == steps)) {
      record(static_cast<double>(done) * cfg.dt, y);
    }
  }
  result.diagnostics.steps_taken = k;
  result.diagnostics.final_schedule = sv;
  result.final_state = CoefficientState(fillers, spec.role_count(), y);
  if (cfg.record_stride == 0) {
    record(static_cast<double>(k) * cfg.dt, y);
  } else if (result.trajectory.times.back() != static_cast<double>(k) * cfg.dt) {
    record(static_cast<double>(k) * cfg.dt, y);  // failure mid-stride
  }
  result.diagnostics.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

std::vector<RunResult> run_batch(const SdeConfig& cfg, const Schedule& schedule,
                                 const HarmonyParams& params, const FillerRoleSpec& spec,
                                 std::uint64_t n_runs, unsigned jobs) {
  std::vector<RunResult> results(n_runs);
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::uint64_t>(jobs, std::max<std::uint64_t>(n_runs, 1)));

  std::atomic<std::uint64_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::uint64_t i = next.fetch_add(1); i < n_runs; i = next.fetch_add(1)) {
      try {
        results[i] = run_trajectory(cfg, schedule, params, spec, i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next = n_runs;
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

}  // namespace gsc
