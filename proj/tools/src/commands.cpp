#include "gsc/app/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gsc/analysis.hpp"
#include "gsc/oracle.hpp"
#include "gsc/report_io.hpp"

namespace gsc::app {
namespace {

using nlohmann::ordered_json;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void write_file(const std::filesystem::path& dir, const std::string& name, const std::string& text) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + (dir / name).string());
  out << text;
}

ordered_json json_number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

ordered_json schedule_json(const Schedule& schedule) {
  ordered_json j;
  j["kind"] = to_string(schedule.kind());
  std::visit(overloaded{
                 [&](const Schedule::Constant& s) {
                   j["q"] = s.q;
                   j["T"] = s.temperature;
                 },
                 [&](const Schedule::LogCooling& s) {
                   j["q"] = s.q;
                   j["c"] = s.c;
                   j["t0"] = s.t0;
                 },
                 [&](const Schedule::FiniteTime& s) {
                   j["g"] = s.params.gap;
                   j["eta"] = s.params.eta;
                   j["eps"] = s.params.epsilon;
                   j["k_q"] = s.params.k_q;
                   j["k_T"] = s.params.k_temperature;
                   j["k_t"] = s.params.k_time;
                   j["q"] = s.q;
                   j["T_end"] = s.end_temperature;
                   j["t_end"] = s.t_end;
                 },
                 [&](const Schedule::Table& s) {
                   ordered_json bps = ordered_json::array();
                   for (const auto& b : s.breakpoints) bps.push_back({b.t, b.q, b.temperature});
                   j["breakpoints"] = bps;
                 },
             },
             schedule.definition());
  return j;
}

ordered_json sde_json(const SdeConfig& sde) {
  ordered_json j;
  j["dt"] = sde.dt;
  j["t_end"] = sde.t_end;
  j["steps"] = step_count(sde);
  j["seed"] = sde.seed;
  return j;
}

std::vector<RunDiagnostics> diagnostics_of(const std::vector<RunResult>& results) {
  std::vector<RunDiagnostics> d;
  d.reserve(results.size());
  for (const auto& r : results) d.push_back(r.diagnostics);
  return d;
}

void log_failures(const CommandOptions& opts, const std::vector<RunResult>& results) {
  if (!opts.log) return;
  for (const auto& r : results) {
    if (r.diagnostics.failure) {
      *opts.log << "trajectory " << r.diagnostics.trajectory_index
                << ": non-finite state at t = " << r.diagnostics.failure->time << " (step "
                << r.diagnostics.failure->step << ")\n";
    }
  }
}

void dump_trajectories(const RunConfig& cfg, const CommandOptions& opts,
                       const std::vector<RunResult>& results) {
  if (!opts.out_dir) return;
  const auto count = std::min<std::uint64_t>(cfg.command.dump_trajectories, results.size());
  for (std::uint64_t i = 0; i < count; ++i) {
    write_file(*opts.out_dir, "trajectory_" + std::to_string(i) + ".csv",
               trajectory_csv(results[i].trajectory, cfg.spec));
  }
}

struct OptimizeSummary {
  std::uint64_t n = 0;
  std::uint64_t failures = 0;
  std::optional<OptimumReport> oracle;
  std::optional<SuccessEstimate> success;
  double mean_final_total_harmony = 0.0;
  std::string report;
  std::string runs_csv;
  std::string diagnostics;
};

OptimizeSummary optimize_impl(const RunConfig& cfg, const CommandOptions& opts,
                              std::vector<RunResult>* keep = nullptr) {
  const Schedule schedule = build_schedule(cfg);
  const SdeConfig sde = effective_sde(cfg, schedule);
  auto results = run_batch(sde, schedule, cfg.params, cfg.spec, cfg.command.n_runs, opts.jobs);
  log_failures(opts, results);

  OptimizeSummary out;
  out.n = results.size();
  const double final_q = schedule.at(sde.t_end).q;

  std::optional<OptimumReport> oracle;
  try {
    oracle = brute_force_optimum(cfg.params, cfg.spec, cfg.grid_cap);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::GridTooLarge) throw;
    if (opts.log) *opts.log << "grid too large for the brute-force oracle; success rate skipped\n";
  }
  out.oracle = oracle;

  std::vector<GridPoint> outcomes;
  std::map<GridPoint, std::uint64_t> tally;
  std::ostringstream csv;
  csv << "trajectory,outcome,hit,final_total_harmony,status\r\n";
  double harmony_sum = 0.0;
  for (const auto& r : results) {
    const GridPoint outcome = quantize(r.final_state);
    const double value = total_harmony(cfg.params, final_q, r.final_state);
    csv << r.diagnostics.trajectory_index << ',' << csv_field(grid_label(outcome, cfg.spec)) << ',';
    if (oracle && !oracle->tie) csv << (outcome == oracle->point ? 1 : 0);
    csv << ',' << format_number(value) << ',' << (r.ok() ? "ok" : "non_finite") << "\r\n";
    if (!r.ok()) {
      ++out.failures;
      continue;
    }
    outcomes.push_back(outcome);
    ++tally[outcome];
    harmony_sum += value;
  }
  out.runs_csv = csv.str();
  out.mean_final_total_harmony =
      outcomes.empty() ? std::nan("") : harmony_sum / static_cast<double>(outcomes.size());

  ordered_json j;
  j["command"] = "optimize";
  j["n_runs"] = cfg.command.n_runs;
  j["schedule"] = schedule_json(schedule);
  j["sde"] = sde_json(sde);
  j["completed_runs"] = outcomes.size();
  j["failures"] = out.failures;

  ordered_json dist = ordered_json::array();
  std::optional<GridPoint> modal;
  std::uint64_t modal_count = 0;
  for (const auto& [point, count] : tally) {
    dist.push_back({{"label", grid_label(point, cfg.spec)}, {"count", count}});
    if (count > modal_count) {
      modal = point;
      modal_count = count;
    }
  }
  j["outcomes"] = dist;
  if (modal) {
    j["modal_outcome"] = grid_label(*modal, cfg.spec);
    j["modal_fraction"] = static_cast<double>(modal_count) / static_cast<double>(outcomes.size());
  } else {
    j["modal_outcome"] = nullptr;
    j["modal_fraction"] = nullptr;
  }
  j["mean_final_total_harmony"] = json_number(out.mean_final_total_harmony);

  if (oracle) {
    j["oracle"] = {{"optimum", grid_label(oracle->point, cfg.spec)},
                   {"harmony", oracle->value},
                   {"gap", json_number(oracle->gap)},
                   {"tie_at_optimum", oracle->tie}};
  } else {
    j["oracle"] = nullptr;
  }
  if (oracle && !oracle->tie && !outcomes.empty()) {
    out.success = success_probability(outcomes, oracle->point);
    j["success"] = {{"hits", out.success->hits},
                    {"n", out.success->n},
                    {"fraction", out.success->fraction},
                    {"wilson_lower", out.success->lower},
                    {"wilson_upper", out.success->upper}};
  } else {
    j["success"] = nullptr;
  }
  std::vector<std::string> warnings = cfg.warnings;
  if (oracle && oracle->tie) warnings.push_back("TieAtOptimum: H has several maximizers on the grid");
  j["warnings"] = warnings;
  out.report = j.dump(2) + "\n";
  out.diagnostics = diagnostics_json(diagnostics_of(results));
  if (keep) *keep = std::move(results);
  return out;
}

struct SampleSummary {
  std::optional<SamplingVerdict> verdict;
  std::uint64_t failures = 0;
  std::string report;
  std::string diagnostics;
  std::optional<GridReport> grid;
};

SampleSummary sample_impl(const RunConfig& cfg, const CommandOptions& opts,
                          std::vector<RunResult>* keep = nullptr) {
  const Schedule schedule = build_schedule(cfg);
  SdeConfig sde = effective_sde(cfg, schedule);
  if (cfg.command.burn_in) sde.record_stride = cfg.command.thin_steps;

  const double temperature = cfg.command.sample_temperature.value_or(schedule.at(sde.t_end).temperature);
  if (!(temperature > 0.0)) {
    throw ConfigError(ErrorKind::ValidationError, cfg.source,
                      {{"/command/sample/temperature",
                        "schedule ends at T = 0; give a positive target temperature"}});
  }

  auto results = run_batch(sde, schedule, cfg.params, cfg.spec, cfg.command.n_runs, opts.jobs);
  log_failures(opts, results);

  SampleSummary out;
  std::vector<CoefficientState> samples;
  for (const auto& r : results) {
    if (!r.ok()) {
      ++out.failures;
      continue;
    }
    if (cfg.command.burn_in) {
      for (std::size_t i = 0; i < r.trajectory.times.size(); ++i) {
        if (r.trajectory.times[i] >= *cfg.command.burn_in) samples.push_back(r.trajectory.states[i]);
      }
    } else {
      samples.push_back(r.final_state);
    }
  }

  ordered_json j;
  j["command"] = "sample";
  j["n_runs"] = cfg.command.n_runs;
  j["schedule"] = schedule_json(schedule);
  j["sde"] = sde_json(sde);
  j["temperature"] = temperature;
  j["failures"] = out.failures;
  out.verdict = sampling_verdict(samples, cfg.params, temperature, cfg.spec, cfg.command.eta, cfg.grid_cap);
  j["verdict"] = ordered_json::parse(verdict_json(*out.verdict, cfg.spec));
  j["warnings"] = cfg.warnings;
  out.report = j.dump(2) + "\n";
  out.diagnostics = diagnostics_json(diagnostics_of(results));
  out.grid = grid_report(cfg.params, temperature, cfg.spec, cfg.grid_cap);
  if (keep) *keep = std::move(results);
  return out;
}

// Central-difference gradient of a scalar function of the state.
template <class Fn>
Eigen::VectorXd fd_gradient(const Fn& fn, const CoefficientState& y, double h) {
  Eigen::VectorXd g(y.dimension());
  for (int i = 0; i < y.dimension(); ++i) {
    CoefficientState plus = y, minus = y;
    plus.flat()[i] += h;
    minus.flat()[i] -= h;
    g[i] = (fn(plus) - fn(minus)) / (2.0 * h);
  }
  return g;
}

double relative_error(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
  return (got - want).cwiseAbs().maxCoeff() / std::max(1.0, want.cwiseAbs().maxCoeff());
}

struct Check {
  std::string name;
  bool passed = true;
  bool skipped = false;
  ordered_json detail = ordered_json::object();
};

}  // namespace

CommandResult cmd_optimize(const RunConfig& cfg, const CommandOptions& opts) {
  std::vector<RunResult> results;
  const auto summary = optimize_impl(cfg, opts, &results);
  if (opts.out_dir) {
    write_file(*opts.out_dir, "optimize_report.json", summary.report);
    write_file(*opts.out_dir, "optimize_runs.csv", summary.runs_csv);
    write_file(*opts.out_dir, "diagnostics.json", summary.diagnostics);
    dump_trajectories(cfg, opts, results);
  }
  return {summary.failures > 0 ? kExitNumericalFailure : kExitOk, summary.report};
}

CommandResult cmd_sample(const RunConfig& cfg, const CommandOptions& opts) {
  std::vector<RunResult> results;
  const auto summary = sample_impl(cfg, opts, &results);
  if (opts.out_dir) {
    write_file(*opts.out_dir, "sample_verdict.json", verdict_json(*summary.verdict, cfg.spec));
    write_file(*opts.out_dir, "sample_report.json", summary.report);
    write_file(*opts.out_dir, "diagnostics.json", summary.diagnostics);
    write_file(*opts.out_dir, "grid_report.json", grid_report_json(*summary.grid, cfg.spec));
    write_file(*opts.out_dir, "grid_report.csv", grid_report_csv(*summary.grid, cfg.spec));
    dump_trajectories(cfg, opts, results);
  }
  return {summary.failures > 0 ? kExitNumericalFailure : kExitOk, summary.report};
}

CommandResult cmd_sweep(const RunConfig& cfg, SweepAxis axis, const std::vector<double>& values,
                        const CommandOptions& opts) {
  const bool sample = cfg.command.sweep_mode == SweepMode::Sample;
  std::ostringstream csv;
  csv << "axis,value,mode,status,n,failures,success,wilson_lower,wilson_upper,tv,outside_fraction,"
         "mean_final_total_harmony,refined_offset_times_q,message\r\n";
  bool numerical = false;
  bool config = false;
  CommandOptions inner = opts;
  inner.out_dir.reset();

  for (double value : values) {
    std::string status = "ok";
    std::string message;
    std::string n, failures, success, lo, hi, tv, outside, mean_h, offset;
    try {
      RunConfig c = cfg;
      switch (axis) {
        case SweepAxis::Q:
          if (c.schedule.kind == ScheduleKind::Constant || c.schedule.kind == ScheduleKind::LogCooling) {
            c.schedule.q = value;
          } else {
            throw Error(ErrorKind::InvalidArgument, std::string("axis q does not apply to a ") +
                                                        to_string(c.schedule.kind) + " schedule");
          }
          break;
        case SweepAxis::Temperature:
          if (c.schedule.kind != ScheduleKind::Constant) {
            throw Error(ErrorKind::InvalidArgument, "axis T needs a constant schedule");
          }
          c.schedule.temperature = value;
          break;
        case SweepAxis::C:
          if (c.schedule.kind != ScheduleKind::LogCooling) {
            throw Error(ErrorKind::InvalidArgument, "axis c needs a log_cooling schedule");
          }
          c.schedule.c = value;
          break;
        case SweepAxis::Dt:
          if (!(value > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be > 0");
          c.sde.dt = value;
          break;
      }
      if (sample) {
        const auto s = sample_impl(c, inner);
        n = std::to_string(s.verdict->n);
        failures = std::to_string(s.failures);
        tv = format_number(s.verdict->tv);
        outside = format_number(s.verdict->outside_fraction);
        if (s.failures > 0) status = "numerical_failure";
      } else {
        const auto o = optimize_impl(c, inner);
        n = std::to_string(o.n);
        failures = std::to_string(o.failures);
        if (o.success) {
          success = format_number(o.success->fraction);
          lo = format_number(o.success->lower);
          hi = format_number(o.success->upper);
        }
        if (std::isfinite(o.mean_final_total_harmony)) mean_h = format_number(o.mean_final_total_harmony);
        if (o.failures > 0) status = "numerical_failure";
      }
      if (axis == SweepAxis::Q && value > 0.0) {
        try {
          const auto opt = brute_force_optimum(c.params, c.spec, c.grid_cap);
          const auto refined = refine_local_maximum(c.params, value, opt.point, c.spec);
          offset = format_number(
              (refined.location.flat() - embed(opt.point, c.spec).flat()).norm() * value);
        } catch (const Error&) {
          // Left blank: no grid oracle or refinement failed at this q.
        }
      }
    } catch (const Error& e) {
      status = "failed";
      message = e.what();
      if (e.kind() == ErrorKind::NonFiniteState) numerical = true;
      else config = true;
    }
    if (status == "numerical_failure") numerical = true;
    csv << to_string(axis) << ',' << format_number(value) << ',' << (sample ? "sample" : "optimize")
        << ',' << status << ',' << n << ',' << failures << ',' << success << ',' << lo << ',' << hi
        << ',' << tv << ',' << outside << ',' << mean_h << ',' << offset << ',' << csv_field(message)
        << "\r\n";
    if (opts.log) *opts.log << "sweep " << to_string(axis) << " = " << value << ": " << status << "\n";
  }

  const std::string report = csv.str();
  if (opts.out_dir) write_file(*opts.out_dir, "sweep.csv", report);
  int code = kExitOk;
  if (config) code = kExitConfigError;
  if (numerical) code = kExitNumericalFailure;
  return {code, report};
}

CommandResult cmd_verify(const RunConfig& cfg, const CommandOptions& opts, const DerivativeSuite& suite) {
  constexpr double h = 1e-5;
  constexpr double tolerance = 1e-5;
  const auto& spec = cfg.spec;
  const auto& params = cfg.params;
  const int F = spec.filler_count();
  const int R = spec.role_count();
  const double q = std::max(1.0, build_schedule(cfg).max_q());

  auto rng = make_stream(cfg.sde.seed, 0);
  std::uniform_real_distribution<double> uniform(-2.0, 2.0);
  std::vector<CoefficientState> states;
  for (std::uint64_t s = 0; s < cfg.command.verify_samples; ++s) {
    CoefficientState y(F, R);
    for (int i = 0; i < y.dimension(); ++i) y.flat()[i] = uniform(rng);
    states.push_back(std::move(y));
  }

  std::vector<Check> checks;
  auto fd_check = [&](const std::string& name, auto&& analytic, auto&& numeric) {
    Check c{name};
    double worst = 0.0;
    for (const auto& y : states) worst = std::max(worst, relative_error(analytic(y), numeric(y)));
    c.passed = worst <= tolerance;
    c.detail["max_relative_error"] = worst;
    c.detail["tolerance"] = tolerance;
    c.detail["states"] = states.size();
    checks.push_back(std::move(c));
  };

  fd_check(
      "grad_H", [&](const CoefficientState& y) { return suite.grad_H(params, y); },
      [&](const CoefficientState& y) {
        return fd_gradient([&](const CoefficientState& z) { return grammar_harmony(params, z); }, y, h);
      });
  fd_check(
      "grad_Q", [&](const CoefficientState& y) { return suite.grad_Q(y); },
      [&](const CoefficientState& y) {
        return fd_gradient([](const CoefficientState& z) { return quantization_harmony(z); }, y, h);
      });
  fd_check(
      "hess_Q", [&](const CoefficientState& y) { return suite.hess_Q(y); },
      [&](const CoefficientState& y) {
        Eigen::MatrixXd m(y.dimension(), y.dimension());
        for (int i = 0; i < y.dimension(); ++i) {
          CoefficientState plus = y, minus = y;
          plus.flat()[i] += h;
          minus.flat()[i] -= h;
          m.col(i) = (suite.grad_Q(plus) - suite.grad_Q(minus)) / (2.0 * h);
        }
        return m;
      });
  fd_check(
      "grad_total",
      [&](const CoefficientState& y) -> Eigen::VectorXd { return suite.grad_H(params, y) + q * suite.grad_Q(y); },
      [&](const CoefficientState& y) {
        return fd_gradient([&](const CoefficientState& z) { return total_harmony(params, q, z); }, y, h);
      });

  // Grid identities and the diagonal grid Hessian.
  std::vector<GridPoint> grid_points;
  bool full_grid = true;
  try {
    grid_points = enumerate_grid(spec, cfg.grid_cap);
  } catch (const Error&) {
    full_grid = false;
    std::uniform_int_distribution<int> pick(0, F - 1);
    for (std::uint64_t s = 0; s < cfg.command.verify_samples; ++s) {
      GridPoint p{std::vector<int>(R)};
      for (auto& a : p.assignment) a = pick(rng);
      grid_points.push_back(std::move(p));
    }
  }
  {
    Check c{"grid_identities"};
    for (const auto& p : grid_points) {
      const auto x = embed(p, spec);
      if (quantization_harmony(x) != 0.0 || !(suite.grad_Q(x).array() == 0.0).all() ||
          !grid_residual(x).on_grid()) {
        c.passed = false;
        c.detail["first_failure"] = grid_label(p, spec);
        break;
      }
    }
    c.detail["points_checked"] = grid_points.size();
    c.detail["exhaustive"] = full_grid;
    checks.push_back(std::move(c));
  }
  {
    Check c{"grid_hessian"};
    std::map<std::string, std::uint64_t> multiset;
    for (std::size_t k = 0; k < grid_points.size() && c.passed; ++k) {
      const auto x = embed(grid_points[k], spec);
      const Eigen::MatrixXd hq = suite.hess_Q(x);
      for (int i = 0; i < hq.rows(); ++i) {
        for (int j = 0; j < hq.cols(); ++j) {
          const double want = i == j ? -(1.0 + 4.0 * x.flat()[i] * x.flat()[i]) : 0.0;
          if (hq(i, j) != want) c.passed = false;
        }
        if (k == 0) ++multiset[format_number(hq(i, i))];
      }
    }
    c.detail["diagonal_multiset"] = multiset;
    c.detail["points_checked"] = grid_points.size();
    checks.push_back(std::move(c));
  }
  {
    Check c{"refinement_rate"};
    if (!full_grid) {
      c.skipped = true;
      c.detail["reason"] = "grid too large for the brute-force oracle";
    } else {
      try {
        const auto opt = brute_force_optimum(params, spec, cfg.grid_cap);
        const auto x = embed(opt.point, spec);
        std::vector<double> offsets, errors;
        for (double qq : {20.0, 40.0, 80.0, 160.0}) {
          const auto m = refine_local_maximum(params, qq, opt.point, spec);
          offsets.push_back((m.location.flat() - x.flat()).norm() * qq);
          errors.push_back(std::abs(m.value - m.predicted_value));
        }
        double mean = 0.0;
        for (double o : offsets) mean += o / static_cast<double>(offsets.size());
        bool stable = true;
        if (mean > 1e-12) {
          for (double o : offsets) stable = stable && std::abs(o - mean) <= 0.25 * mean;
        }
        std::vector<double> ratios;
        bool second_order = true;
        for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
          if (errors[i + 1] < 1e-11) continue;  // below the round-off floor
          const double ratio = errors[i] / errors[i + 1];
          ratios.push_back(ratio);
          second_order = second_order && ratio >= 3.0 && ratio <= 5.0;
        }
        c.passed = stable && second_order;
        c.detail["q"] = {20.0, 40.0, 80.0, 160.0};
        c.detail["offset_times_q"] = offsets;
        c.detail["value_error"] = errors;
        c.detail["value_error_ratios"] = ratios;
      } catch (const Error& e) {
        c.passed = false;
        c.detail["error"] = e.what();
      }
    }
    checks.push_back(std::move(c));
  }

  ordered_json j;
  j["command"] = "verify";
  ordered_json list = ordered_json::array();
  std::vector<std::string> failed;
  for (const auto& c : checks) {
    list.push_back({{"name", c.name}, {"passed", c.passed}, {"skipped", c.skipped}, {"detail", c.detail}});
    if (!c.passed) failed.push_back(c.name);
  }
  j["checks"] = list;
  j["failed"] = failed;
  j["passed"] = failed.empty();
  const std::string report = j.dump(2) + "\n";
  if (opts.out_dir) write_file(*opts.out_dir, "verify_report.json", report);
  if (opts.log) {
    for (const auto& c : checks) {
      *opts.log << (c.skipped ? "SKIP " : c.passed ? "PASS " : "FAIL ") << c.name << "\n";
    }
  }
  return {failed.empty() ? kExitOk : kExitVerificationFailed, report};
}

}  // namespace gsc::app
