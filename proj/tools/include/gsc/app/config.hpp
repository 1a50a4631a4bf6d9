#pragma once

// JSON run configuration: problem, schedule, integrator and command settings.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gsc/analysis.hpp"
#include "gsc/dynamics.hpp"
#include "gsc/error.hpp"
#include "gsc/harmony.hpp"
#include "gsc/representation.hpp"
#include "gsc/schedule.hpp"

namespace gsc::app {

struct ConfigIssue {
  std::string pointer;  // JSON pointer into the document, e.g. "/sde/seed"
  std::string message;
};

// Every validation problem in one document, not just the first.
class ConfigError : public Error {
 public:
  ConfigError(ErrorKind kind, std::string source, std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }
  const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::vector<ConfigIssue> issues_;
};

struct ScheduleSpec {
  ScheduleKind kind = ScheduleKind::Constant;
  double q = 0.0;
  double temperature = 0.0;       // constant
  double c = 1.0;                 // log_cooling
  double t0 = 2.718281828459045;  // log_cooling, finite_time
  std::optional<double> gap;      // finite_time; brute-force gap when absent
  FiniteTimeParams finite_time;
  double max_steps = kDefaultMaxSteps;
  std::vector<Breakpoint> breakpoints;  // table
};

enum class SweepAxis { Q, Temperature, C, Dt };
enum class SweepMode { Optimize, Sample };

const char* to_string(SweepAxis axis);

struct CommandParams {
  std::uint64_t n_runs = 100;
  std::uint64_t record_stride = 0;
  std::uint64_t dump_trajectories = 0;
  double eta = kDefaultEta;
  std::string out_dir = "gsc_out";
  // sample: Boltzmann temperature to compare against (default: T at t_end)
  std::optional<double> sample_temperature;
  // sample: when set, every thin_steps-th state after burn_in is retained
  // instead of only the final state.
  std::optional<double> burn_in;
  std::uint64_t thin_steps = 1000;
  // sweep
  std::optional<SweepAxis> sweep_axis;
  std::vector<double> sweep_values;
  SweepMode sweep_mode = SweepMode::Optimize;
  // verify
  std::uint64_t verify_samples = 100;
};

struct RunConfig {
  FillerRoleSpec spec;
  HarmonyParams params;
  ScheduleSpec schedule;
  SdeConfig sde;
  bool t_end_from_schedule = false;
  CommandParams command;
  std::uint64_t grid_cap = kDefaultGridCap;
  std::vector<std::string> warnings;
  std::string source;
};

// Reads GSC_MAX_GRID if set.
std::uint64_t grid_cap_from_env();

// Throws ConfigError(ParseError) for malformed JSON, ConfigError(ValidationError)
// listing every violation otherwise. Warnings (e.g. W symmetrized) are
// returned in RunConfig::warnings.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const nlohmann::json& doc, const std::string& source = "<memory>");

// Builds the runtime schedule; finite-time schedules pull g from the brute-force
// oracle when it is not given.
Schedule build_schedule(const RunConfig& cfg);

// The integrator settings with the schedule's horizon applied.
SdeConfig effective_sde(const RunConfig& cfg, const Schedule& schedule);

}  // namespace gsc::app
