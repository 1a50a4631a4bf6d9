#pragma once

// optimize / sample / sweep / verify. Each command returns its exit code and
// the JSON (or CSV, for sweep) report it wrote.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gsc/app/config.hpp"

namespace gsc::app {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailed = 1,
  kExitNumericalFailure = 2,
  kExitConfigError = 3,
};

struct CommandOptions {
  unsigned jobs = 0;  // 0 = hardware concurrency
  // Where report files go; nullopt writes nothing.
  std::optional<std::filesystem::path> out_dir;
  std::ostream* log = nullptr;
};

struct CommandResult {
  int exit_code = kExitOk;
  std::string report;
};

CommandResult cmd_optimize(const RunConfig& cfg, const CommandOptions& opts = {});
CommandResult cmd_sample(const RunConfig& cfg, const CommandOptions& opts = {});
CommandResult cmd_sweep(const RunConfig& cfg, SweepAxis axis, const std::vector<double>& values,
                        const CommandOptions& opts = {});

// The derivative routines under test; tests swap in broken ones to check
// that verify notices.
struct DerivativeSuite {
  std::function<Eigen::VectorXd(const HarmonyParams&, const CoefficientState&)> grad_H = gsc::grad_H;
  std::function<Eigen::VectorXd(const CoefficientState&)> grad_Q = gsc::grad_Q;
  std::function<Eigen::MatrixXd(const CoefficientState&)> hess_Q = gsc::hess_Q;
};

CommandResult cmd_verify(const RunConfig& cfg, const CommandOptions& opts = {},
                         const DerivativeSuite& suite = {});

}  // namespace gsc::app
