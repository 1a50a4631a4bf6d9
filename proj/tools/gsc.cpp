#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gsc/app/commands.hpp"
#include "gsc/app/config.hpp"

namespace {

using namespace gsc::app;

struct Args {
  std::string config;
  unsigned jobs = 0;
  std::string out;
  std::optional<std::uint64_t> seed_override;
};

void add_common(CLI::App* sub, Args& args) {
  sub->add_option("--config", args.config, "JSON run configuration")->required();
  sub->add_option("--jobs", args.jobs, "worker threads (0 = all cores)");
  sub->add_option("--out", args.out, "output directory (overrides command.out_dir)");
  sub->add_option("--seed-override", args.seed_override, "replace sde.seed");
}

void report_config_error(const ConfigError& e) {
  std::cerr << "gsc: invalid configuration " << e.source() << "\n";
  for (const auto& issue : e.issues()) {
    std::cerr << "  " << (issue.pointer.empty() ? "/" : issue.pointer) << ": " << issue.message << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient Symbolic Computation: harmony optimization and sampling"};
  app.require_subcommand(1);
  Args args;
  auto* optimize = app.add_subcommand("optimize", "anneal from a schedule and report grid outcomes");
  auto* sample = app.add_subcommand("sample", "compare SDE samples against the Boltzmann distribution");
  auto* sweep = app.add_subcommand("sweep", "repeat optimize or sample across one parameter axis");
  auto* verify = app.add_subcommand("verify", "check derivatives and grid identities numerically");
  for (auto* sub : {optimize, sample, sweep, verify}) add_common(sub, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    RunConfig cfg = load_config(args.config);
    cfg.grid_cap = grid_cap_from_env();
    if (args.seed_override) cfg.sde.seed = *args.seed_override;
    for (const auto& w : cfg.warnings) std::cerr << "gsc: warning: " << w << "\n";

    CommandOptions opts;
    opts.jobs = args.jobs;
    opts.out_dir = args.out.empty() ? std::filesystem::path(cfg.command.out_dir) : std::filesystem::path(args.out);
    opts.log = &std::cerr;

    CommandResult result;
    if (optimize->parsed()) {
      result = cmd_optimize(cfg, opts);
    } else if (sample->parsed()) {
      result = cmd_sample(cfg, opts);
    } else if (sweep->parsed()) {
      if (!cfg.command.sweep_axis || cfg.command.sweep_values.empty()) {
        throw ConfigError(gsc::ErrorKind::ValidationError, cfg.source,
                          {{"/command/sweep", "sweep needs an axis and at least one value"}});
      }
      result = cmd_sweep(cfg, *cfg.command.sweep_axis, cfg.command.sweep_values, opts);
    } else {
      result = cmd_verify(cfg, opts);
    }
    std::cout << result.report;
    return result.exit_code;
  } catch (const ConfigError& e) {
    report_config_error(e);
    return kExitConfigError;
  } catch (const gsc::Error& e) {
    std::cerr << "gsc: " << e.what() << "\n";
    switch (e.kind()) {
      case gsc::ErrorKind::NonFiniteState:
      case gsc::ErrorKind::NewtonDiverged:
      case gsc::ErrorKind::NotAMaximum:
        return kExitNumericalFailure;
      default:
        return kExitConfigError;
    }
  } catch (const std::exception& e) {
    std::cerr << "gsc: " << e.what() << "\n";
    return kExitNumericalFailure;
  }
}
