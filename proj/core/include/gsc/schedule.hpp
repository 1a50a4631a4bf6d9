#pragma once

// Time courses for discreteness q(t) and temperature T(t).

#include <cstdint>
#include <numbers>
#include <optional>
#include <variant>
#include <vector>

namespace gsc {

enum class ScheduleKind { Constant, LogCooling, FiniteTime, Table };

const char* to_string(ScheduleKind kind);

struct ScheduleValue {
  double q = 0.0;
  double temperature = 0.0;
};

struct FiniteTimeParams {
  double gap = 1.0;         // g: best minus second-best H on the grid
  double eta = 0.25;        // target ball radius
  double epsilon = 0.1;     // allowed failure probability
  double k_q = 1.0;
  double k_temperature = 1.0;
  double k_time = 1.0;
  double t0 = std::numbers::e;
};

struct Breakpoint {
  double t = 0.0;
  double q = 0.0;
  double temperature = 0.0;
};

class Schedule {
 public:
  struct Constant {
    double q;
    double temperature;
  };
  struct LogCooling {
    double q;
    double c;
    double t0;
  };
  struct FiniteTime {
    FiniteTimeParams params;
    double q;
    double end_temperature;
    double t_end;
  };
  struct Table {
    std::vector<Breakpoint> breakpoints;
  };

  // T may be 0 here (deterministic gradient ascent).
  static Schedule constant(double q, double temperature);
  // T(t) = c / log(t + t0), q fixed. Requires c > 0, t0 >= e.
  static Schedule log_cooling(double q, double c, double t0 = std::numbers::e);
  // Sorted (t, q, T) breakpoints, linearly interpolated, held constant
  // outside their range.
  static Schedule table(std::vector<Breakpoint> breakpoints);

  ScheduleKind kind() const;
  ScheduleValue at(double t) const;
  double q(double t) const { return at(t).q; }
  double temperature(double t) const { return at(t).temperature; }

  // Largest q over the schedule; drives the default step size.
  double max_q() const;

  // Integration horizon fixed by the schedule itself (finite-time only).
  std::optional<double> horizon() const;

  const std::variant<Constant, LogCooling, FiniteTime, Table>& definition() const { return def_; }

 private:
  friend Schedule finite_time_schedule(const FiniteTimeParams&, double, double);
  explicit Schedule(std::variant<Constant, LogCooling, FiniteTime, Table> def) : def_(std::move(def)) {}

  std::variant<Constant, LogCooling, FiniteTime, Table> def_;
};

inline constexpr double kDefaultMaxSteps = 1e9;

// q = k_q max(1/g, 1/eta), T_end = k_T g / log(1/eps), t_end = k_t exp(q/T_end),
// T(t) = max(q / log(t + t0), T_end). Throws ScheduleOverflow when t_end / dt
// exceeds max_steps.
Schedule finite_time_schedule(const FiniteTimeParams& params, double dt,
                              double max_steps = kDefaultMaxSteps);

// exp(k q / T) / q: order-of-magnitude lower bound on the time to reach
// equilibrium. Diagnostic only.
struct ArrheniusEstimate {
  double value = 0.0;
  bool overflow = false;
};
ArrheniusEstimate arrhenius_time_estimate(double q, double temperature, double k);

// min(1e-3, 0.1 / (1 + q)).
double default_step_size(double max_q);

}  // namespace gsc
