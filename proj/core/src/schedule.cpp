#include "gsc/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "gsc/error.hpp"

namespace gsc {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorKind::BadScheduleParam, message);
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

const char* to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::Constant: return "constant";
    case ScheduleKind::LogCooling: return "log_cooling";
    case ScheduleKind::FiniteTime: return "finite_time";
    case ScheduleKind::Table: return "table";
  }
  return "unknown";
}

Schedule Schedule::constant(double q, double temperature) {
  require(finite_nonneg(q), "q must be finite and >= 0");
  require(finite_nonneg(temperature), "T must be finite and >= 0");
  return Schedule(Constant{q, temperature});
}

Schedule Schedule::log_cooling(double q, double c, double t0) {
  require(finite_nonneg(q), "q must be finite and >= 0");
  require(std::isfinite(c) && c > 0.0, "cooling constant c must be > 0");
  require(std::isfinite(t0) && t0 >= std::numbers::e, "t0 must be >= e");
  return Schedule(LogCooling{q, c, t0});
}

Schedule Schedule::table(std::vector<Breakpoint> breakpoints) {
  require(!breakpoints.empty(), "table schedule needs at least one breakpoint");
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    const auto& bp = breakpoints[i];
    require(std::isfinite(bp.t), "breakpoint times must be finite");
    require(finite_nonneg(bp.q), "breakpoint q must be finite and >= 0");
    require(finite_nonneg(bp.temperature), "breakpoint T must be finite and >= 0");
    if (i > 0) {
      require(bp.t > breakpoints[i - 1].t, "breakpoint times must be strictly increasing");
    }
  }
  return Schedule(Table{std::move(breakpoints)});
}

ScheduleKind Schedule::kind() const {
  return std::visit(overloaded{
                        [](const Constant&) { return ScheduleKind::Constant; },
                        [](const LogCooling&) { return ScheduleKind::LogCooling; },
                        [](const FiniteTime&) { return ScheduleKind::FiniteTime; },
                        [](const Table&) { return ScheduleKind::Table; },
                    },
                    def_);
}

ScheduleValue Schedule::at(double t) const {
  return std::visit(
      overloaded{
          [](const Constant& s) { return ScheduleValue{s.q, s.temperature}; },
          [t](const LogCooling& s) { return ScheduleValue{s.q, s.c / std::log(t + s.t0)}; },
          [t](const FiniteTime& s) {
            const double cooled = s.q / std::log(t + s.params.t0);
            return ScheduleValue{s.q, std::max(cooled, s.end_temperature)};
          },
          [t](const Table& s) {
            const auto& bps = s.breakpoints;
            if (t <= bps.front().t) return ScheduleValue{bps.front().q, bps.front().temperature};
            if (t >= bps.back().t) return ScheduleValue{bps.back().q, bps.back().temperature};
            const auto hi = std::upper_bound(bps.begin(), bps.end(), t,
                                             [](double v, const Breakpoint& b) { return v < b.t; });
            const auto lo = hi - 1;
            const double w = (t - lo->t) / (hi->t - lo->t);
            return ScheduleValue{lo->q + w * (hi->q - lo->q),
                                 lo->temperature + w * (hi->temperature - lo->temperature)};
          },
      },
      def_);
}

double Schedule::max_q() const {
  return std::visit(overloaded{
                        [](const Constant& s) { return s.q; },
                        [](const LogCooling& s) { return s.q; },
                        [](const FiniteTime& s) { return s.q; },
                        [](const Table& s) {
                          double m = 0.0;
                          for (const auto& b : s.breakpoints) m = std::max(m, b.q);
                          return m;
                        },
                    },
                    def_);
}

std::optional<double> Schedule::horizon() const {
  if (const auto* ft = std::get_if<FiniteTime>(&def_)) return ft->t_end;
  return std::nullopt;
}

Schedule finite_time_schedule(const FiniteTimeParams& p, double dt, double max_steps) {
  require(std::isfinite(p.gap) && p.gap > 0.0, "gap g must be > 0");
  require(std::isfinite(p.eta) && p.eta > 0.0, "eta must be > 0");
  require(p.epsilon > 0.0 && p.epsilon < 1.0, "epsilon must lie in (0, 1)");
  require(std::isfinite(p.k_q) && p.k_q > 0.0, "k_q must be > 0");
  require(std::isfinite(p.k_temperature) && p.k_temperature > 0.0, "k_T must be > 0");
  require(std::isfinite(p.k_time) && p.k_time > 0.0, "k_t must be > 0");
  require(std::isfinite(p.t0) && p.t0 >= std::numbers::e, "t0 must be >= e");
  require(std::isfinite(dt) && dt > 0.0, "dt must be > 0");

  const double q = p.k_q * std::max(1.0 / p.gap, 1.0 / p.eta);
  const double end_temperature = p.k_temperature * p.gap / std::log(1.0 / p.epsilon);
  const double t_end = p.k_time * std::exp(q / end_temperature);
  if (!std::isfinite(t_end) || t_end / dt > max_steps) {
    std::ostringstream msg;
    msg << "finite-time schedule needs t_end = " << t_end << " (" << t_end / dt
        << " steps at dt = " << dt << "), above the wall of " << max_steps << " steps";
    throw Error(ErrorKind::ScheduleOverflow, msg.str());
  }
  return Schedule(Schedule::FiniteTime{p, q, end_temperature, t_end});
}

ArrheniusEstimate arrhenius_time_estimate(double q, double temperature, double k) {
  if (!(q > 0.0) || !(k > 0.0) || !(temperature >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "Arrhenius estimate needs q > 0, k > 0, T >= 0");
  }
  if (temperature == 0.0) return {std::numeric_limits<double>::infinity(), true};
  const double value = std::exp(k * q / temperature) / q;
  if (!std::isfinite(value)) return {std::numeric_limits<double>::infinity(), true};
  return {value, false};
}

double default_step_size(double max_q) { return std::min(1e-3, 0.1 / (1.0 + max_q)); }

}  // namespace gsc
