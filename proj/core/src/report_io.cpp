#include "gsc/report_io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

namespace gsc {
namespace {

using nlohmann::ordered_json;

ordered_json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

std::vector<std::string> grid_labels(const std::vector<GridPoint>& points, const FillerRoleSpec& spec) {
  std::vector<std::string> labels;
  labels.reserve(points.size());
  for (const auto& p : points) labels.push_back(grid_label(p, spec));
  return labels;
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string grid_report_csv(const GridReport& report, const FillerRoleSpec& spec) {
  std::ostringstream out;
  out << "label,index,harmony,boltzmann\r\n";
  for (std::size_t i = 0; i < report.points.size(); ++i) {
    out << csv_field(grid_label(report.points[i], spec)) << ',' << i << ','
        << format_number(report.harmony[i]) << ',' << format_number(report.boltzmann[i]) << "\r\n";
  }
  return out.str();
}

std::string grid_report_json(const GridReport& report, const FillerRoleSpec& spec) {
  ordered_json j;
  j["labels"] = grid_labels(report.points, spec);
  j["harmony"] = report.harmony;
  j["temperature"] = report.temperature;
  j["boltzmann"] = report.boltzmann;
  j["argmax"] = report.optimum.index;
  j["argmax_label"] = grid_label(report.optimum.point, spec);
  j["gap"] = number_or_null(report.optimum.gap);
  j["tie_at_optimum"] = report.optimum.tie;
  return j.dump(2) + "\n";
}

std::string verdict_json(const SamplingVerdict& verdict, const FillerRoleSpec& spec) {
  ordered_json j;
  j["empirical"] = verdict.conditional;
  j["boltzmann"] = verdict.boltzmann;
  j["tv"] = verdict.tv;
  j["outside_fraction"] = verdict.outside_fraction;
  j["n"] = verdict.n;
  std::vector<std::string> labels;
  if (const auto size = grid_size(spec)) {
    labels = grid_labels(enumerate_grid(spec, *size), spec);
  }
  j["labels"] = labels;
  j["counts"] = verdict.empirical.counts;
  j["outside"] = verdict.empirical.outside;
  j["eta"] = verdict.empirical.eta;
  return j.dump(2) + "\n";
}

std::string trajectory_csv(const Trajectory& trajectory, const FillerRoleSpec& spec) {
  std::ostringstream out;
  out << 't';
  for (int r = 0; r < spec.role_count(); ++r) {
    for (int f = 0; f < spec.filler_count(); ++f) out << ',' << csv_field(spec.coefficient_name(f, r));
  }
  out << "\r\n";
  for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
    out << format_number(trajectory.times[i]);
    const auto& flat = trajectory.states[i].flat();
    for (Eigen::Index k = 0; k < flat.size(); ++k) out << ',' << format_number(flat[k]);
    out << "\r\n";
  }
  return out.str();
}

std::string diagnostics_json(std::span<const RunDiagnostics> runs) {
  ordered_json j;
  std::uint64_t failures = 0;
  std::uint64_t steps = 0;
  double wall = 0.0;
  ordered_json list = ordered_json::array();
  for (const auto& d : runs) {
    ordered_json r;
    r["trajectory"] = d.trajectory_index;
    r["steps_taken"] = d.steps_taken;
    if (d.failure) {
      ++failures;
      r["failure"] = {{"step", d.failure->step}, {"time", d.failure->time}};
    } else {
      r["failure"] = nullptr;
    }
    r["final_q"] = d.final_schedule.q;
    r["final_T"] = d.final_schedule.temperature;
    list.push_back(std::move(r));
    steps += d.steps_taken;
    wall += d.wall_time_seconds;
  }
  j["runs"] = runs.size();
  j["steps_taken"] = steps;
  j["failures"] = failures;
  j["per_run"] = std::move(list);
  j["wall_time_seconds"] = wall;
  return j.dump(2) + "\n";
}

}  // namespace gsc
