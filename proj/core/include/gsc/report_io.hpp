#pragma once

// Serialization of reports: tidy RFC-4180 CSV and JSON. Numbers use the
// shortest round-trip decimal form so identical inputs give identical bytes.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gsc/analysis.hpp"
#include "gsc/dynamics.hpp"
#include "gsc/oracle.hpp"

namespace gsc {

std::string format_number(double value);

// Quotes the field when it contains a comma, quote, CR or LF.
std::string csv_field(std::string_view text);

// label,index,harmony,boltzmann
std::string grid_report_csv(const GridReport& report, const FillerRoleSpec& spec);
std::string grid_report_json(const GridReport& report, const FillerRoleSpec& spec);

// {empirical, boltzmann, tv, outside_fraction, n, labels, counts, outside, eta}
std::string verdict_json(const SamplingVerdict& verdict, const FillerRoleSpec& spec);

// t,y_<filler>_<role>,... in coefficient order.
std::string trajectory_csv(const Trajectory& trajectory, const FillerRoleSpec& spec);

// Per-run steps, failures and final (q, T), plus wall_time_seconds.
std::string diagnostics_json(std::span<const RunDiagnostics> runs);

}  // namespace gsc
