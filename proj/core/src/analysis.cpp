#include "gsc/analysis.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "gsc/error.hpp"
#include "gsc/oracle.hpp"

namespace gsc {
namespace {

constexpr double kWilsonZ = 1.959963984540054;  // two-sided 95%

void check_eta(double eta, const FillerRoleSpec& spec) {
  if (!(eta > 0.0)) throw Error(ErrorKind::InvalidArgument, "eta must be > 0");
  // Distinct one-hot grid points are at least sqrt(2) apart.
  const double bound = std::numbers::sqrt2 / 2.0;
  if (spec.filler_count() > 1 && eta >= bound) {
    std::ostringstream msg;
    msg << "eta = " << eta << " must be below half the minimum grid spacing (" << bound << ")";
    throw Error(ErrorKind::EtaTooLarge, msg.str());
  }
}

void check_normalized(std::span<const double> v, const char* which) {
  double total = 0.0;
  for (double x : v) total += x;
  if (std::abs(total - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << which << " sums to " << total << ", not 1";
    throw Error(ErrorKind::NotNormalized, msg.str());
  }
}

}  // namespace

std::optional<std::uint64_t> classify_sample(const CoefficientState& y, const FillerRoleSpec& spec,
                                             double eta) {
  check_eta(eta, spec);
  if (y.filler_count() != spec.filler_count() || y.role_count() != spec.role_count()) {
    throw Error(ErrorKind::DimensionMismatch, "sample shape does not match the filler/role layout");
  }
  const GridPoint nearest = quantize(y);
  const double distance = (y.flat() - embed(nearest, spec).flat()).norm();
  if (distance <= eta) return grid_rank(nearest, spec);
  return std::nullopt;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw Error(ErrorKind::LengthMismatch, "probability vectors differ in length");
  }
  check_normalized(p, "first distribution");
  check_normalized(q, "second distribution");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
  return 0.5 * sum;
}

std::vector<double> EmpiricalGridDistribution::conditional() const {
  const std::uint64_t in = inside();
  if (in == 0) return {};
  std::vector<double> probs(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    probs[i] = static_cast<double>(counts[i]) / static_cast<double>(in);
  }
  return probs;
}

SamplingVerdict sampling_verdict(std::span<const CoefficientState> samples,
                                 const HarmonyParams& params, double temperature,
                                 const FillerRoleSpec& spec, double eta, std::uint64_t cap) {
  if (samples.size() < kMinVerdictSamples) {
    std::ostringstream msg;
    msg << "sampling verdict needs at least " << kMinVerdictSamples << " samples, got "
        << samples.size();
    throw Error(ErrorKind::InsufficientSamples, msg.str());
  }
  SamplingVerdict verdict;
  verdict.boltzmann = boltzmann_distribution(params, temperature, spec, cap);
  auto& emp = verdict.empirical;
  emp.counts.assign(verdict.boltzmann.size(), 0);
  emp.eta = eta;
  for (const auto& y : samples) {
    if (const auto idx = classify_sample(y, spec, eta)) {
      ++emp.counts[*idx];
    } else {
      ++emp.outside;
    }
    ++emp.total;
  }
  verdict.n = emp.total;
  verdict.outside_fraction = static_cast<double>(emp.outside) / static_cast<double>(emp.total);
  verdict.conditional = emp.conditional();
  if (!verdict.conditional.empty()) {
    verdict.tv = total_variation(verdict.conditional, verdict.boltzmann);
  }
  return verdict;
}

SuccessEstimate wilson_interval(std::uint64_t hits, std::uint64_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "success rate needs at least one run");
  SuccessEstimate est;
  est.hits = hits;
  est.n = n;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double z2 = kWilsonZ * kWilsonZ;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = kWilsonZ * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  est.fraction = p;
  est.lower = hits == 0 ? 0.0 : std::max(0.0, center - half);
  est.upper = hits == n ? 1.0 : std::min(1.0, center + half);
  return est;
}

SuccessEstimate success_probability(std::span<const GridPoint> outcomes, const GridPoint& target) {
  std::uint64_t hits = 0;
  for (const auto& o : outcomes) hits += (o == target) ? 1 : 0;
  return wilson_interval(hits, outcomes.size());
}

}  // namespace gsc
