#pragma once

// Statistical verdicts over batches of final states: basin classification,
// empirical grid distributions, total variation, success rates.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gsc/harmony.hpp"
#include "gsc/representation.hpp"

namespace gsc {

inline constexpr double kDefaultEta = 0.25;

// Grid rank of the point whose eta-ball holds y, or nullopt if y lies outside
// every ball. Throws InvalidArgument for eta <= 0 and EtaTooLarge when balls
// of radius eta would overlap (eta >= sqrt(2)/2 with two or more fillers).
std::optional<std::uint64_t> classify_sample(const CoefficientState& y, const FillerRoleSpec& spec,
                                             double eta);

// 1/2 sum |p_i - q_i|. Throws LengthMismatch / NotNormalized (tolerance 1e-9).
double total_variation(std::span<const double> p, std::span<const double> q);

struct EmpiricalGridDistribution {
  std::vector<std::uint64_t> counts;  // per grid point, grid order
  std::uint64_t outside = 0;
  std::uint64_t total = 0;
  double eta = kDefaultEta;

  std::uint64_t inside() const { return total - outside; }
  // counts / inside(); empty when nothing landed inside a ball.
  std::vector<double> conditional() const;
};

struct SamplingVerdict {
  EmpiricalGridDistribution empirical;
  std::vector<double> conditional;
  std::vector<double> boltzmann;
  double tv = 1.0;  // 1 when no sample is inside a ball
  double outside_fraction = 0.0;
  std::uint64_t n = 0;
};

inline constexpr std::size_t kMinVerdictSamples = 100;

SamplingVerdict sampling_verdict(std::span<const CoefficientState> samples,
                                 const HarmonyParams& params, double temperature,
                                 const FillerRoleSpec& spec, double eta = kDefaultEta,
                                 std::uint64_t cap = kDefaultGridCap);

struct SuccessEstimate {
  std::uint64_t hits = 0;
  std::uint64_t n = 0;
  double fraction = 0.0;
  double lower = 0.0;  // Wilson score, 95%
  double upper = 0.0;
};

SuccessEstimate wilson_interval(std::uint64_t hits, std::uint64_t n);

SuccessEstimate success_probability(std::span<const GridPoint> outcomes, const GridPoint& target);

}  // namespace gsc
