#pragma once

// Grammatical Harmony H(y) = 1/2 y'Wy + b'y, quantization Harmony Q(y), and
// total Harmony H_q = H + qQ, with exact first and second derivatives.
// Vectors are flat in coefficient order (role * F + filler).

#include <Eigen/Dense>

#include "gsc/representation.hpp"

namespace gsc {

class HarmonyParams {
 public:
  // W is symmetrized as (W + W^T) / 2. Throws DimensionMismatch when W is not
  // square or b does not match.
  HarmonyParams(Eigen::MatrixXd weights, Eigen::VectorXd bias);

  static HarmonyParams zero(int dimension);

  int dimension() const { return static_cast<int>(bias_.size()); }
  const Eigen::MatrixXd& weights() const { return weights_; }
  const Eigen::VectorXd& bias() const { return bias_; }

  // Largest |W_ij - W_ji| of the matrix as given, before symmetrization.
  double input_asymmetry() const { return input_asymmetry_; }

  // Largest eigenvalue of W by shifted power iteration (tolerance 1e-8).
  double max_eigenvalue() const;

 private:
  Eigen::MatrixXd weights_;
  Eigen::VectorXd bias_;
  double input_asymmetry_ = 0.0;
};

double grammar_harmony(const HarmonyParams& params, const CoefficientState& y);
double quantization_harmony(const CoefficientState& y);
// Throws NegativeQ when q < 0.
double total_harmony(const HarmonyParams& params, double q, const CoefficientState& y);

Eigen::VectorXd grad_H(const HarmonyParams& params, const CoefficientState& y);
const Eigen::MatrixXd& hess_H(const HarmonyParams& params);

Eigen::VectorXd grad_Q(const CoefficientState& y);
Eigen::MatrixXd hess_Q(const CoefficientState& y);

Eigen::VectorXd grad_total(const HarmonyParams& params, double q, const CoefficientState& y);
Eigen::MatrixXd hess_total(const HarmonyParams& params, double q, const CoefficientState& y);

// Allocation-free gradient of H_q for the integrator. `y` and `out` are flat
// coefficient vectors of length fillers * roles; they must not alias.
void grad_total_into(const HarmonyParams& params, double q, int fillers,
                     const Eigen::Ref<const Eigen::VectorXd>& y, Eigen::Ref<Eigen::VectorXd> out);

}  // namespace gsc
