#include "gsc/harmony.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "gsc/error.hpp"

namespace gsc {
namespace {

void check_dimension(const HarmonyParams& params, const CoefficientState& y) {
  if (params.dimension() != y.dimension()) {
    std::ostringstream msg;
    msg << "state has " << y.dimension() << " coefficients, Harmony parameters expect "
        << params.dimension();
    throw Error(ErrorKind::DimensionMismatch, msg.str());
  }
}

void check_q(double q) {
  if (!(q >= 0.0)) {
    throw Error(ErrorKind::NegativeQ, "discreteness q must be >= 0, got " + std::to_string(q));
  }
}

// Adds the Q gradient scaled by `scale` into `out`.
void add_grad_Q(int fillers, const Eigen::Ref<const Eigen::VectorXd>& y, double scale,
                Eigen::Ref<Eigen::VectorXd> out) {
  const Eigen::Index roles = y.size() / fillers;
  for (Eigen::Index r = 0; r < roles; ++r) {
    const Eigen::Index base = r * fillers;
    double norm_excess = -1.0;
    for (int f = 0; f < fillers; ++f) norm_excess += y[base + f] * y[base + f];
    for (int f = 0; f < fillers; ++f) {
      const double v = y[base + f];
      out[base + f] += scale * (-2.0 * v * norm_excess - v * (1.0 - v) * (1.0 - 2.0 * v));
    }
  }
}

}  // namespace

HarmonyParams::HarmonyParams(Eigen::MatrixXd weights, Eigen::VectorXd bias)
    : weights_(std::move(weights)), bias_(std::move(bias)) {
  if (weights_.rows() != weights_.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "W must be square");
  }
  if (weights_.rows() != bias_.size()) {
    std::ostringstream msg;
    msg << "W is " << weights_.rows() << "x" << weights_.cols() << " but b has length "
        << bias_.size();
    throw Error(ErrorKind::DimensionMismatch, msg.str());
  }
  if (weights_.size() > 0) {
    input_asymmetry_ = (weights_ - weights_.transpose()).cwiseAbs().maxCoeff();
  }
  weights_ = (0.5 * (weights_ + weights_.transpose())).eval();
}

HarmonyParams HarmonyParams::zero(int dimension) {
  return HarmonyParams(Eigen::MatrixXd::Zero(dimension, dimension),
                       Eigen::VectorXd::Zero(dimension));
}

double HarmonyParams::max_eigenvalue() const {
  const Eigen::Index n = weights_.rows();
  if (n == 0) return 0.0;
  // Gershgorin shift makes W + sI positive semidefinite, so its dominant
  // eigenvalue is w_max + s.
  const double shift = weights_.cwiseAbs().rowwise().sum().maxCoeff();
  if (shift == 0.0) return 0.0;
  const Eigen::MatrixXd shifted = weights_ + shift * Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(n, 1.0, 2.0).normalized();
  double lambda = v.dot(shifted * v);
  for (int iter = 0; iter < 100000; ++iter) {
    Eigen::VectorXd next = shifted * v;
    const double norm = next.norm();
    if (norm == 0.0) break;
    v = next / norm;
    const double updated = v.dot(shifted * v);
    if (std::abs(updated - lambda) <= 1e-8 * std::max(1.0, std::abs(updated))) {
      lambda = updated;
      break;
    }
    lambda = updated;
  }
  return lambda - shift;
}

double grammar_harmony(const HarmonyParams& params, const CoefficientState& y) {
  check_dimension(params, y);
  const auto& v = y.flat();
  return 0.5 * v.dot(params.weights() * v) + params.bias().dot(v);
}

double quantization_harmony(const CoefficientState& y) {
  double brace = 0.0;
  for (int r = 0; r < y.role_count(); ++r) {
    double norm_excess = -1.0;
    double binary = 0.0;
    for (int f = 0; f < y.filler_count(); ++f) {
      const double v = y(f, r);
      norm_excess += v * v;
      binary += v * v * (1.0 - v) * (1.0 - v);
    }
    brace += norm_excess * norm_excess + binary;
  }
  return -0.5 * brace;
}

double total_harmony(const HarmonyParams& params, double q, const CoefficientState& y) {
  check_q(q);
  return grammar_harmony(params, y) + q * quantization_harmony(y);
}

Eigen::VectorXd grad_H(const HarmonyParams& params, const CoefficientState& y) {
  check_dimension(params, y);
  return params.weights() * y.flat() + params.bias();
}

const Eigen::MatrixXd& hess_H(const HarmonyParams& params) { return params.weights(); }

Eigen::VectorXd grad_Q(const CoefficientState& y) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(y.dimension());
  if (y.dimension() > 0) add_grad_Q(y.filler_count(), y.flat(), 1.0, out);
  return out;
}

Eigen::MatrixXd hess_Q(const CoefficientState& y) {
  const int fillers = y.filler_count();
  const int n = y.dimension();
  Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(n, n);
  for (int r = 0; r < y.role_count(); ++r) {
    double norm_excess = -1.0;
    for (int f = 0; f < fillers; ++f) norm_excess += y(f, r) * y(f, r);
    for (int f = 0; f < fillers; ++f) {
      for (int g = 0; g < fillers; ++g) {
        double entry = 4.0 * y(f, r) * y(g, r);
        if (f == g) {
          const double v = y(f, r);
          entry += 2.0 * norm_excess + 1.0 - 6.0 * v * (1.0 - v);
        }
        hess(r * fillers + g, r * fillers + f) = -entry;
      }
    }
  }
  return hess;
}

Eigen::VectorXd grad_total(const HarmonyParams& params, double q, const CoefficientState& y) {
  check_q(q);
  check_dimension(params, y);
  Eigen::VectorXd out(y.dimension());
  grad_total_into(params, q, y.filler_count(), y.flat(), out);
  return out;
}

Eigen::MatrixXd hess_total(const HarmonyParams& params, double q, const CoefficientState& y) {
  check_q(q);
  check_dimension(params, y);
  return params.weights() + q * hess_Q(y);
}

void grad_total_into(const HarmonyParams& params, double q, int fillers,
                     const Eigen::Ref<const Eigen::VectorXd>& y, Eigen::Ref<Eigen::VectorXd> out) {
  out.noalias() = params.weights() * y;
  out += params.bias();
  if (q != 0.0) add_grad_Q(fillers, y, q, out);
}

}  // namespace gsc
