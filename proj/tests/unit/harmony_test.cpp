#include <random>

#include <gtest/gtest.h>

#include "gsc/error.hpp"
#include "gsc/harmony.hpp"
#include "oracles.hpp"

namespace gsc {
namespace {

CoefficientState state(int F, int R, std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return {F, R, v};
}

TEST(GrammarHarmony, HandValues) {
  EXPECT_EQ(grammar_harmony(HarmonyParams::zero(2), state(2, 1, {0.3, -4})), 0.0);
  HarmonyParams identity(Eigen::Matrix2d::Identity(), Eigen::Vector2d::Zero());
  EXPECT_DOUBLE_EQ(grammar_harmony(identity, state(2, 1, {1, 0})), 0.5);
  HarmonyParams linear(Eigen::Matrix2d::Zero(), Eigen::Vector2d(1, 2));
  EXPECT_DOUBLE_EQ(grammar_harmony(linear, state(2, 1, {3, 4})), 11.0);
}

TEST(GrammarHarmony, AsymmetricWeightsAreSymmetrized) {
  Eigen::Matrix2d W;
  W << 0, 1, 0, 0;
  HarmonyParams p(W, Eigen::Vector2d::Zero());
  EXPECT_DOUBLE_EQ(p.input_asymmetry(), 1.0);
  EXPECT_EQ(p.weights(), p.weights().transpose());
  EXPECT_DOUBLE_EQ(p.weights()(0, 1), 0.5);
}

TEST(GrammarHarmony, DimensionChecks) {
  EXPECT_THROW(HarmonyParams(Eigen::MatrixXd::Zero(2, 3), Eigen::VectorXd::Zero(2)), Error);
  EXPECT_THROW(HarmonyParams(Eigen::MatrixXd::Zero(3, 3), Eigen::VectorXd::Zero(2)), Error);
}

TEST(GrammarHarmony, MaxEigenvalue) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd W = testing::random_symmetric(rng, 6, 1.0);
    HarmonyParams p(W, Eigen::VectorXd::Zero(6));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(W);
    EXPECT_NEAR(p.max_eigenvalue(), es.eigenvalues().maxCoeff(), 1e-6);
  }
}

TEST(QuantizationHarmony, HandValues) {
  EXPECT_DOUBLE_EQ(quantization_harmony(state(2, 1, {0, 0})), -0.5);
  EXPECT_DOUBLE_EQ(quantization_harmony(state(2, 1, {0.5, 0.5})), -0.1875);
  for (int F = 1; F <= 4; ++F) {
    for (int R = 1; R <= 4; ++R) {
      const auto spec = FillerRoleSpec::with_counts(F, R);
      for (const auto& p : enumerate_grid(spec)) EXPECT_EQ(quantization_harmony(embed(p, spec)), 0.0);
    }
  }
}

TEST(QuantizationHarmony, MatchesTermByTermOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const CoefficientState y(3, 2, testing::random_vector(rng, 6, -2, 2));
    EXPECT_NEAR(quantization_harmony(y), testing::naive_Q(y.flat(), 3, 2), 1e-12);
    EXPECT_LT(quantization_harmony(y), 0.0);
  }
}

TEST(TotalHarmony, Combination) {
  std::mt19937_64 rng(5);
  HarmonyParams p(testing::random_symmetric(rng, 4, 1), testing::random_vector(rng, 4, -1, 1));
  const CoefficientState y(2, 2, testing::random_vector(rng, 4, -1, 2));
  EXPECT_DOUBLE_EQ(total_harmony(p, 0.0, y), grammar_harmony(p, y));
  const auto grid_y = embed(GridPoint{{1, 0}}, FillerRoleSpec::with_counts(2, 2));
  EXPECT_DOUBLE_EQ(total_harmony(p, 37.0, grid_y), grammar_harmony(p, grid_y));
  EXPECT_NEAR(total_harmony(p, 2.0, y), grammar_harmony(p, y) + 2.0 * quantization_harmony(y), 1e-12);
  try {
    total_harmony(p, -1.0, y);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NegativeQ);
  }
}

TEST(Gradients, ZeroWeightsGiveBias) {
  HarmonyParams p(Eigen::Matrix2d::Zero(), Eigen::Vector2d(0.3, -0.7));
  EXPECT_EQ(grad_H(p, state(2, 1, {5, 9})), Eigen::Vector2d(0.3, -0.7));
}

TEST(Gradients, CriticalPointsOfQ) {
  EXPECT_EQ(grad_Q(state(2, 1, {0, 0})), Eigen::Vector2d::Zero());
  const auto spec = FillerRoleSpec::with_counts(3, 3);
  for (const auto& p : enumerate_grid(spec)) EXPECT_EQ(grad_Q(embed(p, spec)), Eigen::VectorXd::Zero(9));
}

TEST(Gradients, MatchFiniteDifferences) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> dim(1, 4);
  for (int trial = 0; trial < 100; ++trial) {
    const int F = dim(rng), R = dim(rng), n = F * R;
    const Eigen::MatrixXd W = testing::random_symmetric(rng, n, 2);
    const Eigen::VectorXd b = testing::random_vector(rng, n, -2, 2);
    HarmonyParams p(W, b);
    const CoefficientState y(F, R, testing::random_vector(rng, n, -2, 2));

    const auto fd_H = testing::fd_gradient([&](const Eigen::VectorXd& v) { return testing::naive_H(W, b, v); }, y.flat());
    const auto fd_Q = testing::fd_gradient([&](const Eigen::VectorXd& v) { return testing::naive_Q(v, F, R); }, y.flat());
    const auto fd_hQ = testing::fd_jacobian([&](const Eigen::VectorXd& v) { return grad_Q(CoefficientState(F, R, v)); }, y.flat());
    EXPECT_LE(testing::relative_error(grad_H(p, y), fd_H), 1e-6);
    EXPECT_LE(testing::relative_error(grad_Q(y), fd_Q), 1e-6);
    EXPECT_LE(testing::relative_error(hess_Q(y), fd_hQ), 1e-5);
    EXPECT_EQ(hess_H(p), W);
  }
}

TEST(Hessian, SymmetricAndBlockDiagonal) {
  std::mt19937_64 rng(23);
  const CoefficientState y(3, 3, testing::random_vector(rng, 9, -2, 2));
  const Eigen::MatrixXd hq = hess_Q(y);
  EXPECT_EQ(hq, hq.transpose());
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j)
      if (i / 3 != j / 3) EXPECT_EQ(hq(i, j), 0.0);
}

TEST(Hessian, DiagonalAtGridPoints) {
  const auto spec = FillerRoleSpec::with_counts(3, 2);
  for (const auto& p : enumerate_grid(spec)) {
    const auto x = embed(p, spec);
    const Eigen::MatrixXd hq = hess_Q(x);
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        EXPECT_EQ(hq(i, j), i != j ? 0.0 : (x.flat()[i] == 1.0 ? -5.0 : -1.0));
      }
    }
  }
}

TEST(TotalDerivatives, AreLinearCombinations) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    HarmonyParams p(testing::random_symmetric(rng, 6, 1), testing::random_vector(rng, 6, -1, 1));
    const CoefficientState y(2, 3, testing::random_vector(rng, 6, -2, 2));
    const double q = std::uniform_real_distribution<double>(0, 100)(rng);
    EXPECT_LE((grad_total(p, q, y) - (grad_H(p, y) + q * grad_Q(y))).cwiseAbs().maxCoeff(), 1e-12 * (1 + q));
    EXPECT_LE((hess_total(p, q, y) - (p.weights() + q * hess_Q(y))).cwiseAbs().maxCoeff(), 1e-12 * (1 + q));
    EXPECT_EQ(grad_total(p, 0, y), grad_H(p, y));

    Eigen::VectorXd out(6);
    grad_total_into(p, q, 2, y.flat(), out);
    EXPECT_LE((out - grad_total(p, q, y)).cwiseAbs().maxCoeff(), 1e-12 * (1 + q));
  }
  const auto spec = FillerRoleSpec::with_counts(2, 2);
  EXPECT_EQ(grad_total(HarmonyParams::zero(4), 50, embed(GridPoint{{0, 1}}, spec)), Eigen::VectorXd::Zero(4));
}

}  // namespace
}  // namespace gsc
