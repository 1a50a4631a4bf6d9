#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "gsc/dynamics.hpp"
#include "gsc/error.hpp"
#include "oracles.hpp"

namespace gsc {
namespace {

TEST(EulerStep, FixedPointWithoutNoise) {
  const auto spec = FillerRoleSpec::with_counts(2, 2);
  const auto x = embed(GridPoint{{1, 0}}, spec);
  const auto next = euler_maruyama_step(x, HarmonyParams::zero(4), 30, 0, 1e-2, Eigen::VectorXd::Zero(4));
  EXPECT_EQ(next, x);
}

TEST(EulerStep, DeterministicLimitIsGradientAscent) {
  std::mt19937_64 rng(1);
  HarmonyParams p(testing::random_symmetric(rng, 6, 1), testing::random_vector(rng, 6, -1, 1));
  const CoefficientState y(3, 2, testing::random_vector(rng, 6, -1, 2));
  const double q = 7, dt = 1e-3;
  const Eigen::VectorXd g = p.weights() * y.flat() + p.bias() + q * grad_Q(y);
  const auto next = euler_maruyama_step(y, p, q, 0, dt, Eigen::VectorXd::Zero(6));
  EXPECT_LE((next.flat() - (y.flat() + g * dt)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(EulerStep, NoiseScale) {
  const CoefficientState y(1, 1, Eigen::VectorXd::Zero(1));
  const auto next = euler_maruyama_step(y, HarmonyParams::zero(1), 0, 2.0, 0.01, Eigen::VectorXd::Ones(1));
  EXPECT_NEAR(next.flat()[0], std::sqrt(2 * 2.0 * 0.01), 1e-15);
}

TEST(EulerStep, NonFiniteThrows) {
  const CoefficientState y(1, 1, Eigen::VectorXd::Constant(1, 1e200));
  try {
    euler_maruyama_step(y, HarmonyParams(Eigen::MatrixXd::Constant(1, 1, 1e200), Eigen::VectorXd::Zero(1)), 0, 0, 1,
                        Eigen::VectorXd::Zero(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonFiniteState);
  }
}

TEST(StepCount, Validates) {
  SdeConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 1.0;
  EXPECT_EQ(step_count(cfg), 1000u);
  cfg.dt = 0;
  EXPECT_THROW(step_count(cfg), Error);
  cfg.dt = 1;
  cfg.t_end = 0.5;
  EXPECT_THROW(step_count(cfg), Error);
}

TEST(Trajectory, SingleStepFromStart) {
  const auto spec = FillerRoleSpec::with_counts(2, 1);
  HarmonyParams p(Eigen::Matrix2d::Zero(), Eigen::Vector2d(0.4, 0.1));
  SdeConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 0.01;
  const auto r = run_trajectory(cfg, Schedule::constant(3, 0), p, spec);
  const auto expected = euler_maruyama_step(barycenter(spec), p, 3, 0, 0.01, Eigen::VectorXd::Zero(2));
  EXPECT_EQ(r.final_state, expected);
  EXPECT_EQ(r.diagnostics.steps_taken, 1u);
}

TEST(Trajectory, RecordingStride) {
  const auto spec = FillerRoleSpec::with_counts(2, 1);
  SdeConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 1.05;
  cfg.record_stride = 10;
  const auto r = run_trajectory(cfg, Schedule::constant(1, 0.1), HarmonyParams::zero(2), spec);
  ASSERT_EQ(r.trajectory.times.size(), r.trajectory.states.size());
  EXPECT_EQ(r.trajectory.times.front(), 0.0);
  EXPECT_EQ(r.trajectory.states.back(), r.final_state);
  for (std::size_t i = 1; i < r.trajectory.times.size(); ++i) EXPECT_GT(r.trajectory.times[i], r.trajectory.times[i - 1]);
  EXPECT_EQ(r.trajectory.times.size(), 12u);
}

TEST(Trajectory, SameSeedSameBits) {
  const auto spec = FillerRoleSpec::with_counts(2, 2);
  std::mt19937_64 rng(9);
  HarmonyParams p(testing::random_symmetric(rng, 4, 1), testing::random_vector(rng, 4, -1, 1));
  SdeConfig cfg;
  cfg.t_end = 2;
  cfg.seed = 1234;
  cfg.init = GaussianInit{0.2};
  cfg.record_stride = 50;
  const auto sched = Schedule::log_cooling(10, 1.0);
  const auto a = run_trajectory(cfg, sched, p, spec, 3);
  const auto b = run_trajectory(cfg, sched, p, spec, 3);
  EXPECT_EQ(a.trajectory.states, b.trajectory.states);
  const auto c = run_trajectory(cfg, sched, p, spec, 4);
  EXPECT_NE(a.final_state, c.final_state);

  const auto serial = run_batch(cfg, sched, p, spec, 6, 1);
  const auto parallel = run_batch(cfg, sched, p, spec, 6, 3);
  ASSERT_EQ(serial.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(serial[i].diagnostics.trajectory_index, i);
    EXPECT_EQ(serial[i].final_state, parallel[i].final_state);
  }
  EXPECT_EQ(serial[3].final_state, a.final_state);
}

TEST(Trajectory, NoiseVarianceMatchesTwoTdt) {
  const auto spec = FillerRoleSpec::with_counts(1, 1);
  SdeConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 1e-3;
  cfg.seed = 99;
  cfg.init = GivenInit{CoefficientState(1, 1, Eigen::VectorXd::Zero(1))};
  const double T = 0.7;
  const auto runs = run_batch(cfg, Schedule::constant(0, T), HarmonyParams::zero(1), spec, 100000, 1);
  double sum = 0, sum2 = 0;
  for (const auto& r : runs) {
    sum += r.final_state.flat()[0];
    sum2 += r.final_state.flat()[0] * r.final_state.flat()[0];
  }
  const double n = static_cast<double>(runs.size());
  const double var = sum2 / n - (sum / n) * (sum / n);
  EXPECT_NEAR(var / (2 * T * cfg.dt), 1.0, 0.03);
}

TEST(Trajectory, MonotoneAscentWithoutNoise) {
  std::mt19937_64 rng(21);
  for (int inst = 0; inst < 5; ++inst) {
    const auto spec = FillerRoleSpec::with_counts(2, 2);
    HarmonyParams p(testing::random_symmetric(rng, 4, 1), testing::random_vector(rng, 4, -1, 1));
    const double q = 5, dt = 1e-3;
    CoefficientState y(2, 2, testing::random_vector(rng, 4, -0.5, 1.5));
    for (int k = 0; k < 3000; ++k) {
      const double g2 = grad_total(p, q, y).squaredNorm();
      const auto next = euler_maruyama_step(y, p, q, 0, dt, Eigen::VectorXd::Zero(4));
      const double before = total_harmony(p, q, y);
      EXPECT_GE(total_harmony(p, q, next), before - 10 * dt * dt * g2 - 1e-14 * (1 + std::abs(before)));
      y = next;
    }
  }
}

TEST(Trajectory, BlowUpIsReportedNotThrown) {
  const auto spec = FillerRoleSpec::with_counts(1, 1);
  HarmonyParams p(Eigen::MatrixXd::Constant(1, 1, 1000), Eigen::VectorXd::Zero(1));
  SdeConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 2;
  cfg.init = GivenInit{CoefficientState(1, 1, Eigen::VectorXd::Ones(1))};
  const auto r = run_trajectory(cfg, Schedule::constant(0, 0), p, spec, 7);
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(r.final_state.all_finite());
  EXPECT_GT(r.diagnostics.failure->step, 0u);
  EXPECT_LT(r.diagnostics.steps_taken, 2000u);
  EXPECT_EQ(r.diagnostics.trajectory_index, 7u);
}

TEST(InitialState, Variants) {
  const auto spec = FillerRoleSpec::with_counts(2, 2);
  auto rng = make_stream(1, 0);
  SdeConfig cfg;
  EXPECT_EQ(initial_state(cfg, spec, rng), barycenter(spec));
  cfg.init = GivenInit{embed(GridPoint{{0, 1}}, spec)};
  EXPECT_EQ(initial_state(cfg, spec, rng), embed(GridPoint{{0, 1}}, spec));
  cfg.init = GaussianInit{0.1};
  const auto g = initial_state(cfg, spec, rng);
  EXPECT_NE(g, barycenter(spec));
  EXPECT_LT((g.flat() - barycenter(spec).flat()).cwiseAbs().maxCoeff(), 1.0);
  cfg.init = GivenInit{CoefficientState(3, 1)};
  EXPECT_THROW(initial_state(cfg, spec, rng), Error);
}

// Long constant-(q, T) runs on one role with two fillers: the histogram of
// y_1 should match the marginal of exp(H_q / T) computed by quadrature.
TEST(Equilibrium, MarginalMatchesQuadrature) {
  const auto spec = FillerRoleSpec::with_counts(2, 1);
  HarmonyParams p(Eigen::Matrix2d::Zero(), Eigen::Vector2d(0.3, 0.0));
  const double q = 4, T = 0.5;
  const double lo = -1.0, hi = 2.0;
  const int bins = 30;

  std::vector<double> reference(bins, 0.0);
  const int fine = 600;
  const double h = (hi - lo) / fine;
  for (int i = 0; i < fine; ++i) {
    const double a = lo + (i + 0.5) * h;
    double mass = 0;
    for (int j = 0; j < fine; ++j) {
      const double b = lo + (j + 0.5) * h;
      const CoefficientState y(2, 1, Eigen::Vector2d(a, b));
      mass += std::exp(total_harmony(p, q, y) / T);
    }
    reference[i * bins / fine] += mass;
  }
  double z = 0;
  for (double m : reference) z += m;
  for (double& m : reference) m /= z;

  SdeConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 200;
  cfg.record_stride = 20;
  double tv_sum = 0;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    cfg.seed = 1000 + s;
    const auto r = run_trajectory(cfg, Schedule::constant(q, T), p, spec);
    std::vector<double> hist(bins, 0.0);
    double count = 0;
    for (std::size_t k = 0; k < r.trajectory.times.size(); ++k) {
      if (r.trajectory.times[k] < 5) continue;
      const double a = r.trajectory.states[k].flat()[0];
      const int bin = static_cast<int>(std::floor((a - lo) / (hi - lo) * bins));
      count += 1;
      if (bin >= 0 && bin < bins) hist[bin] += 1;
    }
    double tv = 0;
    for (int b = 0; b < bins; ++b) tv += std::abs(hist[b] / count - reference[b]);
    tv_sum += tv / 2;
  }
  EXPECT_LE(tv_sum / seeds, 0.08);
}

}  // namespace
}  // namespace gsc
