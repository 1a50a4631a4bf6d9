#include <random>

#include <benchmark/benchmark.h>

#include "gsc/dynamics.hpp"
#include "gsc/harmony.hpp"
#include "gsc/oracle.hpp"

namespace {

gsc::HarmonyParams params_for(int n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  Eigen::MatrixXd W(n, n);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    b[i] = u(rng);
    for (int j = 0; j <= i; ++j) W(i, j) = W(j, i) = u(rng);
  }
  return {W, b};
}

void BM_GradTotal(benchmark::State& state) {
  const int F = static_cast<int>(state.range(0));
  const auto p = params_for(F * F);
  const auto y = gsc::barycenter(gsc::FillerRoleSpec::with_counts(F, F));
  Eigen::VectorXd out(F * F);
  for (auto _ : state) {
    gsc::grad_total_into(p, 10.0, F, y.flat(), out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_GradTotal)->Arg(2)->Arg(4)->Arg(8);

void BM_HessQ(benchmark::State& state) {
  const int F = static_cast<int>(state.range(0));
  const auto y = gsc::barycenter(gsc::FillerRoleSpec::with_counts(F, F));
  for (auto _ : state) benchmark::DoNotOptimize(gsc::hess_Q(y));
}
BENCHMARK(BM_HessQ)->Arg(2)->Arg(4)->Arg(8);

// Cost per integrator step, including noise generation.
void BM_Trajectory(benchmark::State& state) {
  const int F = static_cast<int>(state.range(0));
  const auto spec = gsc::FillerRoleSpec::with_counts(F, 2);
  const auto p = params_for(spec.dimension());
  gsc::SdeConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 10;
  const auto sched = gsc::Schedule::constant(50, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(gsc::run_trajectory(cfg, sched, p, spec));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_Trajectory)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_BruteForce(benchmark::State& state) {
  const int R = static_cast<int>(state.range(0));
  const auto spec = gsc::FillerRoleSpec::with_counts(3, R);
  const auto p = params_for(spec.dimension());
  for (auto _ : state) benchmark::DoNotOptimize(gsc::brute_force_optimum(p, spec));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BruteForce)->DenseRange(4, 8, 2)->Unit(benchmark::kMillisecond);

void BM_Refine(benchmark::State& state) {
  const auto spec = gsc::FillerRoleSpec::with_counts(3, 3);
  const auto p = params_for(spec.dimension());
  const auto opt = gsc::brute_force_optimum(p, spec);
  for (auto _ : state) benchmark::DoNotOptimize(gsc::refine_local_maximum(p, 50.0, opt.point, spec));
}
BENCHMARK(BM_Refine);

}  // namespace
BENCHMARK_MAIN();
