// Parallel kernels against their serial references on the simulation design.

#include <benchmark/benchmark.h>

#include "hette/continuous_test.hpp"
#include "hette/discrete_test.hpp"
#include "hette/grid.hpp"
#include "hette/montecarlo.hpp"
#include "hette/reference.hpp"

using namespace hette;

namespace {

struct DiscreteSetup {
  Sample s;
  LateFit late;
  InfluenceTableD table;
  explicit DiscreteSetup(std::size_t n)
      : s(simulate({0.75, 0.7, 0.5, n, CovariateKind::Discrete, 1})),
        late(late_discrete(s)),
        table(influence_discrete(s, late, quantile_grid(late.w_hat, n / 10), gaussian(), 0.3)) {}
};

struct ContinuousSetup {
  Sample s;
  double h;
  LateFit late;
  std::vector<double> gw, gx;
  explicit ContinuousSetup(std::size_t n)
      : s(simulate({0.75, 0.7, 0.5, n, CovariateKind::Continuous, 1})),
        h(bandwidth(BandwidthRule::monte_carlo(), 1.0, s.covariate, n)),
        late(late_continuous(s, h, gaussian())),
        gw(quantile_grid(late.w_hat, n / 20)),
        gx(quantile_grid(s.covariate, n / 20)) {}
};

constexpr int kDraws = 20;

void BM_DiscreteBootstrapFast(benchmark::State& st) {
  const DiscreteSetup d(static_cast<std::size_t>(st.range(0)));
  TestConfig c;
  c.n_bootstrap = kDraws;
  for (auto _ : st) benchmark::DoNotOptimize(bootstrap_discrete(d.table, c, 0.0));
}

void BM_DiscreteBootstrapDense(benchmark::State& st) {
  const DiscreteSetup d(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    const auto dense = reference::dense_influence(d.table);
    benchmark::DoNotOptimize(reference::dense_bootstrap(dense, kDraws, MultiplierKind::Rademacher, 0));
  }
}

void BM_ContinuousBootstrapFast(benchmark::State& st) {
  const ContinuousSetup d(static_cast<std::size_t>(st.range(0)));
  InfluenceOptions o;
  o.keep_components = false;
  TestConfig c;
  c.n_bootstrap = kDraws;
  for (auto _ : st) {
    const auto t = influence_continuous(d.s, d.late, d.gw, d.gx, gaussian(), d.h, o);
    benchmark::DoNotOptimize(bootstrap_continuous(t, c, 0.0));
  }
}

void BM_ContinuousBootstrapDense(benchmark::State& st) {
  const ContinuousSetup d(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    const auto dense = reference::dense_projection_direct(d.s, d.late, d.gw, d.gx, gaussian(), d.h);
    benchmark::DoNotOptimize(reference::dense_bootstrap(dense, kDraws, MultiplierKind::Rademacher, 0));
  }
}

void BM_GHatFast(benchmark::State& st) {
  const ContinuousSetup d(static_cast<std::size_t>(st.range(0)));
  const auto f = joint_density_at_sample(kernel_sums_at_sample(d.s, d.h, gaussian(), true), d.s.size(), d.h);
  for (auto _ : st) benchmark::DoNotOptimize(g_hat(d.s, d.late, f, d.gw, d.gx));
}

void BM_GHatDirect(benchmark::State& st) {
  const ContinuousSetup d(static_cast<std::size_t>(st.range(0)));
  const auto f = joint_density_at_sample(kernel_sums_at_sample(d.s, d.h, gaussian(), true), d.s.size(), d.h);
  for (auto _ : st) benchmark::DoNotOptimize(reference::g_hat_direct(d.s, d.late, f, d.gw, d.gx));
}

void BM_KernelSumsFast(benchmark::State& st) {
  const ContinuousSetup d(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernel_sums(d.s, d.s.covariate, d.h, gaussian()));
}

void BM_KernelSumsSerial(benchmark::State& st) {
  const ContinuousSetup d(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(reference::kernel_sums_serial(d.s, d.s.covariate, d.h, gaussian()));
}

}  // namespace

BENCHMARK(BM_DiscreteBootstrapFast)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DiscreteBootstrapDense)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ContinuousBootstrapFast)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ContinuousBootstrapDense)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GHatFast)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GHatDirect)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KernelSumsFast)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KernelSumsSerial)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
