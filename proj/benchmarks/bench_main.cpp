#include <benchmark/benchmark.h>

#include "hdbell/binarise.hpp"
#include "hdbell/dim_bound.hpp"
#include "hdbell/lhv.hpp"
#include "hdbell/seesaw.hpp"
#include "hdbell/stats.hpp"

using namespace hdbell;

namespace {

void BM_HermitianEig(benchmark::State& state) {
  const int n = int(state.range(0));
  Rng rng(1);
  CMatrix m = CMatrix::Random(n, n);
  m = (m + m.adjoint()).eval();
  for (auto _ : state) benchmark::DoNotOptimize(hermitian_eig(m));
}
BENCHMARK(BM_HermitianEig)->Arg(16)->Arg(64);

void BM_BornBehavior(benchmark::State& state) {
  const QuantumModel m = cglmp_reference_model(int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(born_behavior(m));
}
BENCHMARK(BM_BornBehavior)->Arg(4)->Arg(6);

void BM_LhvEnumeration(benchmark::State& state) {
  const BellFunctional f = cglmp_functional(int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(lhv_bound(f));
}
BENCHMARK(BM_LhvEnumeration)->Arg(4)->Arg(6);

void BM_LocalityLpBinarised(benchmark::State& state) {
  const Behavior p = binarise_behavior(born_behavior(cglmp_reference_model(4)));
  LocalityOptions o = binarised_locality_options();
  o.noise = binarised_white_noise(Scenario::multi_outcome(4));
  for (auto _ : state) benchmark::DoNotOptimize(locality_lp(p, o));
  state.SetLabel("d=4");
}
BENCHMARK(BM_LocalityLpBinarised)->Unit(benchmark::kMillisecond);

void BM_SeesawCglmp4(benchmark::State& state) {
  SeesawConfig c;
  c.dimension = 4;
  c.restarts = int(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(seesaw(cglmp_functional(4), c));
}
BENCHMARK(BM_SeesawCglmp4)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_DimBoundProfile(benchmark::State& state) {
  const BellFunctional f = cglmp_functional(4);
  const MonomialList m = build_monomials(f.scenario, MonomialLevel::OneAB);
  const RankProfile p = enumerate_rank_profiles(4, int(state.range(0)))[5];
  DimBoundOptions o;
  for (auto _ : state) {
    Rng rng(0);
    benchmark::DoNotOptimize(profile_bound(f, p, int(state.range(0)), m, o, rng));
  }
}
BENCHMARK(BM_DimBoundProfile)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_PoissonMonteCarlo(benchmark::State& state) {
  const CountTable t = load_counts(std::string(HDBELL_DATA_DIR) + "/table4.csv");
  MonteCarloOptions o;
  o.trials = int(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(poisson_mc_error(t, cglmp_functional(4), o));
}
BENCHMARK(BM_PoissonMonteCarlo)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
