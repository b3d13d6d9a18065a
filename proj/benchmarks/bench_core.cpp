#include <benchmark/benchmark.h>

#include <random>

#include "trapwave/bands.hpp"
#include "trapwave/floquet.hpp"
#include "trapwave/strip.hpp"

using namespace trapwave;

namespace {

CellSpec ref1_cell() { return CellSpec{1.0, 1.0, Hole{-0.5, 0.5, -0.5, 0.5}}; }
StripSpec ref2_strip() { return StripSpec{ref1_cell(), 2, 6}; }

// Strip operator at h = 1/8, 1/16, 1/32.
HermitianOperator strip_at(int refine, double zeta) {
  const GridSpec grid{0.25 / refine};
  return assemble(build_strip_mask(ref2_strip(), grid), {zeta, 0.0});
}

}  // namespace

static void BM_Assemble(benchmark::State& state) {
  const DomainMask m = build_strip_mask(ref2_strip(), GridSpec{0.25 / state.range(0)});
  for (auto _ : state) benchmark::DoNotOptimize(assemble(m, {0.4, 0.0}));
  state.counters["unknowns"] = m.active_count();
}
BENCHMARK(BM_Assemble)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMicrosecond);

static void BM_Matvec(benchmark::State& state) {
  const HermitianOperator a = strip_at(static_cast<int>(state.range(0)), 0.4);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-1, 1);
  std::vector<Complex> x(a.dimension()), y(a.dimension());
  for (auto& z : x) z = {d(rng), d(rng)};
  for (auto _ : state) {
    a.apply(x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * a.dimension());
}
BENCHMARK(BM_Matvec)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMicrosecond);

static void BM_SmallestEigenpairs(benchmark::State& state) {
  const HermitianOperator a = strip_at(static_cast<int>(state.range(0)), 0.4);
  for (auto _ : state) benchmark::DoNotOptimize(smallest_eigenpairs(a, 2));
  state.counters["unknowns"] = a.dimension();
}
BENCHMARK(BM_SmallestEigenpairs)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_BandSweep(benchmark::State& state) {
  BandSweepOptions o;
  o.samples1 = o.samples2 = 9;
  o.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cell_band_structure(ref1_cell(), GridSpec{0.125}, o));
}
BENCHMARK(BM_BandSweep)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

static void BM_JordanChain(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(jordan_chain(ref2_strip(), GridSpec{0.125}));
}
BENCHMARK(BM_JordanChain)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
