#include <benchmark/benchmark.h>

#include "mimcav/etalon_steady.hpp"
#include "mimcav/homodyne.hpp"
#include "mimcav/mechanics.hpp"

using namespace mimcav;

namespace {

SweepSpec make_spec(int dl_points, int freq_points) {
  constexpr double lambda = 532e-9;
  SweepSpec spec;
  spec.c1 = slab_coefficients({IndexModel::si3n4_calibrated()(lambda), 75.2e-9}, lambda);
  spec.c2 = spec.c1;
  spec.resonant_length_m = resonant_length(spec.c1, spec.c2, lambda, 5.707e-6);
  spec.wavelength_m = lambda;
  const MembranePlate p1{0.9774e-3, 0.9759e-3, 1e9, 3100.0};
  const MembranePlate p2{0.9756e-3, 0.9773e-3, 1e9, 3100.0};
  const double f1 = mode_frequency(p1, 1, 1);
  const double f2 = mode_frequency(p2, 1, 1);
  spec.mode1 = MechMode::from_frequency(f1, 1e4, default_effective_mass(p1, 75.2e-9), 0.1, 1e-12);
  spec.mode2 = MechMode::from_frequency(f2, 1e4, default_effective_mass(p2, 75.2e-9), 1.0, 1e-12);
  for (int i = 0; i < dl_points; ++i) spec.dl_grid.push_back(2.0 * i / (dl_points - 1));
  for (int i = 0; i < freq_points; ++i) spec.freq_grid.push_back(f1 - 500.0 + 1100.0 * i / (freq_points - 1));
  return spec;
}

void BM_SweepMapSerial(benchmark::State& state) {
  const auto spec = make_spec(static_cast<int>(state.range(0)), 1201);
  for (auto _ : state) benchmark::DoNotOptimize(sweep_map_serial(spec));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 1201);
}

void BM_SweepMapParallel(benchmark::State& state) {
  const auto spec = make_spec(static_cast<int>(state.range(0)), 1201);
  const int workers = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(sweep_map(spec, workers));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 1201);
}

}  // namespace

BENCHMARK(BM_SweepMapSerial)->Arg(121)->Arg(481)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepMapParallel)
    ->ArgsProduct({{121, 481}, {1, 2, 4, 8}})
    ->ArgNames({"rows", "workers"})
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
