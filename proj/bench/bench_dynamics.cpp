// Parallel batch evolution against the serial reference, and the integrating
// factor stepper against plain RK4.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "qrc/dynamics.hpp"

using namespace qrc;

namespace {

std::vector<PulseSchedule> two_pulse_schedules(int n) {
  std::vector<PulseSchedule> out;
  for (int i = 0; i < n; ++i) {
    const double prev = 1.0 + 9.4 * (i % 8) / 7.0;
    const double cur = 1.0 + 9.4 * ((i * 3) % 8) / 7.0;
    out.push_back({{{0.2, prev}, {0.2, cur}}, {0.25, 0.3, 0.35, 0.4}});
  }
  return out;
}

PhysicalConfig bench_config(bool joint) {
  PhysicalConfig cfg;
  cfg.include_qubit = joint;
  cfg.n_fock = joint ? 20 : 25;
  if (joint) cfg.delta_c = ground_resonant_delta_c(cfg);
  return cfg;
}

void BM_BatchParallel(benchmark::State& state) {
  const auto cfg = bench_config(state.range(1) != 0);
  const auto schedules = two_pulse_schedules(static_cast<int>(state.range(0)));
  const auto rho0 = DensityMatrix::vacuum(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(evolve_batch(rho0, cfg, schedules));
  state.counters["threads"] = omp_get_max_threads();
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BatchSerial(benchmark::State& state) {
  const auto cfg = bench_config(state.range(1) != 0);
  const auto schedules = two_pulse_schedules(static_cast<int>(state.range(0)));
  const auto rho0 = DensityMatrix::vacuum(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(evolve_batch_serial(rho0, cfg, schedules));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EvolveIntegratingFactor(benchmark::State& state) {
  PhysicalConfig cfg;
  cfg.n_fock = static_cast<int>(state.range(0));
  cfg.k_cc = mhz_to_rad_per_us(-0.1);
  const PulseSchedule s{{{0.2, 3.0}, {0.2, 1.0}}, {0.4}};
  for (auto _ : state) benchmark::DoNotOptimize(evolve(DensityMatrix::vacuum(cfg), cfg, s));
}

void BM_EvolveReferenceRK4(benchmark::State& state) {
  PhysicalConfig cfg;
  cfg.n_fock = static_cast<int>(state.range(0));
  cfg.k_cc = mhz_to_rad_per_us(-0.1);
  const PulseSchedule s{{{0.2, 3.0}, {0.2, 1.0}}, {0.4}};
  for (auto _ : state) benchmark::DoNotOptimize(evolve_reference(DensityMatrix::vacuum(cfg), cfg, s));
}

}  // namespace

BENCHMARK(BM_BatchParallel)->Args({16, 0})->Args({16, 1})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BatchSerial)->Args({16, 0})->Args({16, 1})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EvolveIntegratingFactor)->Arg(10)->Arg(25)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvolveReferenceRK4)->Arg(10)->Arg(25)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
