#include <benchmark/benchmark.h>

#include <random>

#include "perhf/energy.hpp"
#include "perhf/kernels.hpp"
#include "perhf/meanfield.hpp"
#include "perhf/scf.hpp"
#include "perhf/verify.hpp"

using namespace perhf;

namespace {

Model bench_model(int ngrid) {
  Model m;
  m.h = compute_h().h;
  m.v0 = singular_average(ngrid).v0;
  return m;
}

PeriodicState bench_state(int ngrid, double ecut) {
  std::mt19937_64 rng(7);
  return random_admissible_state(ngrid, build_bases(build_kgrid(ngrid), ecut), 1.0, rng);
}

void BM_AssembleFock(benchmark::State &st) {
  const int n = int(st.range(0));
  const Model m = bench_model(n);
  const auto g = bench_state(n, 25.0);
  for (auto _ : st)
    benchmark::DoNotOptimize(assemble_fock(g, m));
}
BENCHMARK(BM_AssembleFock)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_ExchangeEnergy(benchmark::State &st) {
  const int n = int(st.range(0));
  const Model m = bench_model(n);
  const auto g = bench_state(n, 25.0);
  for (auto _ : st)
    benchmark::DoNotOptimize(exchange_energy(g, g, m.v0));
}
BENCHMARK(BM_ExchangeEnergy)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_GreenSeries(benchmark::State &st) {
  const int r = int(st.range(0));
  for (auto _ : st)
    benchmark::DoNotOptimize(green_series(Vec3(0.5, 0.5, 0.5), r));
}
BENCHMARK(BM_GreenSeries)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Scf(benchmark::State &st) {
  ScfConfig c;
  c.ngrid = int(st.range(0));
  c.ecut = 2 * pi * pi + 0.1;
  const Model m = make_model(c);
  for (auto _ : st)
    benchmark::DoNotOptimize(run_scf(c, m));
}
BENCHMARK(BM_Scf)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
