#include <benchmark/benchmark.h>

#include "mmwnc/channel.hpp"
#include "mmwnc/netcalc.hpp"
#include "mmwnc/power.hpp"
#include "mmwnc/sim.hpp"

using namespace mmwnc;

namespace {

SinrModel table1_model() {
  ChannelParams p;
  p.sigma_db.assign(11, 8.0);
  const Topology t = Topology::equal_spacing(10, 500.0, db_to_linear(-80.0));
  return sinr_model(p, t, optimal_allocation(p, t, 50.0).allocation());
}

const HopClassDecomposition& table1_decomp() {
  static const HopClassDecomposition d = HopClassDecomposition::from_model(table1_model(), {});
  return d;
}

}  // namespace

static void BM_DiscretizedLawBuild(benchmark::State& state) {
  DiscretizationOptions o;
  o.delta = state.range(0) == 2 ? 1e-2 : 1e-3;
  const LogNormalSinr law = table1_model().law(1);
  for (auto _ : state) benchmark::DoNotOptimize(DiscretizedLaw::build(law, o));
}
BENCHMARK(BM_DiscretizedLawBuild)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_InverseMoment(benchmark::State& state) {
  const DiscretizedLaw grid = DiscretizedLaw::build(table1_model().law(1), {});
  double s = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(grid.inverse_moment(s));
    s += 1e-9;
  }
}
BENCHMARK(BM_InverseMoment)->Unit(benchmark::kMicrosecond);

static void BM_BacklogBound(benchmark::State& state) {
  const auto& d = table1_decomp();
  double eps = 1e-6;
  for (auto _ : state) {
    // Perturb epsilon so the q memo does not turn this into a lookup benchmark.
    benchmark::DoNotOptimize(backlog_bound(ArrivalSpec{1e9, 0.0}, d, eps));
    eps *= 1.0001;
  }
}
BENCHMARK(BM_BacklogBound)->Unit(benchmark::kMillisecond);

static void BM_DelayBound(benchmark::State& state) {
  const auto& d = table1_decomp();
  for (auto _ : state) benchmark::DoNotOptimize(delay_bound(ArrivalSpec{1.5e9, 0.0}, d, 1e-6));
}
BENCHMARK(BM_DelayBound)->Unit(benchmark::kMillisecond);

static void BM_SolveCofMu(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const double lam = lambda_total(ChannelParams{}, 50.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_c_of_mu(n, 5000.0 / (n + 1), 2.45, 1e-9, lam));
}
BENCHMARK(BM_SolveCofMu)->Arg(10)->Arg(50)->Arg(200);

static void BM_SimulateSlots(benchmark::State& state) {
  SimConfig c;
  c.slots = state.range(0);
  c.scenario = {table1_model(), ArrivalSpec{1.5e9, 0.0}};
  c.backlog_thresholds = {1e9, 5e9};
  for (auto _ : state) benchmark::DoNotOptimize(run(c));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateSlots)->Arg(100'000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
