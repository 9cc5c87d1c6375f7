#include <benchmark/benchmark.h>

#include "bautin/cycles.hpp"
#include "bautin/model.hpp"
#include "bautin/normalform.hpp"
#include "bautin/spectrum.hpp"

namespace {

bautin::ModelParams at(double delta, double r) { return {2.5, 2.0, delta, 1.01, r}; }

void BM_HopfDelay(benchmark::State& state) {
  const auto rest = at(0.002, 5.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bautin::hopf_r(0.0023073665, rest));
  }
}
BENCHMARK(BM_HopfDelay);

void BM_HopfCurve(benchmark::State& state) {
  const auto rest = at(0.002, 5.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bautin::hopf_curve(0.0012, 0.0026, 200, rest));
  }
}
BENCHMARK(BM_HopfCurve);

void BM_LeadingRoot(benchmark::State& state) {
  const auto p = at(0.0015, 7.55);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bautin::leading_root(p));
  }
}
BENCHMARK(BM_LeadingRoot);

// One eigenmode run over a fixed horizon; the argument is t_end.
void BM_Integrate(benchmark::State& state) {
  const auto p = at(0.0024, 5.2);
  const auto history = bautin::make_history(p, bautin::leading_root(p), 0.2);
  bautin::IntegrationOptions opts;
  opts.t_end = static_cast<double>(state.range(0));
  for (auto _ : state) {
    const auto traj = bautin::integrate(p, history, opts);
    benchmark::DoNotOptimize(traj.times().size());
  }
}
BENCHMARK(BM_Integrate)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_ClassifyRun(benchmark::State& state) {
  const auto p = at(0.0015, 7.55);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bautin::classify_run(p, 0.6));
  }
}
BENCHMARK(BM_ClassifyRun)->Unit(benchmark::kMillisecond);

void BM_ZoneRaster(benchmark::State& state) {
  for (auto _ : state) {
    int zone1 = 0;
    for (int j = 0; j < 201; ++j) {
      for (int i = 0; i < 201; ++i) {
        const double b1 = -0.1 + 0.2 * i / 200.0;
        const double b2 = -0.8 + 1.6 * j / 200.0;
        zone1 += bautin::region_classify({b1, b2, -1}) == bautin::Zone::Zone1;
      }
    }
    benchmark::DoNotOptimize(zone1);
  }
}
BENCHMARK(BM_ZoneRaster);

}  // namespace

BENCHMARK_MAIN();
