// Serial reference vs OpenMP kernels. Run with --benchmark_filter to pick one.

#include <benchmark/benchmark.h>

#include "bhp/data_io.hpp"
#include "bhp/kernels.hpp"

using namespace bhp;

namespace {

const LatticeSpectrum& spectrum() {
  static const auto s = LatticeSpectrum::periodic_square(10);
  return s;
}

template <auto Kernel>
void BM_Tabulate(benchmark::State& state) {
  const PdfEvaluator pdf(spectrum(), {});
  const auto grid = uniform_grid({-12.0, 8.0, static_cast<int>(state.range(0))});
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(grid, pdf));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void BM_Sample(benchmark::State& state) {
  const ModeSumSampler sampler(spectrum(), Orientation::heavy_tail_below);
  const CounterRng rng(1);
  std::vector<double> out(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    Kernel(out, sampler, rng, 0);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void BM_DayStats(benchmark::State& state) {
  SynthConfig c;
  c.generator = SynthGenerator::geometric_random_walk;
  c.n_stocks = 100;
  c.n_days = static_cast<int>(state.range(0));
  const auto returns = rescale_returns(synth_panel(c).panel, TransformMode::magnitude);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(returns));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_Tabulate<kernels::tabulate_pdf_serial>)->Arg(201)->Arg(2001)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Tabulate<kernels::tabulate_pdf>)->Arg(201)->Arg(2001)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sample<kernels::sample_draws_serial>)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sample<kernels::sample_draws>)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DayStats<kernels::all_day_stats_serial>)->Arg(5000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_DayStats<kernels::all_day_stats>)->Arg(5000)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
