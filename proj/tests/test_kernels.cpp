#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

#include "bhp/data_io.hpp"
#include "bhp/errors.hpp"
#include "bhp/kernels.hpp"

using namespace bhp;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST(Kernels, TabulationParallelMatchesSerial) {
  const auto spectrum = LatticeSpectrum::periodic_square(10);
  const PdfEvaluator pdf(spectrum, {});
  const auto grid = uniform_grid({-12.0, 8.0, 401});
  const auto par = kernels::tabulate_pdf(grid, pdf);
  const auto ser = kernels::tabulate_pdf_serial(grid, pdf);
  ASSERT_EQ(par.size(), ser.size());
  for (std::size_t i = 0; i < par.size(); ++i) EXPECT_TRUE(same_bits(par[i], ser[i])) << i;
}

TEST(Kernels, TabulationFailureReportsLowestIndex) {
  const auto spectrum = LatticeSpectrum::periodic_square(10);
  QuadratureConfig starved;
  starved.abs_tol = 1e-15;
  starved.max_subdivisions = 1;
  const PdfEvaluator pdf(spectrum, starved);
  const auto grid = uniform_grid({-4.0, -2.0, 21});
  for (auto run : {&kernels::tabulate_pdf, &kernels::tabulate_pdf_serial}) {
    try {
      run(grid, pdf);
      FAIL() << "expected ConvergenceError";
    } catch (const ConvergenceError& e) {
      ASSERT_TRUE(e.mu().has_value());
      EXPECT_EQ(*e.mu(), -4.0);
    }
  }
}

TEST(Kernels, SamplingParallelMatchesSerialAndOffsets) {
  const auto spectrum = LatticeSpectrum::periodic_square(10);
  const ModeSumSampler sampler(spectrum, Orientation::heavy_tail_below);
  const CounterRng rng(123);
  std::vector<double> par(20000), ser(20000);
  kernels::sample_draws(par, sampler, rng);
  kernels::sample_draws_serial(ser, sampler, rng);
  for (std::size_t i = 0; i < par.size(); ++i) ASSERT_TRUE(same_bits(par[i], ser[i])) << i;

  // a chunk starting at index k reproduces the tail of the full stream
  std::vector<double> tail(500);
  kernels::sample_draws(tail, sampler, rng, 19500);
  for (std::size_t i = 0; i < tail.size(); ++i) EXPECT_TRUE(same_bits(tail[i], par[19500 + i]));
}

TEST(Kernels, DayStatsParallelMatchesSerial) {
  SynthConfig config;
  config.generator = SynthGenerator::geometric_random_walk;
  config.n_stocks = 40;
  config.n_days = 300;
  const auto panel = synth_panel(config).panel;
  const auto returns = rescale_returns(panel, TransformMode::magnitude);
  const auto par = kernels::all_day_stats(returns);
  const auto ser = kernels::all_day_stats_serial(returns);
  ASSERT_EQ(par.size(), returns.n_days());
  ASSERT_EQ(par.size(), ser.size());
  for (std::size_t t = 0; t < par.size(); ++t) {
    EXPECT_EQ(par[t].date, ser[t].date);
    EXPECT_EQ(par[t].n_available, ser[t].n_available);
    EXPECT_TRUE(same_bits(par[t].mu, ser[t].mu));
    EXPECT_TRUE(same_bits(par[t].sigma, ser[t].sigma));
  }
}
