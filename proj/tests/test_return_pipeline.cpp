#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "bhp/data_io.hpp"
#include "bhp/errors.hpp"
#include "bhp/return_pipeline.hpp"
#include "oracles.hpp"

using namespace bhp;

namespace {

Date day(int offset) {
  return Date{std::chrono::sys_days{std::chrono::year{2020} / 1 / 1} + std::chrono::days{offset}};
}

// One-day panel of rescaled values, built directly.
RescaledReturnPanel one_day(const std::vector<double>& s) {
  RescaledReturnPanel r;
  r.dates = {day(0)};
  for (std::size_t i = 0; i < s.size(); ++i) r.tickers.push_back("T" + std::to_string(i));
  r.values.assign(s.begin(), s.end());
  return r;
}

PricePanel planted(std::uint64_t seed, TransformMode mode, int stocks = 30, int days = 60) {
  SynthConfig c;
  c.seed = seed;
  c.mode = mode;
  c.n_stocks = stocks;
  c.n_days = days;
  return synth_panel(c).panel;
}

}  // namespace

TEST(Rescale, MagnitudeAndSignedModes) {
  const auto p = PricePanel::create({day(0), day(1), day(2)}, {"A"}, {100.0, 108.0, 97.2});
  const auto mag = rescale_returns(p, TransformMode::magnitude);
  ASSERT_EQ(mag.n_days(), 2u);
  EXPECT_EQ(mag.dates[0], day(0));
  EXPECT_NEAR(*mag.value(0, 0), std::pow(0.08, 2.0 / 3.0), 1e-15);
  EXPECT_NEAR(*mag.value(0, 0), 0.18566, 1e-5);
  EXPECT_NEAR(*mag.value(1, 0), std::pow(0.1, 2.0 / 3.0), 1e-14);
  const auto sgn = rescale_returns(p, TransformMode::signed_power);
  EXPECT_NEAR(*sgn.value(1, 0), -std::pow(0.1, 2.0 / 3.0), 1e-14);
  EXPECT_EQ(sgn.mode, TransformMode::signed_power);
}

TEST(Rescale, ZeroReturnAndMissingPrices) {
  EXPECT_EQ(rescale(0.0, TransformMode::magnitude), 0.0);
  EXPECT_EQ(rescale(0.0, TransformMode::signed_power), 0.0);
  const auto p = PricePanel::create({day(0), day(1), day(2)}, {"A", "B"},
                                    {100.0, 50.0, std::nullopt, 50.0, 90.0, 50.0});
  const auto r = rescale_returns(p, TransformMode::magnitude);
  EXPECT_FALSE(r.value(0, 0).has_value());
  EXPECT_FALSE(r.value(1, 0).has_value());
  EXPECT_EQ(*r.value(0, 1), 0.0);
}

TEST(Rescale, NeedsTwoDates) {
  const auto p = PricePanel::create({day(0)}, {"A"}, {100.0});
  EXPECT_THROW(rescale_returns(p, TransformMode::magnitude), InvalidArgument);
}

TEST(Rescale, ModeNames) {
  EXPECT_EQ(parse_transform_mode("magnitude"), TransformMode::magnitude);
  EXPECT_EQ(parse_transform_mode("signed"), TransformMode::signed_power);
  EXPECT_EQ(to_string(TransformMode::signed_power), "signed");
  EXPECT_THROW(parse_transform_mode("cube"), InvalidArgument);
}

TEST(PricePanel, RejectsBadInput) {
  EXPECT_THROW(PricePanel::create({day(1), day(0)}, {"A"}, {1.0, 1.0}), InvalidArgument);
  EXPECT_THROW(PricePanel::create({day(0)}, {"A", "A"}, {1.0, 1.0}), InvalidArgument);
  EXPECT_THROW(PricePanel::create({day(0)}, {"A"}, {0.0}), InvalidArgument);
  EXPECT_THROW(PricePanel::create({day(0)}, {"A"}, {1.0, 2.0}), InvalidArgument);
}

TEST(EnsembleStats, ConstantDayHasZeroSigma) {
  const std::vector<double> v{0.1, 0.1, 0.1};
  const auto s = ensemble_stats(v);
  EXPECT_EQ(s.n_available, 3u);
  EXPECT_NEAR(s.mu, 0.1, 1e-17);
  EXPECT_NEAR(s.sigma, 0.0, 1e-17);
}

TEST(EnsembleStats, TwoPointPopulationSigma) {
  const std::vector<double> v{0.0, 0.2};
  const auto s = ensemble_stats(v);
  EXPECT_DOUBLE_EQ(s.mu, 0.1);
  EXPECT_NEAR(s.sigma, 0.1, 1e-16);
  EXPECT_FALSE(ensemble_stats(std::vector<double>{}).usable());
}

TEST(EnsembleStats, AgreesWithOnePassFormula) {
  std::mt19937_64 gen(11);
  std::lognormal_distribution<double> dist(-3.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(2 + trial % 50);
    for (auto& x : v) x = dist(gen);
    const auto s = ensemble_stats(v);
    EXPECT_NEAR(s.sigma, oracle::one_pass_sigma(v), 1e-12);
  }
}

TEST(DayStats, LookupByIndexAndDate) {
  auto r = one_day({0.0, 0.2});
  EXPECT_NEAR(day_stats(r, 0).sigma, 0.1, 1e-16);
  EXPECT_EQ(day_stats(r, day(0)).n_available, 2u);
  EXPECT_THROW(day_stats(r, 1), InvalidArgument);
  EXPECT_THROW(day_stats(r, day(5)), InvalidArgument);
}

TEST(Pool, WorkedExample) {
  // mean 1, population sigma 1; the value 3 sits two sigmas out
  auto r = one_day({0.0, 0.0, 0.0, 0.0, 3.0, 1.0, 1.0, 1.0, 2.0, 2.0});
  const auto f = pool_fluctuations(r, {.min_n = 10});
  ASSERT_EQ(f.values.size(), 10u);
  EXPECT_NEAR(f.values[4], 2.0, 1e-15);
  EXPECT_EQ(f.provenance[4].ticker, 4u);
}

TEST(Pool, SkipsThinAndDegenerateDays) {
  RescaledReturnPanel r;
  r.dates = {day(0), day(1), day(2)};
  r.tickers = {"A", "B", "C"};
  r.values = {0.1, 0.1, 0.1, 0.1, std::nullopt, std::nullopt, 0.1, 0.2, 0.3};
  const auto f = pool_fluctuations(r, {.min_n = 2});
  ASSERT_EQ(f.skipped_days.size(), 2u);
  EXPECT_EQ(f.skipped_days[0].date, day(0));
  EXPECT_EQ(f.skipped_days[0].reason, SkipReason::degenerate_sigma);
  EXPECT_EQ(f.skipped_days[1].date, day(1));
  EXPECT_EQ(f.skipped_days[1].reason, SkipReason::insufficient_ensemble);
  EXPECT_EQ(f.values.size(), 3u);
  EXPECT_EQ(f.day_stats.size(), 3u);
  for (const auto& p : f.provenance) EXPECT_EQ(p.day, 2u);
}

TEST(Pool, AllMissingDayIsSkippedNotFatal) {
  RescaledReturnPanel r;
  r.dates = {day(0)};
  r.tickers = {"A", "B"};
  r.values = {std::nullopt, std::nullopt};
  const auto f = pool_fluctuations(r, {.min_n = 0});
  ASSERT_EQ(f.skipped_days.size(), 1u);
  EXPECT_EQ(f.skipped_days[0].reason, SkipReason::insufficient_ensemble);
  EXPECT_TRUE(f.values.empty());
}

TEST(Pool, RecoversPlantedFluctuations) {
  for (auto mode : {TransformMode::magnitude, TransformMode::signed_power}) {
    SynthConfig c;
    c.mode = mode;
    c.n_stocks = 25;
    c.n_days = 80;
    c.seed = 5;
    const auto synth = synth_panel(c);
    const auto f = pool_fluctuations(rescale_returns(synth.panel, mode), {.min_n = 10});
    ASSERT_TRUE(f.skipped_days.empty());
    ASSERT_EQ(f.values.size(), synth.truth->fluctuations.size());
    for (std::size_t k = 0; k < f.values.size(); ++k) {
      EXPECT_NEAR(f.values[k], synth.truth->fluctuations[k], 1e-12);
    }
    for (std::size_t t = 0; t < f.day_stats.size(); ++t) {
      EXPECT_NEAR(f.day_stats[t].mu, synth.truth->mu[t], 1e-12);
      EXPECT_NEAR(f.day_stats[t].sigma, synth.truth->sigma[t], 1e-12);
    }
  }
}

TEST(Pool, EveryRetainedDayIsStandardized) {
  const auto panel = planted(9, TransformMode::magnitude);
  const auto f = pool_fluctuations(rescale_returns(panel, TransformMode::magnitude));
  const std::size_t n = panel.n_tickers();
  ASSERT_EQ(f.values.size(), (panel.n_dates() - 1) * n);
  for (std::size_t t = 0; t + 1 < panel.n_dates(); ++t) {
    const std::span<const double> row(f.values.data() + t * n, n);
    const auto m = oracle::sample_moments(row);
    EXPECT_NEAR(m.mean, 0.0, 1e-12);
    EXPECT_NEAR(std::sqrt(m.variance), 1.0, 1e-9);
  }
}

TEST(Pool, InvariantUnderPerDayAffineMaps) {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RescaledReturnPanel r;
  const std::size_t days = 20, stocks = 15;
  for (std::size_t t = 0; t < days; ++t) r.dates.push_back(day(static_cast<int>(t)));
  for (std::size_t i = 0; i < stocks; ++i) r.tickers.push_back("T" + std::to_string(i));
  for (std::size_t k = 0; k < days * stocks; ++k) r.values.push_back(u(gen));
  auto mapped = r;
  for (std::size_t t = 0; t < days; ++t) {
    const double a = 0.5 + u(gen) * 3.0;
    const double b = u(gen) - 0.5;
    for (std::size_t i = 0; i < stocks; ++i) {
      auto& v = mapped.values[t * stocks + i];
      *v = a * *v + b;
    }
  }
  const auto f0 = pool_fluctuations(r, {.min_n = 10});
  const auto f1 = pool_fluctuations(mapped, {.min_n = 10});
  ASSERT_EQ(f0.values.size(), f1.values.size());
  for (std::size_t k = 0; k < f0.values.size(); ++k) EXPECT_NEAR(f0.values[k], f1.values[k], 1e-10);
}

TEST(Pool, EquivariantUnderTickerPermutation) {
  const auto r = rescale_returns(planted(4, TransformMode::magnitude, 12, 30),
                                 TransformMode::magnitude);
  std::vector<std::size_t> perm(r.n_tickers());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 gen(8);
  std::shuffle(perm.begin(), perm.end(), gen);
  auto shuffled = r;
  for (std::size_t t = 0; t < r.n_days(); ++t) {
    for (std::size_t i = 0; i < r.n_tickers(); ++i) {
      shuffled.values[t * r.n_tickers() + i] = r.values[t * r.n_tickers() + perm[i]];
    }
  }
  for (std::size_t i = 0; i < r.n_tickers(); ++i) shuffled.tickers[i] = r.tickers[perm[i]];
  const auto a = pool_fluctuations(r, {.min_n = 10});
  const auto b = pool_fluctuations(shuffled, {.min_n = 10});
  ASSERT_EQ(a.values.size(), b.values.size());
  for (std::size_t k = 0; k < b.values.size(); ++k) {
    const auto& pb = b.provenance[k];
    const std::size_t ka = pb.day * r.n_tickers() + perm[pb.ticker];
    EXPECT_EQ(a.provenance[ka].ticker, perm[pb.ticker]);
    EXPECT_NEAR(b.values[k], a.values[ka], 1e-14);
  }
}

TEST(Pool, SizeIsSumOfRetainedAvailability) {
  auto r = rescale_returns(planted(6, TransformMode::magnitude, 20, 40), TransformMode::magnitude);
  std::mt19937_64 gen(1);
  std::bernoulli_distribution drop(0.3);
  for (auto& v : r.values) {
    if (drop(gen)) v.reset();
  }
  const auto f = pool_fluctuations(r, {.min_n = 14});
  std::size_t expected = 0;
  for (const auto& s : f.day_stats) {
    if (s.n_available >= 14) expected += s.n_available;
  }
  EXPECT_EQ(f.values.size(), expected);
  EXPECT_EQ(f.skipped_days.size() + (f.day_stats.size() - f.skipped_days.size()),
            r.n_days());
}
