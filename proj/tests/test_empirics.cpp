#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "bhp/empirics.hpp"
#include "bhp/errors.hpp"
#include "oracles.hpp"

using namespace bhp;

namespace {

const BhpDistribution& reference() {
  static const auto d = tabulate(LatticeSpectrum::periodic_square(10), GridSpec{});
  return d;
}

std::vector<double> inverse_transform(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = reference().table.quantile(u(gen));
  return v;
}

std::vector<double> normals(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  std::vector<double> v(n);
  for (auto& x : v) x = z(gen);
  return v;
}

double mass(const HistogramDensity& h) {
  double m = 0.0;
  for (std::size_t i = 0; i < h.bins(); ++i) m += h.densities[i] * h.width(i);
  return m;
}

}  // namespace

TEST(Histogram, SinglePointUnitBin) {
  const std::vector<double> v{0.5};
  const auto h = histogram_density(v, ExplicitEdges{{0.0, 1.0}});
  ASSERT_EQ(h.bins(), 1u);
  EXPECT_DOUBLE_EQ(h.densities[0], 1.0);
  EXPECT_EQ(h.total_count, 1u);
}

TEST(Histogram, NormalizationHoldsForEveryBinning) {
  std::mt19937_64 gen(4);
  std::exponential_distribution<double> e(2.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(1 + static_cast<std::size_t>(trial) * 37);
    for (auto& x : v) x = e(gen);
    EXPECT_NEAR(mass(histogram_density(v)), 1.0, 1e-12);
    EXPECT_NEAR(mass(histogram_density(v, BinCount{1 + trial})), 1.0, 1e-12);
    const auto h = histogram_density(v, ExplicitEdges{{0.0, 0.1, 0.5, 2.0, 50.0}});
    EXPECT_NEAR(mass(h), 1.0, 1e-12);
    EXPECT_EQ(std::accumulate(h.counts.begin(), h.counts.end(), std::size_t{0}), h.total_count);
  }
}

TEST(Histogram, AutoBinsClippedAndLastBinClosed) {
  const auto small = histogram_density(normals(50, 1));
  EXPECT_EQ(small.bins(), 20u);
  const auto big = histogram_density(normals(1'000'000, 1));
  EXPECT_LE(big.bins(), 200u);
  EXPECT_GE(big.bins(), 20u);
  const std::vector<double> v{0.0, 0.5, 1.0};
  const auto h = histogram_density(v, ExplicitEdges{{0.0, 0.5, 1.0}});
  EXPECT_EQ(h.counts[0], 1u);
  EXPECT_EQ(h.counts[1], 2u);
}

TEST(Histogram, RejectsBadInput) {
  EXPECT_THROW(histogram_density(std::vector<double>{}), InvalidArgument);
  EXPECT_THROW(histogram_density(std::vector<double>{1.0, NAN}), InvalidArgument);
  EXPECT_THROW(histogram_density(std::vector<double>{1.0}, ExplicitEdges{{1.0, 0.0}}),
               InvalidArgument);
  EXPECT_THROW(histogram_density(std::vector<double>{5.0}, ExplicitEdges{{0.0, 1.0}}),
               InvalidArgument);
}

TEST(Histogram, SamplerDrawsTrackTabulatedLogDensity) {
  const auto draws = sample(1'000'000, LatticeSpectrum::periodic_square(10), 2024);
  const auto h = histogram_density(draws);
  // Poisson noise of log density is 1/sqrt(count): 0.1 at 100 counts. Every
  // bin with >= 100 counts must sit within 4.5 of those units, and bins
  // where 0.1 is a four-sigma bound must sit within 0.1.
  std::size_t checked = 0;
  for (std::size_t i = 0; i < h.bins(); ++i) {
    if (h.counts[i] < 100) continue;
    ++checked;
    const double bin_mass = reference().table.cdf_at(h.bin_edges[i + 1]) -
                            reference().table.cdf_at(h.bin_edges[i]);
    const double dlog = std::log(h.densities[i]) - std::log(bin_mass / h.width(i));
    const double noise = 1.0 / std::sqrt(static_cast<double>(h.counts[i]));
    EXPECT_LT(std::abs(dlog), 4.5 * noise) << "bin " << i;
    if (h.counts[i] >= 1600) EXPECT_LT(std::abs(dlog), 0.1) << "bin " << i;
  }
  EXPECT_GT(checked, 100u);
}

TEST(Ks, InverseTransformSampleIsClose) {
  const auto v = inverse_transform(100'000, 7);
  const auto r = ks_distance(v, reference());
  EXPECT_EQ(r.n, 100'000u);
  EXPECT_LT(r.distance, 0.006);
}

TEST(Ks, ReferenceQuantilesPinTheDistance) {
  const std::size_t n = 1000;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = reference().table.quantile((static_cast<double>(i) + 0.5) / n);
  }
  EXPECT_LE(ks_distance(v, reference()).distance, 0.5 / n + 1e-12);
}

TEST(Ks, NormalDrawsAreDistinguishable) {
  EXPECT_GT(ks_distance(normals(100'000, 3), reference()).distance, 0.05);
}

TEST(Ks, MatchesBruteForceExactly) {
  std::mt19937_64 gen(99);
  std::uniform_int_distribution<std::size_t> size(1, 300);
  const auto& t = reference().table;
  for (int trial = 0; trial < 30; ++trial) {
    const auto v = inverse_transform(size(gen), gen());
    EXPECT_EQ(ks_distance(v, t).distance,
              oracle::ks_brute_force(v, [&](double x) { return t.cdf_at(x); }));
  }
  EXPECT_THROW(ks_distance(std::vector<double>{}, t), InvalidArgument);
}

TEST(ChiSquare, CalibratedOnSameDistribution) {
  const auto draws = sample(1'000'000, LatticeSpectrum::periodic_square(10), 31);
  const auto r = chi_square(histogram_density(draws), reference().table);
  ASSERT_GE(r.degrees_of_freedom, 1);
  const double ratio = r.statistic / r.degrees_of_freedom;
  EXPECT_GE(ratio, 0.5);
  EXPECT_LE(ratio, 2.0);
}

TEST(ChiSquare, RejectsNormalDraws) {
  const auto r = chi_square(histogram_density(normals(1'000'000, 5)), reference().table);
  EXPECT_GT(r.statistic / r.degrees_of_freedom, 10.0);
}

TEST(ChiSquare, SingleBinIsAnError) {
  const auto h = histogram_density(normals(1000, 5), BinCount{1});
  EXPECT_THROW(chi_square(h, reference().table), InvalidArgument);
}

TEST(Tails, TabulatedBhpShape) {
  const auto t = tail_diagnostics(reference().table);
  EXPECT_LT(t.residual_rms_below, 0.05);
  EXPECT_GT(t.slope_below, 0.0);
  EXPECT_LT(t.curvature_above, -0.01);
  EXPECT_FALSE(t.below_shrunk);
  // the density vanishes past the support edge, so the upper window shrinks
  EXPECT_TRUE(t.above_shrunk);
  EXPECT_LT(t.used_above.hi, 4.0);
}

TEST(Tails, AnalyticCases) {
  // exp(0.7 x) below zero; the upper piece varies per case
  std::vector<double> x;
  for (int i = 0; i <= 1400; ++i) x.push_back(-9.0 + 0.01 * i);
  auto diagnose = [&](auto upper) {
    std::vector<double> d;
    for (double xi : x) d.push_back(xi < 0.0 ? std::exp(0.7 * xi) : upper(xi));
    return tail_diagnostics(x, d);
  };
  const auto e = diagnose([](double xi) { return std::exp(-xi); });
  EXPECT_NEAR(e.curvature_above, 0.0, 1e-10);
  EXPECT_NEAR(e.slope_below, 0.7, 1e-10);
  EXPECT_NEAR(e.residual_rms_below, 0.0, 1e-10);
  // log density -x^2/2 has second derivative -1
  const auto g = diagnose([](double xi) { return std::exp(-0.5 * xi * xi); });
  EXPECT_NEAR(g.curvature_above, -1.0, 1e-8);
}

TEST(Tails, EmptyWindowThrows) {
  std::vector<double> x{-8.0, -6.0, -4.0, 2.0, 3.0, 4.0};
  std::vector<double> d{1e-3, 1e-2, 1e-1, 0.0, 0.0, 0.0};
  EXPECT_THROW(tail_diagnostics(x, d), InvalidArgument);
}

TEST(Qq, InverseTransformTracksReference) {
  const auto v = inverse_transform(100'000, 12);
  const auto pts = qq_points(v, reference().table, 99);
  ASSERT_EQ(pts.size(), 99u);
  double worst = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double p = (static_cast<double>(i) + 0.5) / 99.0;
    if (p < 0.01 || p > 0.99) continue;
    worst = std::max(worst, std::abs(pts[i].empirical - pts[i].reference));
    if (i > 0) {
      EXPECT_LE(pts[i - 1].empirical, pts[i].empirical);
      EXPECT_LE(pts[i - 1].reference, pts[i].reference);
    }
  }
  EXPECT_LT(worst, 0.05);
}

TEST(Qq, SinglePairAtMedians) {
  const std::vector<double> v{3.0, -1.0, 2.0};
  const auto pts = qq_points(v, reference().table, 1);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_DOUBLE_EQ(pts[0].empirical, 2.0);
  EXPECT_DOUBLE_EQ(pts[0].reference, reference().table.quantile(0.5));
}

TEST(Qq, ShiftMovesFirstCoordinate) {
  auto v = inverse_transform(5000, 3);
  const auto a = qq_points(v, reference().table, 25);
  for (auto& x : v) x += 1.0;
  const auto b = qq_points(v, reference().table, 25);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(b[i].empirical - a[i].empirical, 1.0, 1e-12);
    EXPECT_EQ(b[i].reference, a[i].reference);
  }
  EXPECT_THROW(qq_points(std::vector<double>{}, reference().table, 5), InvalidArgument);
}

TEST(Qq, EmpiricalQuantileHazen) {
  const std::vector<double> s{1.0, 2.0, 3.0, 4.0};
  EXPECT_DOUBLE_EQ(empirical_quantile(s, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(empirical_quantile(s, 0.125), 1.0);
  EXPECT_DOUBLE_EQ(empirical_quantile(s, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(empirical_quantile(s, 1.0), 4.0);
}

TEST(Gof, ReportAndJson) {
  const auto v = inverse_transform(20'000, 8);
  const auto h = histogram_density(v);
  const auto report = goodness_of_fit(v, h, reference().table, 9);
  EXPECT_GE(report.ks_distance, 0.0);
  EXPECT_LE(report.ks_distance, 1.0);
  EXPECT_EQ(report.ks_n, v.size());
  ASSERT_TRUE(report.chi_square.has_value());
  EXPECT_GE(report.chi_square->degrees_of_freedom, 1);
  const auto j = to_json(report);
  EXPECT_EQ(j["ks_n"], 20'000);
  EXPECT_EQ(j["qq_points"].size(), 9u);
  EXPECT_TRUE(j.contains("tail_slope_below"));
  EXPECT_TRUE(j.contains("tail_curvature_above"));
  EXPECT_TRUE(j.contains("chi_square"));
}
