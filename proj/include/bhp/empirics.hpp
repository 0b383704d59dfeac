#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "bhp/bhp_distribution.hpp"
#include "json.hpp"

namespace bhp {

/// Density-normalized histogram. `total_count` counts only in-range values;
/// sum(densities * widths) == 1 and sum(counts) == total_count.
struct HistogramDensity {
  std::vector<double> bin_edges;
  std::vector<double> densities;
  std::vector<std::size_t> counts;
  std::size_t total_count = 0;
  std::size_t out_of_range = 0;

  std::size_t bins() const noexcept { return counts.size(); }
  double width(std::size_t bin) const { return bin_edges[bin + 1] - bin_edges[bin]; }
  double center(std::size_t bin) const { return 0.5 * (bin_edges[bin] + bin_edges[bin + 1]); }
};

struct ExplicitEdges {
  std::vector<double> edges;
};
struct BinCount {
  int count = 50;
};
/// Freedman-Diaconis width 2 IQR n^(-1/3), bin count clipped to [min_bins, max_bins].
struct AutoBins {
  int min_bins = 20;
  int max_bins = 200;
};
using Binning = std::variant<AutoBins, BinCount, ExplicitEdges>;

/// Throws InvalidArgument for an empty or non-finite sample, invalid edges, or
/// explicit edges that capture no value.
HistogramDensity histogram_density(std::span<const double> sample,
                                   const Binning& binning = AutoBins{});

struct KsResult {
  double distance = 0.0;
  std::size_t n = 0;
};

/// sup_x |F_n(x) - F(x)| from both one-sided gaps at each order statistic.
/// Descriptive collapse distance; no p-value. Throws on an empty sample.
KsResult ks_distance(std::span<const double> sample, const TabulatedDensity& reference);
inline KsResult ks_distance(std::span<const double> sample, const BhpDistribution& reference) {
  return ks_distance(sample, reference.table);
}

struct ChiSquareResult {
  double statistic = 0.0;
  int degrees_of_freedom = 0;
  int cells = 0;  // after merging
};

/// Pearson statistic of histogram counts against reference CDF differences.
/// The outer bins absorb the reference mass beyond the histogram range.
/// Sparse cells are merged from each tail inward until expected >= 5.
/// Throws InvalidArgument when fewer than two cells survive.
ChiSquareResult chi_square(const HistogramDensity& hist, const TabulatedDensity& reference);

struct TailWindow {
  double lo = 0.0;
  double hi = 0.0;
};

struct TailOptions {
  TailWindow lower{-8.0, -4.0};
  TailWindow upper{2.0, 4.0};
  /// Points at or below this density are treated as outside the support.
  double min_density = 1e-6;
};

struct TailDiagnostics {
  double slope_below = 0.0;         // least-squares slope of log density
  double residual_rms_below = 0.0;  // RMS residual of that line
  double curvature_above = 0.0;     // mean second derivative of log density
  TailWindow used_below;
  TailWindow used_above;
  bool below_shrunk = false;
  bool above_shrunk = false;
};

/// Lower window: straight-line fit of log density. Upper window: mean of the
/// three-point second derivative of log density. A window is shrunk to the
/// longest run of points with density > min_density; fewer than 3 usable
/// points throws InvalidArgument.
TailDiagnostics tail_diagnostics(std::span<const double> x, std::span<const double> density,
                                 const TailOptions& options = {});
TailDiagnostics tail_diagnostics(const TabulatedDensity& table, const TailOptions& options = {});
TailDiagnostics tail_diagnostics(const HistogramDensity& hist, const TailOptions& options = {});

struct QqPoint {
  double empirical = 0.0;
  double reference = 0.0;
};

/// Empirical quantile of an ascending sample, interpolated at position
/// p * n - 0.5 (Hazen plotting position).
double empirical_quantile(std::span<const double> sorted, double p);

/// Pairs at probabilities (i - 0.5) / count, i = 1..count.
std::vector<QqPoint> qq_points(std::span<const double> sample, const TabulatedDensity& reference,
                               std::size_t count);

struct GofReport {
  double ks_distance = 0.0;
  std::size_t ks_n = 0;
  std::optional<ChiSquareResult> chi_square;
  std::optional<TailDiagnostics> tails;
  std::vector<QqPoint> qq_points;
};

GofReport goodness_of_fit(std::span<const double> sample, const HistogramDensity& hist,
                          const TabulatedDensity& reference, std::size_t qq_count = 99);

nlohmann::ordered_json to_json(const GofReport& report);

}  // namespace bhp
