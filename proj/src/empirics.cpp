#include "bhp/empirics.hpp"

#include <algorithm>
#include <cmath>

#include "bhp/errors.hpp"

namespace bhp {

namespace {

std::vector<double> sorted_copy(std::span<const double> sample) {
  std::vector<double> v(sample.begin(), sample.end());
  std::sort(v.begin(), v.end());
  return v;
}

void require_finite_nonempty(std::span<const double> sample) {
  if (sample.empty()) throw InvalidArgument("sample is empty");
  for (double v : sample) {
    if (!std::isfinite(v)) throw InvalidArgument("sample contains a non-finite value");
  }
}

std::vector<double> auto_edges(std::span<const double> sorted, const AutoBins& opt) {
  const double lo = sorted.front();
  const double hi = sorted.back();
  if (!(hi > lo)) return {lo - 0.5, lo + 0.5};
  const double n = static_cast<double>(sorted.size());
  const double iqr = empirical_quantile(sorted, 0.75) - empirical_quantile(sorted, 0.25);
  int bins = opt.min_bins;
  if (iqr > 0.0) {
    const double width = 2.0 * iqr / std::cbrt(n);
    bins = static_cast<int>(std::ceil((hi - lo) / width));
  }
  bins = std::clamp(bins, opt.min_bins, opt.max_bins);
  std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i) edges[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / bins;
  edges.back() = hi;
  return edges;
}

// Longest run of consecutive in-window points with density above the floor.
struct Run {
  std::size_t first = 0;
  std::size_t last = 0;  // inclusive
  std::size_t in_window = 0;
  bool found = false;
};

Run usable_run(std::span<const double> x, std::span<const double> d, const TailWindow& w,
               double floor) {
  Run best;
  std::size_t start = 0;
  bool open = false;
  for (std::size_t i = 0; i <= x.size(); ++i) {
    const bool inside = i < x.size() && x[i] >= w.lo && x[i] <= w.hi;
    if (inside) ++best.in_window;
    const bool ok = inside && d[i] > floor;
    if (ok && !open) {
      start = i;
      open = true;
    } else if (!ok && open) {
      const std::size_t len = i - start;
      if (!best.found || len > best.last - best.first + 1) {
        best.first = start;
        best.last = i - 1;
        best.found = true;
      }
      open = false;
    }
  }
  return best;
}

}  // namespace

HistogramDensity histogram_density(std::span<const double> sample, const Binning& binning) {
  require_finite_nonempty(sample);
  const auto sorted = sorted_copy(sample);

  std::vector<double> edges;
  if (const auto* e = std::get_if<ExplicitEdges>(&binning)) {
    edges = e->edges;
  } else if (const auto* c = std::get_if<BinCount>(&binning)) {
    if (c->count < 1) throw InvalidArgument("bin count must be >= 1");
    double lo = sorted.front();
    double hi = sorted.back();
    if (!(hi > lo)) {
      lo -= 0.5;
      hi += 0.5;
    }
    edges.resize(static_cast<std::size_t>(c->count) + 1);
    for (int i = 0; i <= c->count; ++i) {
      edges[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / c->count;
    }
    edges.back() = hi;
  } else {
    const auto& a = std::get<AutoBins>(binning);
    if (a.min_bins < 1 || a.max_bins < a.min_bins) throw InvalidArgument("bad auto-bin limits");
    edges = auto_edges(sorted, a);
  }
  if (edges.size() < 2) throw InvalidArgument("need at least two bin edges");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) throw InvalidArgument("bin edges must be strictly increasing");
  }

  HistogramDensity h;
  h.bin_edges = edges;
  h.counts.assign(edges.size() - 1, 0);
  for (double v : sorted) {
    if (v < edges.front() || v > edges.back()) {
      ++h.out_of_range;
      continue;
    }
    // bins are [e_i, e_{i+1}); the last one is closed
    auto it = std::upper_bound(edges.begin(), edges.end(), v);
    auto bin = static_cast<std::size_t>(it - edges.begin()) - 1;
    if (bin >= h.counts.size()) bin = h.counts.size() - 1;
    ++h.counts[bin];
  }
  for (auto c : h.counts) h.total_count += c;
  if (h.total_count == 0) throw InvalidArgument("no sample value falls inside the bin edges");
  const double n = static_cast<double>(h.total_count);
  h.densities.resize(h.counts.size());
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    h.densities[i] = static_cast<double>(h.counts[i]) / (n * h.width(i));
  }
  return h;
}

KsResult ks_distance(std::span<const double> sample, const TabulatedDensity& reference) {
  if (sample.empty()) throw InvalidArgument("KS distance of an empty sample");
  const auto sorted = sorted_copy(sample);
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = reference.cdf_at(sorted[i]);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  return {d, sorted.size()};
}

ChiSquareResult chi_square(const HistogramDensity& hist, const TabulatedDensity& reference) {
  const std::size_t k = hist.bins();
  if (k < 2) throw InvalidArgument("chi-square needs at least two bins");
  const double n = static_cast<double>(hist.total_count);
  std::vector<double> observed(k);
  std::vector<double> expected(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double lo = i == 0 ? 0.0 : reference.cdf_at(hist.bin_edges[i]);
    const double hi = i + 1 == k ? 1.0 : reference.cdf_at(hist.bin_edges[i + 1]);
    observed[i] = static_cast<double>(hist.counts[i]);
    expected[i] = n * (hi - lo);
  }

  constexpr double kMinExpected = 5.0;
  struct Cell {
    double o = 0.0;
    double e = 0.0;
  };
  // left tail
  std::size_t a = 0;
  Cell left;
  while (a < k) {
    left.o += observed[a];
    left.e += expected[a];
    ++a;
    if (left.e >= kMinExpected) break;
  }
  // right tail
  std::size_t b = k;
  Cell right;
  while (b > a) {
    --b;
    right.o += observed[b];
    right.e += expected[b];
    if (right.e >= kMinExpected) break;
  }
  if (left.e < kMinExpected || right.e < kMinExpected || a > b) {
    throw InvalidArgument("fewer than two chi-square cells with expected count >= 5");
  }
  std::vector<Cell> cells{left};
  Cell pending;
  for (std::size_t i = a; i < b; ++i) {
    pending.o += observed[i];
    pending.e += expected[i];
    if (pending.e >= kMinExpected) {
      cells.push_back(pending);
      pending = {};
    }
  }
  right.o += pending.o;
  right.e += pending.e;
  cells.push_back(right);

  double stat = 0.0;
  for (const auto& c : cells) stat += (c.o - c.e) * (c.o - c.e) / c.e;
  const int n_cells = static_cast<int>(cells.size());
  return {stat, n_cells - 1, n_cells};
}

TailDiagnostics tail_diagnostics(std::span<const double> x, std::span<const double> density,
                                 const TailOptions& options) {
  if (x.size() != density.size()) throw InvalidArgument("x and density sizes differ");
  TailDiagnostics out;

  const auto low = usable_run(x, density, options.lower, options.min_density);
  if (!low.found || low.last - low.first + 1 < 3) {
    throw InvalidArgument("lower tail window has fewer than 3 points with positive density");
  }
  {
    const std::size_t m = low.last - low.first + 1;
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = low.first; i <= low.last; ++i) {
      sx += x[i];
      sy += std::log(density[i]);
    }
    const double mx = sx / static_cast<double>(m);
    const double my = sy / static_cast<double>(m);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = low.first; i <= low.last; ++i) {
      sxx += (x[i] - mx) * (x[i] - mx);
      sxy += (x[i] - mx) * (std::log(density[i]) - my);
    }
    const double slope = sxy / sxx;
    double rss = 0.0;
    for (std::size_t i = low.first; i <= low.last; ++i) {
      const double r = std::log(density[i]) - (my + slope * (x[i] - mx));
      rss += r * r;
    }
    out.slope_below = slope;
    out.residual_rms_below = std::sqrt(rss / static_cast<double>(m));
    out.used_below = {x[low.first], x[low.last]};
    out.below_shrunk = m < low.in_window;
  }

  const auto up = usable_run(x, density, options.upper, options.min_density);
  if (!up.found || up.last - up.first + 1 < 3) {
    throw InvalidArgument("upper tail window has fewer than 3 points with positive density");
  }
  {
    double acc = 0.0;
    std::size_t terms = 0;
    for (std::size_t i = up.first + 1; i < up.last; ++i) {
      const double l0 = std::log(density[i - 1]);
      const double l1 = std::log(density[i]);
      const double l2 = std::log(density[i + 1]);
      const double d_right = (l2 - l1) / (x[i + 1] - x[i]);
      const double d_left = (l1 - l0) / (x[i] - x[i - 1]);
      acc += 2.0 * (d_right - d_left) / (x[i + 1] - x[i - 1]);
      ++terms;
    }
    out.curvature_above = acc / static_cast<double>(terms);
    out.used_above = {x[up.first], x[up.last]};
    out.above_shrunk = up.last - up.first + 1 < up.in_window;
  }
  return out;
}

TailDiagnostics tail_diagnostics(const TabulatedDensity& table, const TailOptions& options) {
  return tail_diagnostics(table.grid, table.pdf, options);
}

TailDiagnostics tail_diagnostics(const HistogramDensity& hist, const TailOptions& options) {
  std::vector<double> centers(hist.bins());
  for (std::size_t i = 0; i < hist.bins(); ++i) centers[i] = hist.center(i);
  return tail_diagnostics(centers, hist.densities, options);
}

double empirical_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw InvalidArgument("quantile of an empty sample");
  const double n = static_cast<double>(sorted.size());
  const double pos = std::clamp(p * n - 0.5, 0.0, n - 1.0);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= sorted.size()) return sorted.back();
  const double w = pos - static_cast<double>(i);
  return sorted[i] + w * (sorted[i + 1] - sorted[i]);
}

std::vector<QqPoint> qq_points(std::span<const double> sample, const TabulatedDensity& reference,
                               std::size_t count) {
  if (sample.empty()) throw InvalidArgument("QQ points of an empty sample");
  const auto sorted = sorted_copy(sample);
  std::vector<QqPoint> out;
  out.reserve(count);
  for (std::size_t i = 1; i <= count; ++i) {
    const double p = (static_cast<double>(i) - 0.5) / static_cast<double>(count);
    out.push_back({empirical_quantile(sorted, p), reference.quantile(p)});
  }
  return out;
}

GofReport goodness_of_fit(std::span<const double> sample, const HistogramDensity& hist,
                          const TabulatedDensity& reference, std::size_t qq_count) {
  GofReport report;
  const auto ks = ks_distance(sample, reference);
  report.ks_distance = ks.distance;
  report.ks_n = ks.n;
  try {
    report.chi_square = chi_square(hist, reference);
  } catch (const InvalidArgument&) {
  }
  try {
    report.tails = tail_diagnostics(hist);
  } catch (const InvalidArgument&) {
  }
  report.qq_points = qq_points(sample, reference, qq_count);
  return report;
}

nlohmann::ordered_json to_json(const GofReport& report) {
  nlohmann::ordered_json j;
  j["ks_distance"] = report.ks_distance;
  j["ks_n"] = report.ks_n;
  j["ks_note"] = "descriptive distance; pooled values are not i.i.d.";
  if (report.chi_square) {
    j["chi_square"] = {{"statistic", report.chi_square->statistic},
                       {"degrees_of_freedom", report.chi_square->degrees_of_freedom},
                       {"cells", report.chi_square->cells}};
  } else {
    j["chi_square"] = nullptr;
  }
  if (report.tails) {
    const auto& t = *report.tails;
    j["tail_slope_below"] = t.slope_below;
    j["tail_curvature_above"] = t.curvature_above;
    j["tails"] = {{"residual_rms_below", t.residual_rms_below},
                  {"window_below", {t.used_below.lo, t.used_below.hi}},
                  {"window_below_shrunk", t.below_shrunk},
                  {"window_above", {t.used_above.lo, t.used_above.hi}},
                  {"window_above_shrunk", t.above_shrunk}};
  } else {
    j["tail_slope_below"] = nullptr;
    j["tail_curvature_above"] = nullptr;
    j["tails"] = nullptr;
  }
  auto qq = nlohmann::ordered_json::array();
  for (const auto& p : report.qq_points) qq.push_back({p.empirical, p.reference});
  j["qq_points"] = std::move(qq);
  return j;
}

}  // namespace bhp
