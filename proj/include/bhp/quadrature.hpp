#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <tuple>
#include <utility>
#include <vector>

namespace bhp {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int subdivisions = 0;
  bool converged = false;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  double value;
  double error;
};

template <class F>
Segment gauss_kronrod_15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f_center = f(center);
  double kronrod = f_center * kKronrodWeights[7];
  double gauss = f_center * kGaussWeights[3];
  double abs_kronrod = std::abs(kronrod);
  std::array<double, 7> f_lo{}, f_hi{};
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    f_lo[j] = f(center - dx);
    f_hi[j] = f(center + dx);
    const double pair = f_lo[j] + f_hi[j];
    kronrod += kKronrodWeights[j] * pair;
    abs_kronrod += kKronrodWeights[j] * (std::abs(f_lo[j]) + std::abs(f_hi[j]));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  const double mean = 0.5 * kronrod;
  double asc = kKronrodWeights[7] * std::abs(f_center - mean);
  for (std::size_t j = 0; j < 7; ++j) {
    asc += kKronrodWeights[j] * (std::abs(f_lo[j] - mean) + std::abs(f_hi[j] - mean));
  }
  asc *= std::abs(half);

  double error = std::abs((kronrod - gauss) * half);
  if (asc != 0.0 && error != 0.0) error = asc * std::min(1.0, std::pow(200.0 * error / asc, 1.5));
  const double eps = std::numeric_limits<double>::epsilon();
  const double resabs = abs_kronrod * std::abs(half);
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    error = std::max(50.0 * eps * resabs, error);
  }
  return {a, b, kronrod * half, error};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [a, b]:
/// repeatedly bisects the segment with the largest error estimate until the
/// summed estimate is <= abs_tol or `max_subdivisions` segments exist.
/// Never throws; check `converged`.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double abs_tol,
                                    int max_subdivisions) {
  std::vector<detail::Segment> segments;
  segments.reserve(static_cast<std::size_t>(std::max(1, max_subdivisions)));
  segments.push_back(detail::gauss_kronrod_15(f, a, b));

  auto totals = [&segments] {
    double value = 0.0;
    double error = 0.0;
    for (const auto& s : segments) {
      value += s.value;
      error += s.error;
    }
    return std::pair{value, error};
  };

  auto [value, error] = totals();
  while (error > abs_tol && static_cast<int>(segments.size()) < max_subdivisions) {
    auto worst = std::max_element(segments.begin(), segments.end(),
                                  [](const auto& x, const auto& y) { return x.error < y.error; });
    const double lo = worst->a;
    const double hi = worst->b;
    const double mid = 0.5 * (lo + hi);
    if (!(lo < mid && mid < hi)) break;  // interval exhausted at machine precision
    *worst = detail::gauss_kronrod_15(f, lo, mid);
    segments.push_back(detail::gauss_kronrod_15(f, mid, hi));
    std::tie(value, error) = totals();
  }
  return {value, error, static_cast<int>(segments.size()), error <= abs_tol};
}

}  // namespace bhp
