#include "bhp/bhp_distribution.hpp"

#include <algorithm>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "bhp/errors.hpp"
#include "bhp/kernels.hpp"

namespace bhp {

namespace {

constexpr double kMomentSpanLo = -12.0;
constexpr double kMomentSpanHi = 8.0;
constexpr double kEndpointDensityLimit = 1e-6;

double log_envelope(const LatticeSpectrum& spectrum, double x) {
  const double n = static_cast<double>(spectrum.sites());
  double acc = 0.0;
  for (const auto& g : spectrum.groups()) {
    const double t = x / (n * g.lambda);
    acc += g.multiplicity * std::log1p(t * t);
  }
  return -0.25 * acc;
}

}  // namespace

void QuadratureConfig::validate() const {
  if (x_max && !(std::isfinite(*x_max) && *x_max > 0.0)) {
    throw InvalidArgument("x_max must be finite and > 0");
  }
  if (!(std::isfinite(abs_tol) && abs_tol > 0.0)) throw InvalidArgument("abs_tol must be > 0");
  if (max_subdivisions < 1) throw InvalidArgument("max_subdivisions must be >= 1");
}

std::complex<double> characteristic_function(const LatticeSpectrum& spectrum, double x) {
  const double n = static_cast<double>(spectrum.sites());
  double log_mod = 0.0;
  double phase = 0.0;
  for (const auto& g : spectrum.groups()) {
    const double t = x / (n * g.lambda);
    log_mod -= 0.25 * g.multiplicity * std::log1p(t * t);
    phase += g.multiplicity * (0.5 * std::atan(t) - 0.5 * t);
  }
  return std::polar(std::exp(log_mod), phase);
}

double characteristic_envelope(const LatticeSpectrum& spectrum, double x) {
  return std::exp(log_envelope(spectrum, x));
}

double certified_x_max(const LatticeSpectrum& spectrum, double abs_tol) {
  if (!(abs_tol > 0.0)) throw InvalidArgument("abs_tol must be > 0");
  const double target = std::log(abs_tol / 10.0);
  double hi = 1.0;
  while (log_envelope(spectrum, hi) > target) {
    hi *= 2.0;
    if (hi > 1e15) throw InvalidArgument("characteristic-function envelope decays too slowly");
  }
  double lo = hi / 2.0;
  if (log_envelope(spectrum, lo) <= target) return lo;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (log_envelope(spectrum, mid) > target ? lo : hi) = mid;
  }
  return hi;
}

double support_edge(const LatticeSpectrum& spectrum) {
  const double n = static_cast<double>(spectrum.sites());
  double acc = 0.0;
  for (const auto& g : spectrum.groups()) acc += g.multiplicity / (2.0 * n * g.lambda);
  return acc / variance_prefactor(spectrum);
}

// ---------------------------------------------------------------------------
// PdfEvaluator

PdfEvaluator::PdfEvaluator(const LatticeSpectrum& spectrum, const QuadratureConfig& config)
    : config_(config),
      prefactor_(variance_prefactor(spectrum)),
      edge_(support_edge(spectrum)),
      direction_(config.orientation == Orientation::heavy_tail_below ? 1.0 : -1.0) {
  config_.validate();
  const double n = static_cast<double>(spectrum.sites());
  for (const auto& g : spectrum.groups()) {
    terms_.push_back({1.0 / (n * g.lambda), static_cast<double>(g.multiplicity)});
    half_trace_ += 0.5 * g.multiplicity / (n * g.lambda);
  }
  if (!config_.x_max) {
    // On the ray x_max - i t every factor satisfies |1 - i x c| >= x_max c >= 1.
    const double split = 2.0 * n * spectrum.groups().back().lambda;
    double certified = 0.0;
    try {
      certified = certified_x_max(spectrum, config_.abs_tol);
    } catch (const InvalidArgument&) {
      certified = INFINITY;
    }
    rotated_tail_ = certified > split;
    config_.x_max = rotated_tail_ ? split : certified;
  }
}

double PdfEvaluator::integrand(double mu, double x) const {
  double log_mod = 0.0;
  double phase = 0.0;
  for (const auto& t : terms_) {
    const double u = x * t.scale;
    log_mod += t.weight * std::log1p(u * u);
    phase += t.weight * (std::atan(u) - u);
  }
  const double theta = direction_ * x * mu * prefactor_ + 0.5 * phase;
  return prefactor_ / std::numbers::pi * std::exp(-0.25 * log_mod) * std::cos(theta);
}

QuadratureResult PdfEvaluator::integrate(double mu, double from, double to) const {
  return integrate_adaptive([this, mu](double x) { return integrand(mu, x); }, from, to,
                            config_.abs_tol, config_.max_subdivisions);
}

QuadratureResult PdfEvaluator::integrate_rotated_tail(double mu) const {
  const double w = direction_ * mu * prefactor_ - half_trace_;
  if (!(w < 0.0)) return {0.0, 0.0, 0, true};
  const double x0 = *config_.x_max;
  // e^{w t} bounds the integrand on the ray, so the cut at t_end drops < abs_tol / 10.
  const double t_end = std::max(0.0, std::log(10.0 / (config_.abs_tol * -w))) / -w;
  auto f = [this, w, x0](double t) {
    double log_mod = w * t;
    double arg = w * x0;
    for (const auto& term : terms_) {
      const double re = 1.0 - t * term.scale;
      const double im = -x0 * term.scale;
      log_mod -= 0.25 * term.weight * std::log(re * re + im * im);
      arg -= 0.5 * term.weight * std::atan2(im, re);
    }
    return prefactor_ / std::numbers::pi * std::exp(log_mod) * std::sin(arg);
  };
  return integrate_adaptive(f, 0.0, t_end, config_.abs_tol, config_.max_subdivisions);
}

double PdfEvaluator::operator()(double mu) const {
  if (!std::isfinite(mu)) throw InvalidArgument("mu must be finite");
  if (direction_ * mu >= edge_) return 0.0;
  auto r = integrate(mu, 0.0, *config_.x_max);
  if (rotated_tail_) {
    const auto tail = integrate_rotated_tail(mu);
    r.value += tail.value;
    r.error += tail.error;
    r.subdivisions += tail.subdivisions;
    r.converged = r.converged && tail.converged;
  }
  if (!r.converged) {
    throw ConvergenceError("pdf quadrature did not reach abs_tol at mu=" + std::to_string(mu) +
                               " (error bound " + std::to_string(r.error) + " after " +
                               std::to_string(r.subdivisions) + " subdivisions)",
                           r.value, r.error, mu);
  }
  return std::max(0.0, r.value);
}

double evaluate_pdf(double mu, const LatticeSpectrum& spectrum, const QuadratureConfig& config) {
  return PdfEvaluator(spectrum, config)(mu);
}

// ---------------------------------------------------------------------------
// Tabulation

std::vector<double> uniform_grid(const GridSpec& spec) {
  if (!(std::isfinite(spec.lo) && std::isfinite(spec.hi)) || !(spec.lo < spec.hi)) {
    throw InvalidArgument("grid requires finite lo < hi");
  }
  if (spec.count < 2) throw InvalidArgument("grid requires count >= 2");
  std::vector<double> grid(static_cast<std::size_t>(spec.count));
  const double step = (spec.hi - spec.lo) / (spec.count - 1);
  for (int i = 0; i < spec.count; ++i) grid[static_cast<std::size_t>(i)] = spec.lo + i * step;
  grid.back() = spec.hi;
  return grid;
}

TabulatedDensity TabulatedDensity::from_pdf(std::vector<double> grid, std::vector<double> pdf) {
  if (grid.size() < 2 || grid.size() != pdf.size()) {
    throw InvalidArgument("tabulation needs >= 2 points and matching pdf values");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw InvalidArgument("grid must be strictly increasing");
  }
  std::vector<double> cdf(grid.size(), 0.0);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    cdf[i] = cdf[i - 1] + 0.5 * (pdf[i - 1] + pdf[i]) * (grid[i] - grid[i - 1]);
  }
  const double total = cdf.back();
  if (!(total > 0.0)) throw InvalidArgument("tabulated density has no mass on the grid");
  for (auto& c : cdf) c /= total;
  cdf.back() = 1.0;
  return {std::move(grid), std::move(pdf), std::move(cdf)};
}

double TabulatedDensity::cdf_at(double x) const {
  if (x <= grid.front()) return x < grid.front() ? 0.0 : cdf.front();
  if (x >= grid.back()) return 1.0;
  const auto it = std::upper_bound(grid.begin(), grid.end(), x);
  const auto i = static_cast<std::size_t>(it - grid.begin());
  const double w = (x - grid[i - 1]) / (grid[i] - grid[i - 1]);
  return cdf[i - 1] + w * (cdf[i] - cdf[i - 1]);
}

double TabulatedDensity::quantile(double p) const {
  p = std::clamp(p, 0.0, 1.0);
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), p);
  if (it == cdf.begin()) return grid.front();
  if (it == cdf.end()) return grid.back();
  const auto i = static_cast<std::size_t>(it - cdf.begin());
  const double span = cdf[i] - cdf[i - 1];
  if (span <= 0.0) return grid[i];
  const double w = (p - cdf[i - 1]) / span;
  return grid[i - 1] + w * (grid[i] - grid[i - 1]);
}

double TabulatedDensity::integral() const {
  double acc = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    acc += 0.5 * (pdf[i - 1] + pdf[i]) * (grid[i] - grid[i - 1]);
  }
  return acc;
}

Moments trapezoid_moments(const TabulatedDensity& table) {
  const auto& x = table.grid;
  const auto& p = table.pdf;
  // trapezoid weights
  std::vector<double> w(x.size(), 0.0);
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double h = 0.5 * (x[i] - x[i - 1]);
    w[i - 1] += h;
    w[i] += h;
  }
  double m0 = 0.0;
  double m1 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    m0 += w[i] * p[i];
    m1 += w[i] * p[i] * x[i];
  }
  if (!(m0 > 0.0)) throw InvalidArgument("tabulated density has no mass");
  const double mean = m1 / m0;
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - mean;
    const double wp = w[i] * p[i];
    c2 += wp * d * d;
    c3 += wp * d * d * d;
    c4 += wp * d * d * d * d;
  }
  c2 /= m0;
  c3 /= m0;
  c4 /= m0;
  return {mean, c2, c3 / std::pow(c2, 1.5), c4 / (c2 * c2) - 3.0};
}

Moments moments(const BhpDistribution& dist) {
  const auto& t = dist.table;
  if (t.pdf.front() > kEndpointDensityLimit || t.pdf.back() > kEndpointDensityLimit) {
    throw InvalidArgument("density at a grid endpoint exceeds 1e-6; widen the grid before "
                          "computing moments");
  }
  return trapezoid_moments(t);
}

BhpDistribution tabulate(const LatticeSpectrum& spectrum, const GridSpec& grid_spec,
                         const QuadratureConfig& config) {
  auto grid = uniform_grid(grid_spec);
  const PdfEvaluator pdf(spectrum, config);
  auto values = kernels::tabulate_pdf(grid, pdf);
  BhpDistribution dist{spectrum, pdf.config(),
                       TabulatedDensity::from_pdf(std::move(grid), std::move(values)), {},
                       pdf.rotated_tail()};

  const auto& t = dist.table;
  const bool spans = t.grid.front() <= kMomentSpanLo && t.grid.back() >= kMomentSpanHi;
  const bool tails_small =
      t.pdf.front() <= kEndpointDensityLimit && t.pdf.back() <= kEndpointDensityLimit;
  if (spans && tails_small) {
    dist.moments = trapezoid_moments(t);
    return dist;
  }

  // Auxiliary table at the same (or finer) step, widened in 4-unit strides
  // until the density at both ends is negligible.
  const double step = std::min((grid_spec.hi - grid_spec.lo) / (grid_spec.count - 1), 0.01);
  double lo = std::min(grid_spec.lo, kMomentSpanLo);
  double hi = std::max(grid_spec.hi, kMomentSpanHi);
  for (int i = 0; i < 50 && pdf(lo) > kEndpointDensityLimit; ++i) lo -= 4.0;
  for (int i = 0; i < 50 && pdf(hi) > kEndpointDensityLimit; ++i) hi += 4.0;
  const int count = static_cast<int>(std::ceil((hi - lo) / step)) + 1;
  auto aux_grid = uniform_grid({lo, hi, count});
  auto aux_values = kernels::tabulate_pdf(aux_grid, pdf);
  dist.moments =
      trapezoid_moments(TabulatedDensity::from_pdf(std::move(aux_grid), std::move(aux_values)));
  return dist;
}

double cdf(double x, const BhpDistribution& dist) { return dist.table.cdf_at(x); }

// ---------------------------------------------------------------------------
// Sampler

ModeSumSampler::ModeSumSampler(const LatticeSpectrum& spectrum, Orientation orientation) {
  const double n = static_cast<double>(spectrum.sites());
  for (const auto& g : spectrum.groups()) {
    groups_.push_back({1.0 / (2.0 * n * g.lambda), g.multiplicity});
    words_per_draw_ += static_cast<std::uint64_t>(g.multiplicity / 2 + (g.multiplicity % 2) * 2);
  }
  // mu = -X / s0 puts the chi-square (heavy) tail below the mean.
  const double direction = orientation == Orientation::heavy_tail_below ? -1.0 : 1.0;
  scale_ = direction / variance_prefactor(spectrum);
}

double ModeSumSampler::draw(const CounterRng& rng, std::uint64_t index) const {
  std::uint64_t pos = index * words_per_draw_;
  double acc = 0.0;
  for (const auto& g : groups_) {
    double chi2 = 0.0;
    int pairs = g.multiplicity / 2;
    while (pairs > 0) {
      // products of <= 16 uniforms in (0,1) at 53-bit resolution cannot underflow
      const int chunk = std::min(pairs, 16);
      double product = 1.0;
      for (int j = 0; j < chunk; ++j) product *= rng.uniform(pos++);
      chi2 -= 2.0 * std::log(product);
      pairs -= chunk;
    }
    if (g.multiplicity % 2 == 1) {
      const double z = rng.normal(pos);
      pos += 2;
      chi2 += z * z;
    }
    acc += g.coefficient * (chi2 - g.multiplicity);
  }
  return scale_ * acc;
}

std::vector<double> sample(std::size_t count, const LatticeSpectrum& spectrum, std::uint64_t seed,
                           Orientation orientation) {
  std::vector<double> out(count);
  kernels::sample_draws(out, ModeSumSampler(spectrum, orientation), CounterRng(seed));
  return out;
}

// ---------------------------------------------------------------------------
// Generalized Gumbel

GumbelApprox GumbelApprox::moment_matched(double a, Orientation orientation) {
  if (!(std::isfinite(a) && a > 0.0)) throw InvalidArgument("Gumbel shape a must be > 0");
  const double b = std::sqrt(boost::math::trigamma(a));
  const double s = (std::log(a) - boost::math::digamma(a)) / b;
  return {a, b, s, orientation};
}

double gumbel_approx_pdf(double x, const GumbelApprox& g) {
  const double y = g.orientation == Orientation::heavy_tail_below ? x : -x;
  const double u = g.b * (y - g.s);
  const double log_norm = g.a * std::log(g.a) + std::log(g.b) - std::lgamma(g.a);
  return std::exp(log_norm + g.a * u - g.a * std::exp(u));
}

}  // namespace bhp
