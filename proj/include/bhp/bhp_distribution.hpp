#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "bhp/lattice_spectrum.hpp"
#include "bhp/quadrature.hpp"
#include "bhp/random.hpp"

namespace bhp {

/// Which side carries the exponential (heavy) tail. The default puts it below
/// the mean, which gives negative skewness.
enum class Orientation { heavy_tail_below, heavy_tail_above };

struct QuadratureConfig {
  /// Truncation point of the inversion integral. Empty means "certify from
  /// the characteristic-function envelope".
  std::optional<double> x_max;
  double abs_tol = 1e-10;
  int max_subdivisions = 200;
  Orientation orientation = Orientation::heavy_tail_below;

  /// Throws InvalidArgument on x_max <= 0, abs_tol <= 0, max_subdivisions < 1.
  void validate() const;
};

/// Characteristic function of the unnormalized mode sum
///   X = sum_k (z_k^2 - 1) / (2 N lambda_k),
///   phi(x) = exp( -sum_k [ i x / (2 N lambda_k) - (i/2) atan(x / (N lambda_k))
///                          + (1/4) ln(1 + x^2 / (N lambda_k)^2) ] ).
std::complex<double> characteristic_function(const LatticeSpectrum& spectrum, double x);

/// |phi(x)| = prod_k (1 + x^2 / (N lambda_k)^2)^(-1/4); decreasing in |x|.
double characteristic_envelope(const LatticeSpectrum& spectrum, double x);

/// Smallest x (to bisection precision) with envelope(x) <= abs_tol / 10.
double certified_x_max(const LatticeSpectrum& spectrum, double abs_tol);

/// The mode sum is bounded on its light side: X >= -sum_k 1 / (2 N lambda_k).
/// Returns the standardized endpoint; the density vanishes beyond it (above it
/// for heavy_tail_below, below its negation otherwise).
double support_edge(const LatticeSpectrum& spectrum);

/// Evaluates the standardized density by inverting phi on [0, x_max]:
///   p(mu) = (s0 / pi) * integral_0^x_max Re[ exp(i x mu s0) phi(x) ] dx,
/// with s0 = variance_prefactor(spectrum). Mode groups of equal eigenvalue
/// are folded into one term.
///
/// Small lattices decay too slowly for a finite truncation (L = 2 needs
/// x ~ 1e8). When the certified x_max exceeds 2 N lambda_max and no x_max was
/// given, the real-axis integral stops at x_max = 2 N lambda_max and the rest
/// is integrated along the ray x_max - i t, where the integrand decays like
/// exp(-|w| t) with w = mu s0 - sum_k 1 / (2 N lambda_k).
class PdfEvaluator {
 public:
  PdfEvaluator(const LatticeSpectrum& spectrum, const QuadratureConfig& config);

  /// Throws InvalidArgument for non-finite mu and ConvergenceError (with mu
  /// attached) if the tolerance is not reached. Result is clamped at 0.
  double operator()(double mu) const;

  /// Raw quadrature of the integrand over [from, to]; no convergence check.
  QuadratureResult integrate(double mu, double from, double to) const;

  double integrand(double mu, double x) const;

  /// Config with x_max resolved.
  const QuadratureConfig& config() const noexcept { return config_; }
  double x_max() const noexcept { return *config_.x_max; }
  /// True when the tail beyond x_max is integrated on the rotated ray.
  bool rotated_tail() const noexcept { return rotated_tail_; }
  /// Tail integral on the rotated ray (see above); zero-length when mu is
  /// outside the support.
  QuadratureResult integrate_rotated_tail(double mu) const;
  double prefactor() const noexcept { return prefactor_; }
  double edge() const noexcept { return edge_; }

 private:
  struct Term {
    double scale;  // 1 / (N lambda)
    double weight; // multiplicity
  };
  std::vector<Term> terms_;
  QuadratureConfig config_;
  double prefactor_;
  double edge_;
  double direction_;
  double half_trace_ = 0.0;  // sum_k 1 / (2 N lambda_k)
  bool rotated_tail_ = false;
};

double evaluate_pdf(double mu, const LatticeSpectrum& spectrum, const QuadratureConfig& config);

struct GridSpec {
  double lo = -12.0;
  double hi = 8.0;
  int count = 2001;
};

/// Throws InvalidArgument unless lo < hi, both finite, and count >= 2.
std::vector<double> uniform_grid(const GridSpec& spec);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};

/// Density tabulated on an increasing grid, with its distribution function.
struct TabulatedDensity {
  std::vector<double> grid;
  std::vector<double> pdf;
  std::vector<double> cdf;

  /// Builds cdf by cumulative trapezoid, renormalized to end at exactly 1.
  static TabulatedDensity from_pdf(std::vector<double> grid, std::vector<double> pdf);

  /// Linear interpolation of cdf; 0 below the grid, 1 above.
  double cdf_at(double x) const;
  /// Inverse of cdf_at by monotone linear inversion, p clamped to [0, 1].
  double quantile(double p) const;
  double integral() const;
};

/// Trapezoid moments about the origin, centered and standardized.
Moments trapezoid_moments(const TabulatedDensity& table);

struct BhpDistribution {
  LatticeSpectrum spectrum;
  QuadratureConfig config;  // x_max resolved
  TabulatedDensity table;
  Moments moments;
  bool rotated_tail = false;
};

/// Tabulates the density on a uniform grid. Moments come from the table when
/// it already spans [-12, 8], otherwise from an auxiliary table with the same
/// step that does. Convergence failures propagate with the offending mu.
BhpDistribution tabulate(const LatticeSpectrum& spectrum, const GridSpec& grid,
                         const QuadratureConfig& config = {});

double cdf(double x, const BhpDistribution& dist);

/// Trapezoid moments of the tabulated density. Throws InvalidArgument when the
/// density at either grid end exceeds 1e-6 (widen the grid).
Moments moments(const BhpDistribution& dist);

/// Exact sampler for the standardized mode sum. Bit-identical eigenvalues
/// are grouped; a group of multiplicity m contributes a chi-square(m)
/// variate, drawn as -2 log of a product of m/2 uniforms plus one squared
/// normal when m is odd. Draw i reads only stream positions
/// [i * words_per_draw(), (i + 1) * words_per_draw()).
class ModeSumSampler {
 public:
  ModeSumSampler(const LatticeSpectrum& spectrum, Orientation orientation);

  double draw(const CounterRng& rng, std::uint64_t index) const;
  std::uint64_t words_per_draw() const noexcept { return words_per_draw_; }

 private:
  struct Group {
    double coefficient;  // 1 / (2 N lambda)
    int multiplicity;
  };
  std::vector<Group> groups_;
  std::uint64_t words_per_draw_ = 0;
  double scale_;
};

/// `count` independent draws, deterministic in `seed`. count == 0 is valid.
std::vector<double> sample(std::size_t count, const LatticeSpectrum& spectrum, std::uint64_t seed,
                           Orientation orientation = Orientation::heavy_tail_below);

/// Generalized Gumbel density
///   a^a b / Gamma(a) * exp( a b (y - s) - a exp(b (y - s)) ),
/// with b, s chosen for zero mean and unit variance.
struct GumbelApprox {
  double a = std::numbers::pi / 2.0;
  double b = 0.0;
  double s = 0.0;
  Orientation orientation = Orientation::heavy_tail_below;

  static GumbelApprox moment_matched(double a = std::numbers::pi / 2.0,
                                     Orientation orientation = Orientation::heavy_tail_below);
};

double gumbel_approx_pdf(double x, const GumbelApprox& approx);

}  // namespace bhp
