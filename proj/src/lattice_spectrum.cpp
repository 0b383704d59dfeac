#include "bhp/lattice_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bhp/errors.hpp"

namespace bhp {

namespace {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace

LatticeSpectrum::LatticeSpectrum(int side, std::vector<LatticeMode> modes)
    : side_(side), modes_(std::move(modes)) {
  std::stable_sort(modes_.begin(), modes_.end(),
                   [](const LatticeMode& a, const LatticeMode& b) { return a.lambda < b.lambda; });
  eigenvalues_.reserve(modes_.size());
  for (const auto& m : modes_) {
    eigenvalues_.push_back(m.lambda);
    if (!groups_.empty() && groups_.back().lambda == m.lambda) {
      ++groups_.back().multiplicity;
    } else {
      groups_.push_back({m.lambda, 1});
    }
  }
}

LatticeSpectrum LatticeSpectrum::periodic_square(int side) {
  if (side < 2) {
    throw InvalidArgument("lattice side must be >= 2 (got " + std::to_string(side) +
                          "); an L=1 lattice has no nonzero mode");
  }
  // cos(2 pi p / L) depends only on min(p, L - p); evaluating it on the folded
  // index and summing the two cosines in a fixed order makes symmetric modes
  // bit-identical, so degeneracies group exactly.
  std::vector<double> cosines(static_cast<std::size_t>(side));
  for (int p = 0; p < side; ++p) {
    const int folded = std::min(p, side - p);
    cosines[static_cast<std::size_t>(p)] =
        std::cos(2.0 * std::numbers::pi * folded / static_cast<double>(side));
  }

  std::vector<LatticeMode> modes;
  modes.reserve(static_cast<std::size_t>(side * side - 1));
  for (int p = 0; p < side; ++p) {
    for (int q = 0; q < side; ++q) {
      if (p == 0 && q == 0) continue;
      const int a = std::min(std::min(p, side - p), std::min(q, side - q));
      const int b = std::max(std::min(p, side - p), std::min(q, side - q));
      const double lambda = 4.0 - 2.0 * (cosines[static_cast<std::size_t>(a)] +
                                         cosines[static_cast<std::size_t>(b)]);
      modes.push_back({p, q, lambda});
    }
  }
  return LatticeSpectrum(side, std::move(modes));
}

LatticeSpectrum LatticeSpectrum::from_eigenvalues(int side, std::vector<double> eigenvalues) {
  if (side < 2) throw InvalidArgument("lattice side must be >= 2");
  const auto expected = static_cast<std::size_t>(side * side - 1);
  if (eigenvalues.size() != expected) {
    throw InvalidArgument("expected " + std::to_string(expected) + " eigenvalues, got " +
                          std::to_string(eigenvalues.size()));
  }
  std::vector<LatticeMode> modes;
  modes.reserve(expected);
  for (double v : eigenvalues) {
    if (!std::isfinite(v) || v <= 0.0) throw InvalidArgument("eigenvalues must be finite and > 0");
    modes.push_back({-1, -1, v});
  }
  return LatticeSpectrum(side, std::move(modes));
}

double variance_prefactor(const LatticeSpectrum& spectrum) {
  CompensatedSum sum;
  for (double lambda : spectrum.eigenvalues()) sum.add(1.0 / (lambda * lambda));
  const double n = static_cast<double>(spectrum.sites());
  return std::sqrt(sum.value() / (2.0 * n * n));
}

}  // namespace bhp
