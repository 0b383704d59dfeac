#pragma once

#include <span>
#include <vector>

namespace bhp {

/// One Fourier mode (p, q) of the periodic L x L lattice and its eigenvalue.
struct LatticeMode {
  int p = 0;
  int q = 0;
  double lambda = 0.0;
};

/// Distinct eigenvalue with the number of modes sharing it bit-for-bit.
struct ModeGroup {
  double lambda = 0.0;
  int multiplicity = 0;
};

/// The N - 1 nonzero eigenvalues of the periodic square-lattice Laplacian,
/// N = L^2. The zero mode is excluded. Eigenvalues are sorted ascending with
/// duplicates retained. Immutable after construction.
class LatticeSpectrum {
 public:
  /// Closed form lambda(p,q) = 4 - 2cos(2 pi p/L) - 2cos(2 pi q/L) over every
  /// (p,q) != (0,0). Throws InvalidArgument for L < 2.
  static LatticeSpectrum periodic_square(int side);

  /// Arbitrary positive spectrum for a lattice of the given side, e.g. a
  /// rescaled one. Requires exactly side^2 - 1 finite positive values.
  static LatticeSpectrum from_eigenvalues(int side, std::vector<double> eigenvalues);

  int side() const noexcept { return side_; }
  int sites() const noexcept { return side_ * side_; }

  std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }
  /// Same order as eigenvalues(). (p, q) are -1 for spectra built from values.
  std::span<const LatticeMode> modes() const noexcept { return modes_; }
  /// Runs of bit-identical eigenvalues, ascending.
  std::span<const ModeGroup> groups() const noexcept { return groups_; }

 private:
  LatticeSpectrum(int side, std::vector<LatticeMode> modes);

  int side_;
  std::vector<LatticeMode> modes_;
  std::vector<double> eigenvalues_;
  std::vector<ModeGroup> groups_;
};

inline LatticeSpectrum laplacian_eigenvalues(int side) {
  return LatticeSpectrum::periodic_square(side);
}

/// sqrt( (1 / 2N^2) * sum_k 1 / lambda_k^2 ), the standard deviation of the
/// unnormalized mode sum. Uses compensated summation.
double variance_prefactor(const LatticeSpectrum& spectrum);

}  // namespace bhp
