#ifndef CNSPEC_CUTOFF_HPP_
#define CNSPEC_CUTOFF_HPP_

#include <cmath>
#include <string>

#include "cnspec/errors.hpp"
#include "cnspec/grid.hpp"

namespace cnspec {

/// Smooth radial dyadic cutoff: phi = 1 on |xi| <= 1/2, phi = 0 on |xi| >= 1,
/// built from the standard bump h(s) = exp(-1/s).  psi(xi) = phi(xi/2) - phi(xi)
/// is supported in the annulus 1/2 <= |xi| <= 2.
///
/// On the torus every nonzero mode has |k| >= 1 (in wavenumber units), where
/// phi vanishes, and |k| <= 2^{j_max}, so the resolved family psi(k/2^j),
/// j_min <= j <= j_max, telescopes to exactly 1 on every nonzero grid mode.
struct CutoffProfile {
  int j_min = 0;
  int j_max = 0;

  CutoffProfile() = default;
  explicit CutoffProfile(const Grid& g) : j_min(g.jmin()), j_max(g.jmax()) {}
  CutoffProfile(int jlo, int jhi) : j_min(jlo), j_max(jhi) {
    if (jhi < jlo) throw RangeError("empty dyadic range");
  }

  static double h(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

  static double phi(double r) {
    r = std::abs(r);
    const double num = h(2.0 - 2.0 * r);
    const double den = num + h(2.0 * r - 1.0);
    return den > 0.0 ? num / den : (r < 0.75 ? 1.0 : 0.0);
  }

  static double psi(double r) { return phi(r / 2.0) - phi(r); }

  void check_block(int j) const {
    if (j < j_min || j > j_max)
      throw RangeError("dyadic index " + std::to_string(j) + " outside resolved range [" +
                       std::to_string(j_min) + "," + std::to_string(j_max) + "]");
  }

  /// Multiplier for the block Delta_j at wavenumber magnitude |k| (in units of
  /// the grid's wavenumber unit).
  double block_multiplier(int j, double kmag_units) const {
    check_block(j);
    return psi(kmag_units / std::exp2(j));
  }

  /// Multiplier for the low-pass S_m (phi(k/2^m)).  Any integer m is accepted:
  /// below the resolved range only the mean passes, above it everything does.
  double lowpass_multiplier(int m, double kmag_units) const {
    if (kmag_units == 0.0) return 1.0;
    return phi(kmag_units / std::exp2(m));
  }
};

}  // namespace cnspec

#endif  // CNSPEC_CUTOFF_HPP_
