#ifndef CNSPEC_RANDOM_FIELDS_HPP_
#define CNSPEC_RANDOM_FIELDS_HPP_

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "cnspec/field.hpp"
#include "cnspec/grid.hpp"
#include "cnspec/spectral_ops.hpp"

namespace cnspec {

/// Seeded random real scalar field with spectral amplitudes |k|^{-(s + d/2)}
/// times a standard gaussian, supported in kmin <= |k| <= kmax (wavenumber
/// units).  Coefficients are assigned in flat-index order to one
/// representative of each +/-k pair and mirrored conjugately, so the field is
/// real and bit-reproducible for a given seed.
inline Field random_field(const Grid& g, double s, std::uint64_t seed, double kmin = 1.0,
                          double kmax = 0.0) {
  if (kmax <= 0.0) kmax = g.dealias_cutoff() / g.wavenumber_unit();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  const std::size_t n = g.npts();
  const int nn = g.points_per_dim;
  const int half = nn / 2;
  std::vector<std::complex<double>> spec(n, {0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) {
    std::array<int, 3> kk{0, 0, 0};
    std::size_t rem = i;
    for (int ax = g.dim - 1; ax >= 0; --ax) {
      kk[ax] = g.freq(static_cast<int>(rem % nn));
      rem /= nn;
    }
    // Skip Nyquist lines (their conjugate partner aliases onto themselves)
    // and keep only the representative whose first nonzero component is > 0.
    bool nyquist = false, rep = false, zero = true;
    for (int ax = 0; ax < g.dim; ++ax) {
      if (kk[ax] == -half || kk[ax] == half) nyquist = true;
      if (zero && kk[ax] != 0) {
        rep = kk[ax] > 0;
        zero = false;
      }
    }
    if (nyquist || zero || !rep) continue;
    const double km = g.kmag(i) / g.wavenumber_unit();
    const double gs = gauss(rng);
    const double ph = phase(rng);  // always draw, to keep the stream aligned
    if (km < kmin - 1e-12 || km > kmax + 1e-12) continue;
    const double amp = 0.5 * std::pow(km, -(s + g.dim / 2.0)) * gs;
    // Flat index of -k.
    std::size_t mi = 0;
    for (int ax = 0; ax < g.dim; ++ax) mi = mi * nn + ((nn - ((kk[ax] % nn) + nn) % nn) % nn);
    spec[i] = std::polar(amp, ph);
    spec[mi] = std::conj(spec[i]);
  }
  return Field::from_spectral(g, 1, std::move(spec));
}

/// Random vector field, optionally projected onto its divergence-free part.
inline Field random_vector_field(const Grid& g, double s, std::uint64_t seed, bool div_free = false,
                                 double kmin = 1.0, double kmax = 0.0) {
  const std::size_t n = g.npts();
  std::vector<std::complex<double>> spec(static_cast<std::size_t>(g.dim) * n);
  for (int c = 0; c < g.dim; ++c) {
    const Field fc = random_field(g, s, seed + 1000003ULL * (c + 1), kmin, kmax);
    const auto& comp = fc.spectral();
    std::copy(comp.begin(), comp.end(), spec.begin() + c * n);
  }
  Field u = Field::from_spectral(g, g.dim, std::move(spec));
  if (div_free) u = helmholtz_project(u).first;
  return u;
}

}  // namespace cnspec

#endif  // CNSPEC_RANDOM_FIELDS_HPP_
