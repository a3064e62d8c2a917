#ifndef CNSPEC_SPECTRAL_OPS_HPP_
#define CNSPEC_SPECTRAL_OPS_HPP_

#include <cmath>
#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include "cnspec/cutoff.hpp"
#include "cnspec/errors.hpp"
#include "cnspec/field.hpp"
#include "cnspec/grid.hpp"

namespace cnspec {

/// Apply a radial spectral multiplier m(|k|) to every component.
inline Field radial_multiplier(const Field& f, const std::function<double(double)>& m) {
  const Grid& g = f.grid();
  const std::size_t n = g.npts();
  std::vector<std::complex<double>> out(f.spectral());
  std::vector<double> mult(n);
  for (std::size_t i = 0; i < n; ++i) mult[i] = m(g.kmag(i) / g.wavenumber_unit());
  for (int c = 0; c < f.components(); ++c)
    for (std::size_t i = 0; i < n; ++i) out[c * n + i] *= mult[i];
  return Field::from_spectral(g, f.components(), std::move(out));
}

/// Dyadic Littlewood-Paley block Delta_j (spectral multiplication by psi(k/2^j)).
inline Field lp_block(const Field& f, int j, const CutoffProfile& cut) {
  cut.check_block(j);
  return radial_multiplier(f, [&](double k) { return cut.block_multiplier(j, k); });
}

inline Field lp_block(const Field& f, int j) { return lp_block(f, j, CutoffProfile(f.grid())); }

/// Low-pass S_m (multiplier phi(k/2^m); the mean always passes).
inline Field low_pass(const Field& f, int m, const CutoffProfile& cut) {
  return radial_multiplier(f, [&](double k) { return cut.lowpass_multiplier(m, k); });
}

inline Field low_pass(const Field& f, int m) { return low_pass(f, m, CutoffProfile(f.grid())); }

inline Field high_pass(const Field& f, int m, const CutoffProfile& cut) { return f - low_pass(f, m, cut); }

inline Field high_pass(const Field& f, int m) { return high_pass(f, m, CutoffProfile(f.grid())); }

/// d/dx_ax as a spectral multiplier (i k_ax).
inline Field partial(const Field& f, int ax) {
  const Grid& g = f.grid();
  if (ax < 0 || ax >= g.dim) throw IndexError("derivative axis out of range");
  const std::size_t n = g.npts();
  std::vector<std::complex<double>> out(f.spectral());
  for (std::size_t i = 0; i < n; ++i) {
    const std::complex<double> ik(0.0, g.wavevector(i)[ax]);
    for (int c = 0; c < f.components(); ++c) out[c * n + i] *= ik;
  }
  return Field::from_spectral(g, f.components(), std::move(out));
}

/// Gradient of a scalar, returned as a d-component vector field.
inline Field gradient(const Field& f) {
  if (f.components() != 1) throw ShapeError("gradient expects a scalar field");
  const Grid& g = f.grid();
  const std::size_t n = g.npts();
  std::vector<std::complex<double>> out(static_cast<std::size_t>(g.dim) * n);
  const auto& s = f.spectral();
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = g.wavevector(i);
    for (int ax = 0; ax < g.dim; ++ax) out[ax * n + i] = std::complex<double>(0.0, k[ax]) * s[i];
  }
  return Field::from_spectral(g, g.dim, std::move(out));
}

inline Field divergence(const Field& u) {
  const Grid& g = u.grid();
  if (u.components() != g.dim) throw ShapeError("divergence expects a d-component vector field");
  const std::size_t n = g.npts();
  std::vector<std::complex<double>> out(n, {0.0, 0.0});
  const auto& s = u.spectral();
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = g.wavevector(i);
    for (int ax = 0; ax < g.dim; ++ax) out[i] += std::complex<double>(0.0, k[ax]) * s[ax * n + i];
  }
  return Field::from_spectral(g, 1, std::move(out));
}

inline Field laplacian(const Field& f) {
  return radial_multiplier(f, [&](double k) {
    const double kp = k * f.grid().wavenumber_unit();
    return -kp * kp;
  });
}

/// Zero all modes with |k| above the grid's radial dealias cutoff.
inline Field dealias(const Field& f) {
  const Grid& g = f.grid();
  const double cut = g.dealias_cutoff() / g.wavenumber_unit();
  return radial_multiplier(f, [cut](double k) { return k <= cut + 1e-12 ? 1.0 : 0.0; });
}

/// Pointwise product of scalar fields, dealiased.
inline Field multiply(const Field& f, const Field& g) {
  if (f.grid() != g.grid()) throw ShapeError("grid mismatch in product");
  if (f.components() != 1 || g.components() != 1) throw ShapeError("multiply expects scalar fields");
  const auto& a = f.physical();
  const auto& b = g.physical();
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return dealias(Field::from_physical(f.grid(), 1, std::move(out)));
}

/// Advective term (v . grad) f for vector v and scalar-or-vector f, dealiased.
inline Field advect(const Field& v, const Field& f) {
  const Grid& g = f.grid();
  if (v.grid() != g) throw ShapeError("grid mismatch in advection");
  if (v.components() != g.dim) throw ShapeError("advecting velocity must have d components");
  const std::size_t n = g.npts();
  std::vector<double> out(static_cast<std::size_t>(f.components()) * n, 0.0);
  const auto& vp = v.physical();
  for (int ax = 0; ax < g.dim; ++ax) {
    const Field df = partial(f, ax);
    const auto& dfp = df.physical();
    for (int c = 0; c < f.components(); ++c)
      for (std::size_t i = 0; i < n; ++i) out[c * n + i] += vp[ax * n + i] * dfp[c * n + i];
  }
  return dealias(Field::from_physical(g, f.components(), std::move(out)));
}

/// Helmholtz split u = Pu + Qu with div Pu = 0 and Qu a gradient.
/// The k = 0 mode goes to Pu (constants are divergence-free).
inline std::pair<Field, Field> helmholtz_project(const Field& u) {
  const Grid& g = u.grid();
  if (u.components() != g.dim) throw ShapeError("helmholtz_project expects a d-component vector field");
  const std::size_t n = g.npts();
  const auto& s = u.spectral();
  std::vector<std::complex<double>> pu(s), qu(s.size(), {0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = g.wavevector(i);
    double k2 = 0.0;
    for (int ax = 0; ax < g.dim; ++ax) k2 += k[ax] * k[ax];
    if (k2 == 0.0) continue;
    std::complex<double> kdotu(0.0, 0.0);
    for (int ax = 0; ax < g.dim; ++ax) kdotu += k[ax] * s[ax * n + i];
    for (int ax = 0; ax < g.dim; ++ax) {
      const std::complex<double> grad = (k[ax] / k2) * kdotu;
      qu[ax * n + i] = grad;
      pu[ax * n + i] -= grad;
    }
  }
  return {Field::from_spectral(g, g.dim, std::move(pu)), Field::from_spectral(g, g.dim, std::move(qu))};
}

}  // namespace cnspec

#endif  // CNSPEC_SPECTRAL_OPS_HPP_
