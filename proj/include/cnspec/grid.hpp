#ifndef CNSPEC_GRID_HPP_
#define CNSPEC_GRID_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include "cnspec/errors.hpp"

namespace cnspec {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Uniform periodic grid on [0,L)^d with N points per dimension.
/// Wavenumbers are integer multiples of 2*pi/L; with the default L = 2*pi
/// they are plain integers, which keeps the dyadic annuli |k| ~ 2^j exact.
struct Grid {
  int dim = 2;
  int points_per_dim = 32;
  double length = kTwoPi;
  double dealias_fraction = 2.0 / 3.0;

  Grid() = default;
  Grid(int d, int n, double L = kTwoPi, double dealias = 2.0 / 3.0)
      : dim(d), points_per_dim(n), length(L), dealias_fraction(dealias) {
    if (d < 1) throw DomainError("grid dimension must be >= 1");
    if (n < 8 || (n & (n - 1)) != 0)
      throw DomainError("points_per_dim must be a power of two >= 8, got " + std::to_string(n));
    if (L <= 0.0) throw DomainError("torus period must be positive");
    if (dealias <= 0.0 || dealias > 1.0) throw DomainError("dealias_fraction must lie in (0,1]");
  }

  std::size_t npts() const {
    std::size_t p = 1;
    for (int i = 0; i < dim; ++i) p *= static_cast<std::size_t>(points_per_dim);
    return p;
  }

  double spacing() const { return length / points_per_dim; }
  double cell_volume() const { return std::pow(spacing(), dim); }
  double volume() const { return std::pow(length, dim); }

  /// Scale between integer mode indices and physical wavenumbers.
  double wavenumber_unit() const { return kTwoPi / length; }

  /// Signed integer frequency for a flat index along one dimension.
  int freq(int i) const { return i <= points_per_dim / 2 ? i : i - points_per_dim; }

  /// |k| for a flat spectral index.
  double kmag(std::size_t flat) const {
    double s = 0.0;
    const int n = points_per_dim;
    for (int ax = dim - 1; ax >= 0; --ax) {
      const int f = freq(static_cast<int>(flat % n));
      flat /= n;
      s += static_cast<double>(f) * f;
    }
    return std::sqrt(s) * wavenumber_unit();
  }

  /// Wavevector components (physical units), slowest dimension first.
  std::array<double, 3> wavevector(std::size_t flat) const {
    std::array<double, 3> k{0.0, 0.0, 0.0};
    const int n = points_per_dim;
    for (int ax = dim - 1; ax >= 0; --ax) {
      k[ax] = freq(static_cast<int>(flat % n)) * wavenumber_unit();
      flat /= n;
    }
    return k;
  }

  /// Physical coordinates of a flat grid index.
  std::array<double, 3> coords(std::size_t flat) const {
    std::array<double, 3> x{0.0, 0.0, 0.0};
    const int n = points_per_dim;
    for (int ax = dim - 1; ax >= 0; --ax) {
      x[ax] = (static_cast<double>(flat % n)) * spacing();
      flat /= n;
    }
    return x;
  }

  /// Modes with |k| above this are discarded when products are dealiased.
  /// A radial cutoff at fraction*N/2 keeps every aliased image of a
  /// quadratic product outside the retained ball.
  double dealias_cutoff() const { return dealias_fraction * (points_per_dim / 2) * wavenumber_unit(); }

  /// Largest wavenumber magnitude present on the grid (the corner mode).
  double kmax() const { return std::sqrt(static_cast<double>(dim)) * (points_per_dim / 2) * wavenumber_unit(); }

  /// Resolved dyadic range.  j_min = 0 puts the first annulus at unit
  /// wavenumber; j_max is chosen so the dyadic blocks cover every grid mode
  /// and the partition of unity telescopes exactly on the whole lattice.
  int jmin() const { return 0; }
  int jmax() const { return static_cast<int>(std::ceil(std::log2(kmax() / wavenumber_unit()))); }

  bool operator==(const Grid& o) const {
    return dim == o.dim && points_per_dim == o.points_per_dim && length == o.length &&
           dealias_fraction == o.dealias_fraction;
  }
  bool operator!=(const Grid& o) const { return !(*this == o); }
};

}  // namespace cnspec

#endif  // CNSPEC_GRID_HPP_
