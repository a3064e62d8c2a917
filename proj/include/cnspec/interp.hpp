#ifndef CNSPEC_INTERP_HPP_
#define CNSPEC_INTERP_HPP_

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "cnspec/errors.hpp"
#include "cnspec/fft.hpp"
#include "cnspec/field.hpp"
#include "cnspec/grid.hpp"

namespace cnspec {

/// Periodic tensor-product Lagrange interpolation of grid samples.
///
/// An even stencil of S points centred on the query is used per dimension;
/// for band-limited data the error decays like (h k)^S / S!, so S = 12 gives
/// near machine precision for the smooth fields handled here.  Optionally the
/// samples are first upsampled by zero-padding in Fourier space (valid for
/// periodic band-limited fields only); non-periodic grid data (e.g. linear
/// velocity profiles) should be interpolated directly, where the local
/// stencil reproduces polynomials of degree < S away from the wrap.
class LagrangeInterpolant {
 public:
  LagrangeInterpolant(const Field& f, int stencil = 12, int upsample = 1)
      : dim_(f.grid().dim), comps_(f.components()), stencil_(stencil) {
    if (stencil < 2 || stencil > 32 || stencil % 2 != 0)
      throw DomainError("stencil size must be even, >= 2 and <= 32");
    if (upsample < 1) throw DomainError("upsample factor must be >= 1");
    n_ = f.grid().points_per_dim * upsample;
    length_ = f.grid().length;
    h_ = length_ / n_;
    if (upsample == 1) {
      vals_ = f.physical();
    } else {
      vals_ = upsampled(f, upsample);
    }
    // barycentric weights for an S-point uniform stencil: w_i = (-1)^i C(S-1,i)
    bary_.resize(stencil_);
    double c = 1.0;
    for (int i = 0; i < stencil_; ++i) {
      bary_[i] = (i % 2 == 0) ? c : -c;
      c = c * (stencil_ - 1 - i) / (i + 1);
    }
  }

  int components() const { return comps_; }

  double eval(int comp, const std::array<double, 3>& x) const {
    std::array<std::array<double, 32>, 3> wt{};
    std::array<int, 3> base{};
    for (int ax = 0; ax < dim_; ++ax) weights(x[ax], wt[ax], base[ax]);
    const std::size_t npts = vals_.size() / comps_;
    const double* v = vals_.data() + static_cast<std::size_t>(comp) * npts;
    double acc = 0.0;
    if (dim_ == 1) {
      for (int i = 0; i < stencil_; ++i) acc += wt[0][i] * v[wrap(base[0] + i)];
    } else if (dim_ == 2) {
      for (int i = 0; i < stencil_; ++i) {
        const double* row = v + static_cast<std::size_t>(wrap(base[0] + i)) * n_;
        double r = 0.0;
        for (int j = 0; j < stencil_; ++j) r += wt[1][j] * row[wrap(base[1] + j)];
        acc += wt[0][i] * r;
      }
    } else {
      const std::size_t nn = static_cast<std::size_t>(n_) * n_;
      for (int i = 0; i < stencil_; ++i) {
        const double* plane = v + wrap(base[0] + i) * nn;
        double pi = 0.0;
        for (int j = 0; j < stencil_; ++j) {
          const double* row = plane + static_cast<std::size_t>(wrap(base[1] + j)) * n_;
          double r = 0.0;
          for (int k = 0; k < stencil_; ++k) r += wt[2][k] * row[wrap(base[2] + k)];
          pi += wt[1][j] * r;
        }
        acc += wt[0][i] * pi;
      }
    }
    return acc;
  }

 private:
  int wrap(int i) const {
    i %= n_;
    return i < 0 ? i + n_ : i;
  }

  void weights(double x, std::array<double, 32>& w, int& base) const {
    const double t = x / h_;
    const double fl = std::floor(t);
    base = static_cast<int>(fl) - (stencil_ / 2 - 1);
    const double frac = t - fl;  // in [0,1)
    // barycentric evaluation over nodes base..base+S-1, local coordinates
    // node_i = i - (S/2 - 1), query at S/2 - 1 + frac
    const double q = (stencil_ / 2 - 1) + frac;
    // exact node hit
    for (int i = 0; i < stencil_; ++i) {
      if (std::abs(q - i) < 1e-13) {
        for (int j = 0; j < stencil_; ++j) w[j] = (j == i) ? 1.0 : 0.0;
        return;
      }
    }
    double sum = 0.0;
    for (int i = 0; i < stencil_; ++i) {
      w[i] = bary_[i] / (q - i);
      sum += w[i];
    }
    for (int i = 0; i < stencil_; ++i) w[i] /= sum;
  }

  std::vector<double> upsampled(const Field& f, int m) const {
    const Grid& g = f.grid();
    const int nc = g.points_per_dim;
    const int nf = nc * m;
    std::size_t coarse_n = g.npts(), fine_n = 1;
    for (int i = 0; i < dim_; ++i) fine_n *= static_cast<std::size_t>(nf);
    Grid fine(g.dim, nf, g.length, g.dealias_fraction);
    std::vector<double> out(static_cast<std::size_t>(comps_) * fine_n);
    const auto& spec = f.spectral();
    std::vector<std::complex<double>> pad(fine_n), scratch(fine_n);
    for (int c = 0; c < comps_; ++c) {
      std::fill(pad.begin(), pad.end(), std::complex<double>(0.0, 0.0));
      for (std::size_t i = 0; i < coarse_n; ++i) {
        std::array<int, 3> kk{0, 0, 0};
        std::size_t rem = i;
        for (int ax = dim_ - 1; ax >= 0; --ax) {
          kk[ax] = g.freq(static_cast<int>(rem % nc));
          rem /= nc;
        }
        std::size_t fi = 0;
        for (int ax = 0; ax < dim_; ++ax) fi = fi * nf + ((kk[ax] % nf) + nf) % nf;
        pad[fi] = spec[c * coarse_n + i];
      }
      fft_inverse(fine, pad.data(), scratch.data());
      for (std::size_t i = 0; i < fine_n; ++i) out[c * fine_n + i] = scratch[i].real();
    }
    return out;
  }

  int dim_;
  int comps_;
  int stencil_;
  int n_;
  double length_;
  double h_;
  std::vector<double> vals_;
  std::vector<double> bary_;
};

}  // namespace cnspec

#endif  // CNSPEC_INTERP_HPP_
