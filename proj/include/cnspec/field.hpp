#ifndef CNSPEC_FIELD_HPP_
#define CNSPEC_FIELD_HPP_

#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "cnspec/errors.hpp"
#include "cnspec/fft.hpp"
#include "cnspec/grid.hpp"

namespace cnspec {

/// Scalar or vector function on a periodic grid, carried lazily in physical
/// and spectral form.  Storage is component-major: component c occupies the
/// slice [c*npts, (c+1)*npts).  The spectral convention matches fft_forward:
/// f(x) = sum_k fhat(k) e^{i k.x}.
class Field {
 public:
  enum class Sync { physical, spectral, both };

  Field() = default;

  Field(const Grid& g, int components) : grid_(g), comps_(components) {
    if (components < 1) throw ShapeError("field needs at least one component");
    phys_.assign(comps_ * g.npts(), 0.0);
    sync_ = Sync::physical;
  }

  static Field from_physical(const Grid& g, int components, std::vector<double> values) {
    Field f(g, components);
    if (values.size() != f.phys_.size()) throw ShapeError("physical data size mismatch");
    f.phys_ = std::move(values);
    f.check_finite_physical();
    return f;
  }

  static Field from_spectral(const Grid& g, int components, std::vector<std::complex<double>> coeffs) {
    Field f(g, components);
    if (coeffs.size() != static_cast<std::size_t>(components) * g.npts())
      throw ShapeError("spectral data size mismatch");
    f.spec_ = std::move(coeffs);
    f.phys_.clear();
    f.sync_ = Sync::spectral;
    f.check_finite_spectral();
    return f;
  }

  /// Sample a pointwise function of the coordinates (scalar fields).
  static Field sample(const Grid& g, const std::function<double(const std::array<double, 3>&)>& fn) {
    Field f(g, 1);
    for (std::size_t i = 0; i < g.npts(); ++i) f.phys_[i] = fn(g.coords(i));
    f.check_finite_physical();
    return f;
  }

  static Field sample_vector(const Grid& g, int components,
                             const std::function<double(int, const std::array<double, 3>&)>& fn) {
    Field f(g, components);
    const std::size_t n = g.npts();
    for (int c = 0; c < components; ++c)
      for (std::size_t i = 0; i < n; ++i) f.phys_[c * n + i] = fn(c, g.coords(i));
    f.check_finite_physical();
    return f;
  }

  const Grid& grid() const { return grid_; }
  int components() const { return comps_; }
  std::size_t npts() const { return grid_.npts(); }

  Field& ensure_physical() {
    if (sync_ == Sync::spectral) {
      const std::size_t n = grid_.npts();
      phys_.assign(comps_ * n, 0.0);
      std::vector<std::complex<double>> scratch(n);
      for (int c = 0; c < comps_; ++c) {
        fft_inverse(grid_, spec_.data() + c * n, scratch.data());
        for (std::size_t i = 0; i < n; ++i) phys_[c * n + i] = scratch[i].real();
      }
      sync_ = Sync::both;
      check_finite_physical();
    }
    return *this;
  }

  Field& ensure_spectral() {
    if (sync_ == Sync::physical) {
      const std::size_t n = grid_.npts();
      spec_.assign(comps_ * n, {0.0, 0.0});
      std::vector<std::complex<double>> scratch(n);
      for (int c = 0; c < comps_; ++c) {
        for (std::size_t i = 0; i < n; ++i) scratch[i] = phys_[c * n + i];
        fft_forward(grid_, scratch.data(), spec_.data() + c * n);
      }
      sync_ = Sync::both;
      check_finite_spectral();
    }
    return *this;
  }

  // Ref-qualified so a temporary Field cannot hand out a dangling reference.
  const std::vector<double>& physical() const& {
    return const_cast<Field*>(this)->ensure_physical().phys_;
  }
  const std::vector<std::complex<double>>& spectral() const& {
    return const_cast<Field*>(this)->ensure_spectral().spec_;
  }
  const std::vector<double>& physical() const&& = delete;
  const std::vector<std::complex<double>>& spectral() const&& = delete;

  /// Mutable access invalidates the other representation.
  std::vector<double>& mutable_physical() {
    ensure_physical();
    spec_.clear();
    sync_ = Sync::physical;
    return phys_;
  }
  std::vector<std::complex<double>>& mutable_spectral() {
    ensure_spectral();
    phys_.clear();
    sync_ = Sync::spectral;
    return spec_;
  }

  double mean(int c = 0) const {
    if (c < 0 || c >= comps_) throw IndexError("component out of range");
    return spectral()[static_cast<std::size_t>(c) * grid_.npts()].real();
  }

  Field component(int c) const {
    if (c < 0 || c >= comps_) throw IndexError("component out of range");
    const std::size_t n = grid_.npts();
    const auto& s = spectral();
    return from_spectral(grid_, 1,
                         std::vector<std::complex<double>>(s.begin() + c * n, s.begin() + (c + 1) * n));
  }

  Field& operator+=(const Field& o) { return axpy(1.0, o); }
  Field& operator-=(const Field& o) { return axpy(-1.0, o); }
  Field& operator*=(double a) {
    if (sync_ != Sync::spectral)
      for (auto& v : phys_) v *= a;
    if (sync_ != Sync::physical)
      for (auto& v : spec_) v *= a;
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double a, Field f) { return f *= a; }

  bool same_shape(const Field& o) const { return grid_ == o.grid_ && comps_ == o.comps_; }

 private:
  Field& axpy(double alpha, const Field& o) {
    if (!same_shape(o)) throw ShapeError("field shape mismatch in arithmetic");
    // Prefer whichever representation both operands already have.
    if (sync_ != Sync::spectral && o.sync_ != Sync::spectral) {
      spec_.clear();
      sync_ = Sync::physical;
      for (std::size_t i = 0; i < phys_.size(); ++i) phys_[i] += alpha * o.phys_[i];
    } else {
      ensure_spectral();
      const auto& os = o.spectral();
      phys_.clear();
      sync_ = Sync::spectral;
      for (std::size_t i = 0; i < spec_.size(); ++i) spec_[i] += alpha * os[i];
    }
    return *this;
  }

  void check_finite_physical() const {
    for (double v : phys_)
      if (!std::isfinite(v)) throw NumericalError("non-finite physical value in field");
  }
  void check_finite_spectral() const {
    for (const auto& v : spec_)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw NumericalError("non-finite spectral coefficient in field");
  }

  Grid grid_;
  int comps_ = 1;
  std::vector<double> phys_;
  std::vector<std::complex<double>> spec_;
  Sync sync_ = Sync::physical;
};

inline Field to_spectral(Field f) {
  f.ensure_spectral();
  return f;
}

inline Field to_physical(Field f) {
  f.ensure_physical();
  return f;
}

}  // namespace cnspec

#endif  // CNSPEC_FIELD_HPP_
