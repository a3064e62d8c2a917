#ifndef CNSPEC_BESOV_HPP_
#define CNSPEC_BESOV_HPP_

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cnspec/envelope.hpp"
#include "cnspec/errors.hpp"
#include "cnspec/field.hpp"
#include "cnspec/spectral_ops.hpp"

namespace cnspec {

inline constexpr double kInfExponent = std::numeric_limits<double>::infinity();

/// Grid L^p norm, volume-normalized (the constant field 1 has norm 1 for
/// every p).  Vector fields are measured through the pointwise Euclidean
/// magnitude.  p = infinity gives the max norm.
inline double lp_norm(const Field& f, double p) {
  if (p < 1.0) throw DomainError("L^p norm needs p >= 1");
  const std::size_t n = f.npts();
  const auto& v = f.physical();
  const int nc = f.components();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double m2 = 0.0;
    for (int c = 0; c < nc; ++c) m2 += v[c * n + i] * v[c * n + i];
    const double m = std::sqrt(m2);
    if (std::isinf(p))
      acc = std::max(acc, m);
    else
      acc += std::pow(m, p);
  }
  if (std::isinf(p)) return acc;
  return std::pow(acc / static_cast<double>(n), 1.0 / p);
}

struct BesovIndex {
  double s = 0.0;
  double p = 2.0;
  double r = 1.0;

  BesovIndex() = default;
  BesovIndex(double s_, double p_, double r_) : s(s_), p(p_), r(r_) {
    if (p < 1.0 || r < 1.0) throw DomainError("Besov indices need p, r >= 1");
  }
};

/// Per-block L^p norms { ||Delta_j f||_{L^p} } over the resolved dyadic range.
struct NormSeries {
  double p = 2.0;
  std::map<int, double> values;
};

inline NormSeries block_norms(const Field& f, double p, const CutoffProfile& cut) {
  if (p < 1.0) throw DomainError("block_norms needs p >= 1");
  NormSeries s;
  s.p = p;
  for (int j = cut.j_min; j <= cut.j_max; ++j) s.values[j] = lp_norm(lp_block(f, j, cut), p);
  return s;
}

inline NormSeries block_norms(const Field& f, double p) {
  return block_norms(f, p, CutoffProfile(f.grid()));
}

enum class BlockCutoff { none, at_most, above };

/// Weighted, possibly truncated Besov norm assembled from block norms:
/// l^r aggregation of omega_j 2^{js} ||Delta_j f||_{L^p} over the selected
/// range (j <= m0, j > m0, or everything).
inline double besov_norm(const NormSeries& series, const BesovIndex& idx,
                         const AcceptableWeight* omega = nullptr,
                         BlockCutoff cutoff = BlockCutoff::none, int m0 = 0) {
  if (series.p != idx.p) throw IndexError("NormSeries p does not match BesovIndex p");
  double acc = 0.0;
  for (const auto& [j, bn] : series.values) {
    if (cutoff == BlockCutoff::at_most && j > m0) continue;
    if (cutoff == BlockCutoff::above && j <= m0) continue;
    const double w = omega ? omega->at(j) : 1.0;
    const double term = w * std::exp2(static_cast<double>(j) * idx.s) * bn;
    if (std::isinf(idx.r))
      acc = std::max(acc, term);
    else
      acc += std::pow(term, idx.r);
  }
  if (std::isinf(idx.r)) return acc;
  return std::pow(acc, 1.0 / idx.r);
}

inline double besov_norm(const Field& f, const BesovIndex& idx,
                         const AcceptableWeight* omega = nullptr,
                         BlockCutoff cutoff = BlockCutoff::none, int m0 = 0) {
  return besov_norm(block_norms(f, idx.p), idx, omega, cutoff, m0);
}

enum class BernsteinMode { ball, annulus };

namespace detail {

/// Frobenius norm over the order-k derivative tensor, as a scalar field.
inline Field deriv_magnitude(const Field& f, int order) {
  const std::size_t n = f.npts();
  std::vector<Field> current{f};
  for (int o = 0; o < order; ++o) {
    std::vector<Field> next;
    for (const auto& g : current)
      for (int ax = 0; ax < f.grid().dim; ++ax) next.push_back(partial(g, ax));
    current = std::move(next);
  }
  std::vector<double> mag(static_cast<std::size_t>(f.components()) * n, 0.0);
  for (const auto& g : current) {
    const auto& v = g.physical();
    for (std::size_t i = 0; i < mag.size(); ++i) mag[i] += v[i] * v[i];
  }
  for (auto& v : mag) v = std::sqrt(v);
  return Field::from_physical(f.grid(), f.components(), std::move(mag));
}

inline double spectral_mass_outside(const Field& f, double rlo, double rhi) {
  const Grid& g = f.grid();
  const std::size_t n = g.npts();
  const auto& s = f.spectral();
  double out = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double k = g.kmag(i) / g.wavenumber_unit();
    if (k >= rlo && k <= rhi) continue;
    for (int c = 0; c < f.components(); ++c) out += std::norm(s[c * n + i]);
  }
  return std::sqrt(out);
}

}  // namespace detail

/// Bernstein ratio ||D^k f||_{L^q} / (lambda^{k + d(1/p - 1/q)} ||f||_{L^p})
/// for f supported in the ball |k| <= lambda (mode ball) or the annulus
/// lambda/2 <= |k| <= 2 lambda (mode annulus).
inline double bernstein_ratio(const Field& f, int k, double p, double q, BernsteinMode mode,
                              double lambda) {
  if (q < p) throw DomainError("Bernstein needs q >= p");
  if (k < 0 || lambda <= 0.0) throw DomainError("Bernstein needs k >= 0 and lambda > 0");
  const double base = lp_norm(f, p);
  if (base == 0.0) throw PreconditionError("Bernstein ratio undefined for the zero field");
  const double rlo = mode == BernsteinMode::ball ? 0.0 : lambda / 2.0;
  const double rhi = mode == BernsteinMode::ball ? lambda : 2.0 * lambda;
  const double leak = detail::spectral_mass_outside(f, rlo, rhi);
  if (leak > 1e-10 * base)
    throw PreconditionError("field is not band-limited to the claimed region (leak " +
                            std::to_string(leak) + ")");
  const int d = f.grid().dim;
  const double qi = std::isinf(q) ? 0.0 : 1.0 / q;
  const double scale = std::pow(lambda, k + d * (1.0 / p - qi));
  return lp_norm(detail::deriv_magnitude(f, k), q) / (scale * base);
}

}  // namespace cnspec

#endif  // CNSPEC_BESOV_HPP_
