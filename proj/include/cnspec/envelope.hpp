#ifndef CNSPEC_ENVELOPE_HPP_
#define CNSPEC_ENVELOPE_HPP_

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "cnspec/errors.hpp"

namespace cnspec {

/// Acceptable frequency weight: omega_i = 1 for i <= 0, nondecreasing, and
/// growing by at most 2^{delta0} per step.  Stored on a finite index range;
/// lookups below the range return 1, lookups above return the last value.
struct AcceptableWeight {
  double delta0 = 0.5;
  std::map<int, double> values;

  double at(int i) const {
    if (values.empty()) return 1.0;
    if (i < values.begin()->first) return 1.0;
    auto it = values.upper_bound(i);
    --it;
    return it->second;
  }

  static AcceptableWeight ones(double delta0 = 0.5) {
    AcceptableWeight w;
    w.delta0 = delta0;
    return w;
  }
};

inline bool validate(const AcceptableWeight& w) {
  if (w.delta0 <= 0.0 || w.delta0 > 1.0) return false;
  const double step = std::exp2(w.delta0);
  double prev = 1.0;  // implicit omega_i = 1 for indices below the stored range
  int previdx = w.values.empty() ? 0 : w.values.begin()->first - 1;
  const double tol = 1e-12;
  for (const auto& [i, v] : w.values) {
    if (i <= 0) {
      if (std::abs(v - 1.0) > tol) return false;
      prev = 1.0;
      previdx = i;
      continue;
    }
    if (v < 1.0 - tol) return false;
    // Gaps in the index set inherit the previous value, so only consecutive
    // indices constrain the growth ratio.
    if (i == previdx + 1 && (v < prev - tol * prev || v > step * prev * (1.0 + tol))) return false;
    if (i > previdx + 1 && (v < prev - tol * prev || v > std::exp2(w.delta0 * (i - previdx)) * prev * (1.0 + tol)))
      return false;
    prev = v;
    previdx = i;
  }
  return true;
}

/// Weight construction from block-mass sequences A^n (each indexed from 0).
/// Finds the greedy minimal strictly monotone N_k with
/// sup_n sum_{i >= N_k} A_i^n < 2^{-k}, then sets omega_i = 2^{k*delta0} on
/// [N_k, N_{k+1}).  The first cut N_1 is floored at 2 so the weight equals 1
/// on the first couple of blocks even for vanishing data.
inline AcceptableWeight build_weight(const std::vector<std::vector<double>>& sequences,
                                     const std::vector<double>& limit, double delta0, int index_top) {
  if (delta0 <= 0.0 || delta0 > 1.0) throw DomainError("delta0 must lie in (0,1]");
  if (sequences.empty()) throw DataError("need at least one block-mass sequence");
  std::size_t len = limit.size();
  for (const auto& s : sequences) len = std::max(len, s.size());
  auto at = [](const std::vector<double>& s, std::size_t i) { return i < s.size() ? s[i] : 0.0; };

  for (const auto& s : sequences)
    for (double v : s)
      if (v < 0.0) throw DataError("block-mass sequences must be nonnegative");

  // l1 convergence to the limit: the family must approach it within tolerance
  // (finite families are expected to contain members arbitrarily close to,
  // typically equal to, the limit).
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : sequences) {
    double d = 0.0;
    for (std::size_t i = 0; i < len; ++i) d += std::abs(at(s, i) - at(limit, i));
    best = std::min(best, d);
  }
  if (best > 1e-10)
    throw ConvergenceError("sequence family does not reach its declared l1 limit (min distance " +
                           std::to_string(best) + ")");

  // Tail sup over the family: tail(i) = sup_n sum_{j >= i} A_j^n.
  std::vector<double> tail(len + 1, 0.0);
  for (const auto& s : sequences) {
    double acc = 0.0;
    std::vector<double> t(len + 1, 0.0);
    for (std::size_t i = len; i-- > 0;) {
      acc += at(s, i);
      t[i] = acc;
    }
    for (std::size_t i = 0; i <= len; ++i) tail[i] = std::max(tail[i], t[i]);
  }

  AcceptableWeight w;
  w.delta0 = delta0;
  int prev_cut = 1;  // enforces N_1 >= 2 via strict monotonicity from 1
  int k = 1;
  for (int i = 0; i <= index_top; ++i) w.values[i] = 1.0;
  while (true) {
    // Smallest strictly monotone N_k with tail(N_k) < 2^{-k}.  The strict
    // inequality gets a relative guard so a finite truncation of a sequence
    // whose exact tail sits on the boundary still lands on the same cut.
    int nk = prev_cut + 1;
    while (nk <= index_top &&
           !(tail[std::min<std::size_t>(nk, len)] <= (1.0 - 1e-9) * std::exp2(-k)))
      ++nk;
    if (nk > index_top) break;
    const double wk = std::exp2(k * delta0);
    for (int i = nk; i <= index_top; ++i) w.values[i] = wk;
    prev_cut = nk;
    ++k;
  }
  return w;
}

/// The greedy cut sequence alone (for inspection/tests).
inline std::vector<int> weight_cuts(const AcceptableWeight& w) {
  std::vector<int> cuts;
  double prev = 1.0;
  for (const auto& [i, v] : w.values) {
    if (v > prev * (1.0 + 1e-12)) cuts.push_back(i);
    prev = v;
  }
  return cuts;
}

/// Smallest stored index N with omega_N >= C4/eps.
inline int tail_cutoff(const AcceptableWeight& w, double C4, double eps) {
  if (eps <= 0.0 || C4 <= 0.0) throw DomainError("tail_cutoff needs positive C4 and eps");
  const double target = C4 / eps;
  if (1.0 >= target) return w.values.empty() ? 0 : w.values.begin()->first;
  for (const auto& [i, v] : w.values)
    if (v >= target) return i;
  throw RangeError("weight never reaches C4/eps = " + std::to_string(target) + " within the resolved range");
}

}  // namespace cnspec

#endif  // CNSPEC_ENVELOPE_HPP_
