#ifndef CNSPEC_TRAJECTORY_HPP_
#define CNSPEC_TRAJECTORY_HPP_

#include <cmath>
#include <map>
#include <vector>

#include "cnspec/besov.hpp"
#include "cnspec/envelope.hpp"
#include "cnspec/errors.hpp"
#include "cnspec/field.hpp"

namespace cnspec {

struct TimeNormSpec {
  double q = 1.0;
  double T = 1.0;
  bool tilde = false;

  TimeNormSpec() = default;
  TimeNormSpec(double q_, double T_, bool tilde_ = false) : q(q_), T(T_), tilde(tilde_) {
    if (q < 1.0 || T <= 0.0) throw DomainError("time norm needs q >= 1 and T > 0");
  }
};

namespace detail {

/// Trapezoid L^q norm of sampled |v(t)| over the sample times (max for q = inf).
inline double time_lq(const std::vector<double>& t, const std::vector<double>& v, double q) {
  if (t.empty()) throw DataError("empty time series");
  if (std::isinf(q)) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i)
    acc += 0.5 * (t[i + 1] - t[i]) * (std::pow(std::abs(v[i]), q) + std::pow(std::abs(v[i + 1]), q));
  return std::pow(acc, 1.0 / q);
}

}  // namespace detail

/// Time-stamped sequence of fields with cached per-state block norms.
class FieldTrajectory {
 public:
  FieldTrajectory() = default;

  void append(double t, Field f) {
    if (!times_.empty() && t <= times_.back()) throw DataError("timestamps must strictly increase");
    if (times_.empty() && t != 0.0) throw DataError("trajectories start at t = 0");
    times_.push_back(t);
    states_.push_back(std::move(f));
    cache_.emplace_back();
  }

  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }
  double time(std::size_t i) const { return times_.at(i); }
  const std::vector<double>& times() const { return times_; }
  const Field& state(std::size_t i) const { return states_.at(i); }
  const Field& back() const { return states_.back(); }
  double horizon() const { return times_.empty() ? 0.0 : times_.back(); }

  const NormSeries& norms(std::size_t i, double p) const {
    auto& slot = cache_.at(i);
    auto it = slot.find(p);
    if (it == slot.end()) it = slot.emplace(p, block_norms(states_[i], p)).first;
    return it->second;
  }

 private:
  std::vector<double> times_;
  std::vector<Field> states_;
  mutable std::vector<std::map<double, NormSeries>> cache_;
};

/// Space-time Besov norm of a trajectory.  tilde = false: temporal L^q of the
/// per-time Besov norm.  tilde = true: temporal L^q per dyadic block first,
/// then the weighted l^r sum.
inline double spacetime_norm(const FieldTrajectory& traj, const BesovIndex& idx,
                             const TimeNormSpec& spec, const AcceptableWeight* omega = nullptr,
                             BlockCutoff cutoff = BlockCutoff::none, int m0 = 0) {
  if (traj.empty()) throw DataError("space-time norm of an empty trajectory");
  const std::size_t n = traj.size();
  if (!spec.tilde) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
      v[i] = besov_norm(traj.norms(i, idx.p), idx, omega, cutoff, m0);
    return detail::time_lq(traj.times(), v, spec.q);
  }
  // tilde: swap the order
  const auto& first = traj.norms(0, idx.p);
  double acc = 0.0;
  for (const auto& [j, unused] : first.values) {
    if (cutoff == BlockCutoff::at_most && j > m0) continue;
    if (cutoff == BlockCutoff::above && j <= m0) continue;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = traj.norms(i, idx.p).values.at(j);
    const double w = omega ? omega->at(j) : 1.0;
    const double term = w * std::exp2(j * idx.s) * detail::time_lq(traj.times(), v, spec.q);
    if (std::isinf(idx.r))
      acc = std::max(acc, term);
    else
      acc += std::pow(term, idx.r);
  }
  return std::isinf(idx.r) ? acc : std::pow(acc, 1.0 / idx.r);
}

struct CnsState {
  Field a;  // density perturbation rho - 1
  Field u;  // velocity

  CnsState() = default;
  CnsState(Field a_, Field u_) : a(std::move(a_)), u(std::move(u_)) {
    if (a.grid() != u.grid()) throw ShapeError("state fields live on different grids");
    if (a.components() != 1 || u.components() != a.grid().dim)
      throw ShapeError("state must be (scalar a, d-component u)");
  }
};

class CnsTrajectory {
 public:
  void append(double t, CnsState s) {
    a_.append(t, s.a);
    u_.append(t, std::move(s.u));
  }

  std::size_t size() const { return a_.size(); }
  bool empty() const { return a_.empty(); }
  double time(std::size_t i) const { return a_.time(i); }
  double horizon() const { return a_.horizon(); }
  CnsState state(std::size_t i) const { return CnsState(a_.state(i), u_.state(i)); }
  const FieldTrajectory& a() const { return a_; }
  const FieldTrajectory& u() const { return u_; }

 private:
  FieldTrajectory a_;
  FieldTrajectory u_;
};

/// Data-space norm ||(a,u)||_{X_p} = ||a||_{B^{d/p}_{p,1}} + ||u||_{B^{-1+d/p}_{p,1}}.
inline double xp_norm(const Field& a, const Field& u, double p,
                      const AcceptableWeight* omega = nullptr) {
  const int d = a.grid().dim;
  return besov_norm(a, BesovIndex(d / p, p, 1.0), omega) +
         besov_norm(u, BesovIndex(-1.0 + d / p, p, 1.0), omega);
}

/// Solution-space norm ||(a,u)||_{Z_p(T)} = ||a||_{L^inf_T B^{d/p}} +
/// ||u||_{L^inf_T B^{-1+d/p}} + ||u||_{L^1_T B^{1+d/p}}, with optional weight
/// and dyadic truncation.
inline double zp_norm(const CnsTrajectory& traj, double p, const AcceptableWeight* omega = nullptr,
                      BlockCutoff cutoff = BlockCutoff::none, int m0 = 0, bool tilde = true) {
  if (traj.empty()) throw DataError("Z_p norm of an empty trajectory");
  const int d = traj.a().state(0).grid().dim;
  const double T = std::max(traj.horizon(), 1e-300);
  return spacetime_norm(traj.a(), BesovIndex(d / p, p, 1.0), TimeNormSpec(kInfExponent, T, tilde),
                        omega, cutoff, m0) +
         spacetime_norm(traj.u(), BesovIndex(-1.0 + d / p, p, 1.0),
                        TimeNormSpec(kInfExponent, T, tilde), omega, cutoff, m0) +
         spacetime_norm(traj.u(), BesovIndex(1.0 + d / p, p, 1.0), TimeNormSpec(1.0, T, tilde),
                        omega, cutoff, m0);
}

}  // namespace cnspec

#endif  // CNSPEC_TRAJECTORY_HPP_
