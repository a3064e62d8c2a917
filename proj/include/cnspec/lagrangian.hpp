#ifndef CNSPEC_LAGRANGIAN_HPP_
#define CNSPEC_LAGRANGIAN_HPP_

#include <array>
#include <cmath>
#include <memory>
#include <vector>

#include "cnspec/besov.hpp"
#include "cnspec/errors.hpp"
#include "cnspec/field.hpp"
#include "cnspec/interp.hpp"
#include "cnspec/pde.hpp"
#include "cnspec/spectral_ops.hpp"
#include "cnspec/trajectory.hpp"

namespace cnspec {

namespace detail {

/// det(I + G) at one grid point, with G the displacement gradient stored as
/// row-major d x d entries.
inline double jac_det(const double* G, int d) {
  if (d == 1) return 1.0 + G[0];
  if (d == 2) return (1.0 + G[0]) * (1.0 + G[3]) - G[1] * G[2];
  const double a = 1.0 + G[0], b = G[1], c = G[2];
  const double e = G[3], f = 1.0 + G[4], h = G[5];
  const double i = G[6], j = G[7], k = 1.0 + G[8];
  return a * (f * k - h * j) - b * (e * k - h * i) + c * (e * j - f * i);
}

}  // namespace detail

/// Particle flow map X(t, y), stored as periodic displacement fields
/// D(t, y) = X(t, y) - y so the map survives torus wrap-around.
class FlowMap {
 public:
  FlowMap(Grid g) : grid_(g) {}

  void append(double t, Field disp) {
    if (disp.grid() != grid_ || disp.components() != grid_.dim)
      throw ShapeError("flow displacement must be a d-component field on the flow grid");
    if (!times_.empty() && t <= times_.back()) throw DataError("flow times must strictly increase");
    if (times_.empty() && (t != 0.0 || lp_norm(disp, kInfExponent) > 1e-14))
      throw DataError("flows start from the identity at t = 0");
    if (min_jacobian(disp) <= 0.0)
      throw DiffeoError("flow map lost invertibility at t = " + std::to_string(t));
    times_.push_back(t);
    disp_.push_back(std::move(disp));
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return times_.size(); }
  double time(std::size_t i) const { return times_.at(i); }
  const std::vector<double>& times() const { return times_; }
  const Field& displacement(std::size_t i) const { return disp_.at(i); }

  /// Particle positions X(t_i, y) for every grid point y.
  std::vector<std::array<double, 3>> positions(std::size_t i) const {
    const Field& d = disp_.at(i);
    const auto& dv = d.physical();
    const std::size_t n = grid_.npts();
    std::vector<std::array<double, 3>> p(n);
    for (std::size_t q = 0; q < n; ++q) {
      p[q] = grid_.coords(q);
      for (int ax = 0; ax < grid_.dim; ++ax) p[q][ax] += dv[ax * n + q];
    }
    return p;
  }

  /// min over the grid of det grad X at time level i (spectral gradient).
  double min_jacobian(std::size_t i) const { return min_jacobian(disp_.at(i)); }

  double min_jacobian(const Field& disp) const {
    const int d = grid_.dim;
    const std::size_t n = grid_.npts();
    std::vector<std::vector<double>> grads;
    for (int c = 0; c < d; ++c) {
      const Field gc = gradient(disp.component(c));
      grads.push_back(gc.physical());
    }
    double mn = 1e300;
    double G[9];
    for (std::size_t q = 0; q < n; ++q) {
      for (int c = 0; c < d; ++c)
        for (int ax = 0; ax < d; ++ax) G[c * d + ax] = grads[c][ax * n + q];
      mn = std::min(mn, detail::jac_det(G, d));
    }
    return mn;
  }

 private:
  Grid grid_;
  std::vector<double> times_;
  std::vector<Field> disp_;
};

/// Integrate X(t,y) = y + int_0^t u(tau, X(tau,y)) dtau by forward RK4 over
/// the velocity sample times (substeps per interval for accuracy); one level
/// is stored per velocity sample.
inline FlowMap integrate_flow(const FieldTrajectory& u, int substeps = 1,
                              int velocity_stencil = 6, double steady_horizon = 0.0) {
  if (u.empty()) throw DataError("cannot integrate an empty velocity trajectory");
  if (substeps < 1) throw DomainError("substeps must be >= 1");
  const Grid& g = u.state(0).grid();
  const int d = g.dim;
  const std::size_t n = g.npts();
  detail::SampledVelocity vel(u, velocity_stencil);

  FlowMap flow(g);
  flow.append(0.0, Field(g, d));
  std::vector<std::array<double, 3>> pos(n);
  for (std::size_t q = 0; q < n; ++q) pos[q] = g.coords(q);

  const std::size_t levels = std::max<std::size_t>(u.size(), 2);
  for (std::size_t lv = 1; lv < levels; ++lv) {
    const double ta = (u.size() > 1) ? u.time(lv - 1) : 0.0;
    const double tb = (u.size() > 1) ? u.time(lv) : steady_horizon;
    if (u.size() == 1 && tb <= 0.0)
      throw DataError("steady flow integration needs a positive steady_horizon");
    const double h = (tb - ta) / substeps;
    std::array<double, 3> k1{}, k2{}, k3{}, k4{}, y{};
    for (int s = 0; s < substeps; ++s) {
      const double t0 = ta + s * h, tm = t0 + 0.5 * h, t1 = t0 + h;
      for (std::size_t q = 0; q < n; ++q) {
        auto& x = pos[q];
        vel(t0, x, k1.data());
        for (int ax = 0; ax < d; ++ax) y[ax] = x[ax] + 0.5 * h * k1[ax];
        vel(tm, y, k2.data());
        for (int ax = 0; ax < d; ++ax) y[ax] = x[ax] + 0.5 * h * k2[ax];
        vel(tm, y, k3.data());
        for (int ax = 0; ax < d; ++ax) y[ax] = x[ax] + h * k3[ax];
        vel(t1, y, k4.data());
        for (int ax = 0; ax < d; ++ax)
          x[ax] += h / 6.0 * (k1[ax] + 2.0 * k2[ax] + 2.0 * k3[ax] + k4[ax]);
      }
    }
    std::vector<double> disp(static_cast<std::size_t>(d) * n);
    for (std::size_t q = 0; q < n; ++q) {
      const auto c = g.coords(q);
      for (int ax = 0; ax < d; ++ax) disp[ax * n + q] = pos[q][ax] - c[ax];
    }
    flow.append(tb, Field::from_physical(g, d, std::move(disp)));
  }
  return flow;
}

/// Composition f(X(y)) by high-order Lagrange interpolation on a zero-padded
/// fine grid (spectral upsampling, valid for the periodic band-limited fields
/// produced by the solvers).
inline Field compose_at(const Field& f, const std::vector<std::array<double, 3>>& pos,
                        int stencil = 12, int upsample = 4) {
  const Grid& g = f.grid();
  const std::size_t n = g.npts();
  if (pos.size() != n) throw ShapeError("position list does not match the grid");
  LagrangeInterpolant it(f, stencil, upsample);
  std::vector<double> out(static_cast<std::size_t>(f.components()) * n);
  for (int c = 0; c < f.components(); ++c)
    for (std::size_t q = 0; q < n; ++q) out[c * n + q] = it.eval(c, pos[q]);
  return Field::from_physical(g, f.components(), std::move(out));
}

/// Grid positions of the inverse map X^{-1} at flow level i: the y with
/// X(y) = x, found by Newton iteration warm-started from `warm` (or from the
/// first-order guess x - D(x)).
inline std::vector<std::array<double, 3>> invert_flow(
    const FlowMap& flow, std::size_t i, const std::vector<std::array<double, 3>>* warm = nullptr,
    int stencil = 12, int upsample = 4) {
  const Grid& g = flow.grid();
  const int d = g.dim;
  const std::size_t n = g.npts();
  const Field& disp = flow.displacement(i);
  LagrangeInterpolant di(disp, stencil, upsample);
  std::vector<std::unique_ptr<LagrangeInterpolant>> gi;  // row-major grad D
  for (int c = 0; c < d; ++c) {
    const Field gc = gradient(disp.component(c));
    gi.push_back(std::make_unique<LagrangeInterpolant>(gc, stencil, upsample));
  }
  std::vector<std::array<double, 3>> inv(n);
  const auto& dv = disp.physical();
  for (std::size_t q = 0; q < n; ++q) {
    const auto x = g.coords(q);
    std::array<double, 3> y{};
    if (warm) {
      y = (*warm)[q];
    } else {
      y = x;
      for (int ax = 0; ax < d; ++ax) y[ax] -= dv[ax * n + q];
    }
    bool done = false;
    for (int it = 0; it < 50; ++it) {
      // residual r = y + D(y) - x and Jacobian J = I + grad D(y)
      double r[3], J[9];
      double rn = 0.0;
      for (int ax = 0; ax < d; ++ax) {
        r[ax] = y[ax] + di.eval(ax, y) - x[ax];
        // compare on the torus: wrap the residual to (-L/2, L/2]
        r[ax] -= g.length * std::round(r[ax] / g.length);
        rn = std::max(rn, std::abs(r[ax]));
      }
      if (rn < 1e-12) {
        done = true;
        break;
      }
      for (int c = 0; c < d; ++c)
        for (int ax = 0; ax < d; ++ax) J[c * d + ax] = (c == ax ? 1.0 : 0.0) + gi[c]->eval(ax, y);
      // solve J s = r by Gaussian elimination (d <= 3)
      double s[3] = {0.0, 0.0, 0.0};
      if (d == 1) {
        if (J[0] == 0.0) throw DiffeoError("singular Jacobian in flow inversion");
        s[0] = r[0] / J[0];
      } else if (d == 2) {
        const double det = J[0] * J[3] - J[1] * J[2];
        if (det == 0.0) throw DiffeoError("singular Jacobian in flow inversion");
        s[0] = (J[3] * r[0] - J[1] * r[1]) / det;
        s[1] = (-J[2] * r[0] + J[0] * r[1]) / det;
      } else {
        const double Gm[9] = {J[0] - 1.0, J[1], J[2], J[3], J[4] - 1.0,
                              J[5],       J[6], J[7], J[8] - 1.0};
        const double det = detail::jac_det(Gm, 3);
        if (det == 0.0) throw DiffeoError("singular Jacobian in flow inversion");
        const double c00 = J[4] * J[8] - J[5] * J[7], c01 = J[2] * J[7] - J[1] * J[8],
                     c02 = J[1] * J[5] - J[2] * J[4];
        const double c10 = J[5] * J[6] - J[3] * J[8], c11 = J[0] * J[8] - J[2] * J[6],
                     c12 = J[2] * J[3] - J[0] * J[5];
        const double c20 = J[3] * J[7] - J[4] * J[6], c21 = J[1] * J[6] - J[0] * J[7],
                     c22 = J[0] * J[4] - J[1] * J[3];
        s[0] = (c00 * r[0] + c01 * r[1] + c02 * r[2]) / det;
        s[1] = (c10 * r[0] + c11 * r[1] + c12 * r[2]) / det;
        s[2] = (c20 * r[0] + c21 * r[1] + c22 * r[2]) / det;
      }
      for (int ax = 0; ax < d; ++ax) y[ax] -= s[ax];
    }
    if (!done) throw DiffeoError("flow inversion did not converge");
    inv[q] = y;
  }
  return inv;
}

/// Lagrangian form of an Eulerian trajectory: state_i(y) = state_i(X(t_i, y)).
inline CnsTrajectory to_lagrangian(const CnsTrajectory& traj, const FlowMap& flow,
                                   int stencil = 12, int upsample = 4) {
  if (traj.size() != flow.size()) throw ShapeError("trajectory and flow time grids differ");
  CnsTrajectory out;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (std::abs(traj.time(i) - flow.time(i)) > 1e-12)
      throw ShapeError("trajectory and flow time grids differ");
    const auto pos = flow.positions(i);
    out.append(traj.time(i), CnsState(compose_at(traj.a().state(i), pos, stencil, upsample),
                                      compose_at(traj.u().state(i), pos, stencil, upsample)));
  }
  return out;
}

/// Inverse change of coordinates: state_i(x) = state_i(X^{-1}(t_i, x)).
inline CnsTrajectory from_lagrangian(const CnsTrajectory& traj, const FlowMap& flow,
                                     int stencil = 12, int upsample = 4) {
  if (traj.size() != flow.size()) throw ShapeError("trajectory and flow time grids differ");
  CnsTrajectory out;
  std::vector<std::array<double, 3>> warm;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (std::abs(traj.time(i) - flow.time(i)) > 1e-12)
      throw ShapeError("trajectory and flow time grids differ");
    const auto inv = invert_flow(flow, i, warm.empty() ? nullptr : &warm, stencil, upsample);
    out.append(traj.time(i), CnsState(compose_at(traj.a().state(i), inv, stencil, upsample),
                                      compose_at(traj.u().state(i), inv, stencil, upsample)));
    warm = inv;
  }
  return out;
}

/// Measured quantities of the Lagrangian difference argument comparing a
/// reference solution (t1) against a perturbed one (t2).
struct LagrangianDifference {
  double data_diff = 0.0;      // ||(a2_0 - a1_0, u2_0 - u1_0)||_{X_p}
  double lag_zp = 0.0;         // Z_p(T) distance of the Lagrangian trajectories
  double lag_l1linf = 0.0;     // L1_T Linf of ubar2 - ubar1
  double lag_l2b = 0.0;        // sqrt(T) L2_T B^{d/p} of ubar2 - ubar1
  double interp_bound = 0.0;   // sqrt(T) (Linf_T B^{-1+d/p})^{1/2} (L1_T B^{1+d/p})^{1/2}
  double euler_l1linf = 0.0;   // L1_T Linf of u2 - u1
  double flow_lhs = 0.0;       // L1_T Linf of u2(X1) - u2(X2)
  double flow_rhs = 0.0;       // L1_T ||grad u2||_{B^{d/p}} * Linf_T Linf of X2 - X1
  double flow_gap = 0.0;       // Linf_T Linf of X2 - X1
};

inline LagrangianDifference lagrangian_difference(const CnsTrajectory& t1, const CnsTrajectory& t2,
                                                  double p, int flow_substeps = 1) {
  if (t1.empty() || t2.empty()) throw DataError("empty trajectory in lagrangian_difference");
  if (t1.size() != t2.size()) throw ShapeError("trajectories have different time grids");
  const Grid& g = t1.a().state(0).grid();
  const int d = g.dim;
  const double T = t1.horizon();
  const std::size_t n = g.npts();
  const std::size_t nt = t1.size();

  LagrangianDifference rep;
  rep.data_diff = xp_norm(t2.a().state(0) - t1.a().state(0), t2.u().state(0) - t1.u().state(0), p);

  FlowMap X1 = integrate_flow(t1.u(), flow_substeps);
  FlowMap X2 = integrate_flow(t2.u(), flow_substeps);

  CnsTrajectory bar1 = to_lagrangian(t1, X1);
  CnsTrajectory bar2 = to_lagrangian(t2, X2);

  // Z_p distance of the Lagrangian trajectories
  CnsTrajectory lagdiff;
  for (std::size_t i = 0; i < nt; ++i)
    lagdiff.append(t1.time(i), CnsState(bar2.a().state(i) - bar1.a().state(i),
                                        bar2.u().state(i) - bar1.u().state(i)));
  rep.lag_zp = zp_norm(lagdiff, p);

  const BesovIndex mid(d / p, p, 1.0);
  std::vector<double> linf_lag(nt), bmid(nt), linf_euler(nt), flow_pt(nt), gradu2(nt);
  double flow_gap = 0.0;
  for (std::size_t i = 0; i < nt; ++i) {
    const Field du_bar = bar2.u().state(i) - bar1.u().state(i);
    linf_lag[i] = lp_norm(du_bar, kInfExponent);
    bmid[i] = besov_norm(du_bar, mid);
    linf_euler[i] = lp_norm(t2.u().state(i) - t1.u().state(i), kInfExponent);
    // flow comparison: u2 composed with both flows
    const Field u2X1 = compose_at(t2.u().state(i), X1.positions(i));
    const Field u2X2 = compose_at(t2.u().state(i), X2.positions(i));
    flow_pt[i] = lp_norm(u2X1 - u2X2, kInfExponent);
    double gn = 0.0;
    for (int c = 0; c < d; ++c) gn += besov_norm(gradient(t2.u().state(i).component(c)), mid);
    gradu2[i] = gn;
    // sup-distance of the flows themselves
    const Field dd = X2.displacement(i) - X1.displacement(i);
    const auto& ddv = dd.physical();
    for (std::size_t q = 0; q < n; ++q) {
      double r2 = 0.0;
      for (int ax = 0; ax < d; ++ax) {
        const double e = ddv[ax * n + q];
        r2 += e * e;
      }
      flow_gap = std::max(flow_gap, std::sqrt(r2));
    }
  }
  const auto& ts = t1.a().times();
  rep.lag_l1linf = detail::time_lq(ts, linf_lag, 1.0);
  rep.lag_l2b = std::sqrt(T) * detail::time_lq(ts, bmid, 2.0);
  const double sup_lo = spacetime_norm(lagdiff.u(), BesovIndex(-1.0 + d / p, p, 1.0),
                                       TimeNormSpec(kInfExponent, T, false));
  const double l1_hi =
      spacetime_norm(lagdiff.u(), BesovIndex(1.0 + d / p, p, 1.0), TimeNormSpec(1.0, T, false));
  rep.interp_bound = std::sqrt(T) * std::sqrt(sup_lo) * std::sqrt(l1_hi);
  rep.euler_l1linf = detail::time_lq(ts, linf_euler, 1.0);
  rep.flow_lhs = detail::time_lq(ts, flow_pt, 1.0);
  rep.flow_gap = flow_gap;
  rep.flow_rhs = detail::time_lq(ts, gradu2, 1.0) * flow_gap;
  return rep;
}

}  // namespace cnspec

#endif  // CNSPEC_LAGRANGIAN_HPP_
