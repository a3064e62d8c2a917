#ifndef CNSPEC_PDE_HPP_
#define CNSPEC_PDE_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "cnspec/besov.hpp"
#include "cnspec/errors.hpp"
#include "cnspec/field.hpp"
#include "cnspec/interp.hpp"
#include "cnspec/paraproduct.hpp"
#include "cnspec/spectral_ops.hpp"
#include "cnspec/trajectory.hpp"

namespace cnspec {

/// Barotropic pressure law, normalized so P'(1) = 1.  G is the enthalpy-type
/// primitive with G'(a) = P'(1+a)/(1+a), G(0) = 0, and I(a) = a/(1+a).
struct PressureLaw {
  std::function<double(double)> P;   // P(rho)
  std::function<double(double)> dP;  // P'(rho)
  std::function<double(double)> G;   // G(a)

  static PressureLaw quadratic() {
    PressureLaw law;
    law.P = [](double rho) { return 0.5 * rho * rho; };
    law.dP = [](double rho) { return rho; };
    law.G = [](double a) { return a; };
    return law;
  }

  static PressureLaw gamma_law(double gamma) {
    if (gamma <= 0.0) throw DomainError("gamma law needs gamma > 0");
    PressureLaw law;
    law.P = [gamma](double rho) { return std::pow(rho, gamma) / gamma; };
    law.dP = [gamma](double rho) { return std::pow(rho, gamma - 1.0); };
    if (std::abs(gamma - 1.0) < 1e-14)
      law.G = [](double a) { return std::log1p(a); };
    else
      law.G = [gamma](double a) { return (std::pow(1.0 + a, gamma - 1.0) - 1.0) / (gamma - 1.0); };
    return law;
  }

  void check() const {
    if (std::abs(dP(1.0) - 1.0) > 1e-12) throw PreconditionError("pressure law must satisfy P'(1) = 1");
    if (std::abs(G(0.0)) > 1e-12) throw PreconditionError("G(0) must vanish");
  }
};

inline double I_of(double a) { return a / (1.0 + a); }

struct Viscosity {
  double mu = 1.0;
  double lambda = 0.0;

  void check() const {
    if (mu <= 0.0) throw EllipticityError("need mu > 0");
    if (2.0 * mu + lambda <= 0.0) throw EllipticityError("need 2 mu + lambda > 0");
  }
};

namespace detail {

inline double phi1(double z) {
  if (std::abs(z) < 1e-5) return 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0;
  return std::expm1(z) / z;
}

inline double phi2(double z) {
  if (std::abs(z) < 1e-5) return 0.5 + z / 6.0 + z * z / 24.0 + z * z * z / 120.0;
  return (std::expm1(z) - z) / (z * z);
}

/// Apply g(dt * A) for the Lame operator A = mu Lap + (mu+lambda) grad div.
/// A is diagonal after the Helmholtz split: eigenvalue -mu |k|^2 on the
/// transverse part and -(2mu+lambda)|k|^2 on the longitudinal part.
inline Field apply_lame_function(const Field& u, const Viscosity& nu, double dt,
                                 const std::function<double(double)>& g) {
  const Grid& gr = u.grid();
  const std::size_t n = gr.npts();
  const int d = gr.dim;
  std::vector<std::complex<double>> out(u.spectral());
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = gr.wavevector(i);
    double k2 = 0.0;
    for (int ax = 0; ax < d; ++ax) k2 += k[ax] * k[ax];
    const double gperp = g(-nu.mu * k2 * dt);
    if (k2 == 0.0) {
      for (int ax = 0; ax < d; ++ax) out[ax * n + i] *= gperp;
      continue;
    }
    const double gpar = g(-(2.0 * nu.mu + nu.lambda) * k2 * dt);
    std::complex<double> kdotu(0.0, 0.0);
    for (int ax = 0; ax < d; ++ax) kdotu += k[ax] * out[ax * n + i];
    for (int ax = 0; ax < d; ++ax) {
      const std::complex<double> par = (k[ax] / k2) * kdotu;
      out[ax * n + i] = gperp * (out[ax * n + i] - par) + gpar * par;
    }
  }
  return Field::from_spectral(gr, u.components(), std::move(out));
}

/// Scalar heat version: g(-mu |k|^2 dt) on every component.
inline Field apply_heat_function(const Field& u, double mu, double dt,
                                 const std::function<double(double)>& g) {
  return radial_multiplier(u, [&](double km) {
    const double kp = km * u.grid().wavenumber_unit();
    return g(-mu * kp * kp * dt);
  });
}

}  // namespace detail

using Forcing = std::function<Field(double)>;

/// Heat equation u_t - mu Lap u = f by per-mode integrating factor with
/// trapezoidal exponential-time-differencing for the forcing (exact for
/// forcing linear in t per mode).
inline FieldTrajectory heat_solve(const Field& u0, const Forcing& f, double mu, double T, double dt,
                                  int store_every = 1) {
  if (mu <= 0.0) throw EllipticityError("heat solve needs mu > 0");
  if (dt <= 0.0 || T <= 0.0 || dt > T + 1e-15) throw DomainError("need 0 < dt <= T");
  const int steps = static_cast<int>(std::ceil(T / dt - 1e-12));
  const double h = T / steps;
  FieldTrajectory traj;
  traj.append(0.0, u0);
  Field u = u0;
  Field fn = f ? f(0.0) : Field(u0.grid(), u0.components());
  auto e = [](double z) { return std::exp(z); };
  for (int s = 0; s < steps; ++s) {
    const double t1 = (s + 1) * h;
    Field un = detail::apply_heat_function(u, mu, h, e);
    if (f) {
      Field fn1 = f(t1);
      Field mix = detail::apply_heat_function(
          fn, mu, h, [&](double z) { return detail::phi1(z) - detail::phi2(z); });
      mix += detail::apply_heat_function(fn1, mu, h, detail::phi2);
      un += h * mix;
      fn = std::move(fn1);
    }
    u = std::move(un);
    if ((s + 1) % store_every == 0 || s + 1 == steps) traj.append(t1, u);
  }
  return traj;
}

/// Lame system u_t - A u = f via the Helmholtz split (transverse coefficient
/// mu, longitudinal coefficient 2 mu + lambda).
inline FieldTrajectory lame_solve(const Field& u0, const Forcing& f, const Viscosity& nu, double T,
                                  double dt, int store_every = 1) {
  nu.check();
  if (u0.components() != u0.grid().dim) throw ShapeError("Lame solve expects a vector field");
  if (dt <= 0.0 || T <= 0.0 || dt > T + 1e-15) throw DomainError("need 0 < dt <= T");
  const int steps = static_cast<int>(std::ceil(T / dt - 1e-12));
  const double h = T / steps;
  FieldTrajectory traj;
  traj.append(0.0, u0);
  Field u = u0;
  Field fn = f ? f(0.0) : Field(u0.grid(), u0.components());
  auto e = [](double z) { return std::exp(z); };
  for (int s = 0; s < steps; ++s) {
    const double t1 = (s + 1) * h;
    Field un = detail::apply_lame_function(u, nu, h, e);
    if (f) {
      Field fn1 = f(t1);
      Field mix = detail::apply_lame_function(
          fn, nu, h, [&](double z) { return detail::phi1(z) - detail::phi2(z); });
      mix += detail::apply_lame_function(fn1, nu, h, detail::phi2);
      un += h * mix;
      fn = std::move(fn1);
    }
    u = std::move(un);
    if ((s + 1) % store_every == 0 || s + 1 == steps) traj.append(t1, u);
  }
  return traj;
}

namespace detail {

/// Backward RK4 characteristic feet for every grid point, integrating
/// dX/dtau = v(tau, X) from t1 down to t0.
template <typename VelocityEval>
std::vector<std::array<double, 3>> departure_points(const Grid& g, const VelocityEval& vel,
                                                    double t0, double t1) {
  const double h = t1 - t0;
  const double tm = 0.5 * (t0 + t1);
  const std::size_t n = g.npts();
  std::vector<std::array<double, 3>> dep(n);
  std::array<double, 3> k1{}, k2{}, k3{}, k4{}, y{};
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = g.coords(i);
    vel(t1, x, k1.data());
    for (int ax = 0; ax < g.dim; ++ax) y[ax] = x[ax] - 0.5 * h * k1[ax];
    vel(tm, y, k2.data());
    for (int ax = 0; ax < g.dim; ++ax) y[ax] = x[ax] - 0.5 * h * k2[ax];
    vel(tm, y, k3.data());
    for (int ax = 0; ax < g.dim; ++ax) y[ax] = x[ax] - h * k3[ax];
    vel(t0, y, k4.data());
    for (int ax = 0; ax < g.dim; ++ax)
      dep[i][ax] = x[ax] - h / 6.0 * (k1[ax] + 2.0 * k2[ax] + 2.0 * k3[ax] + k4[ax]);
  }
  return dep;
}

inline double max_speed(const Field& v) { return lp_norm(v, kInfExponent); }

/// Space-time velocity evaluation from a sampled trajectory: lazy per-sample
/// Lagrange interpolants, linear interpolation in time between samples.
class SampledVelocity {
 public:
  SampledVelocity(const FieldTrajectory& v, int stencil) : v_(v), stencil_(stencil) {
    if (v.empty()) throw DataError("empty velocity trajectory");
    it_.resize(v.size());
  }

  int dim() const { return v_.state(0).grid().dim; }

  void operator()(double t, const std::array<double, 3>& x, double* out) const {
    const int d = dim();
    const auto& times = v_.times();
    if (v_.size() == 1 || t <= times.front()) {
      for (int ax = 0; ax < d; ++ax) out[ax] = interp(0).eval(ax, x);
      return;
    }
    std::size_t hi = std::lower_bound(times.begin(), times.end(), t) - times.begin();
    if (hi >= times.size()) hi = times.size() - 1;
    if (hi == 0) hi = 1;
    const double w = (t - times[hi - 1]) / (times[hi] - times[hi - 1]);
    for (int ax = 0; ax < d; ++ax)
      out[ax] = (1.0 - w) * interp(hi - 1).eval(ax, x) + w * interp(hi).eval(ax, x);
  }

 private:
  const LagrangeInterpolant& interp(std::size_t s) const {
    if (!it_[s]) it_[s] = std::make_unique<LagrangeInterpolant>(v_.state(s), stencil_);
    return *it_[s];
  }

  const FieldTrajectory& v_;
  int stencil_;
  mutable std::vector<std::unique_ptr<LagrangeInterpolant>> it_;
};

}  // namespace detail

struct TransportOptions {
  int field_stencil = 12;
  int velocity_stencil = 6;
  int store_every = 1;
  double cfl = 0.5;
  int max_substeps = 4096;
};

/// Damped transport a_t + v . grad a + lambda a = f by semi-Lagrangian
/// backward characteristics: exact e^{-lambda dt} damping, RK4 feet, local
/// Lagrange interpolation, trapezoidal source quadrature along the foot.
/// The velocity trajectory is interpolated linearly in time between samples.
inline FieldTrajectory transport_solve(const Field& a0, const FieldTrajectory& v, const Forcing& f,
                                       double lambda, double T, double dt,
                                       const TransportOptions& opt = {}) {
  if (lambda < 0.0) throw DomainError("damping coefficient must be >= 0");
  if (dt <= 0.0 || T <= 0.0 || dt > T + 1e-15) throw DomainError("need 0 < dt <= T");
  if (v.empty()) throw DataError("empty velocity trajectory");
  if (v.horizon() < T - 1e-12 && v.size() > 1)
    throw DataError("velocity trajectory does not span the solve horizon");
  const Grid& g = a0.grid();

  detail::SampledVelocity vel(v, opt.velocity_stencil);

  const int steps = static_cast<int>(std::ceil(T / dt - 1e-12));
  const double h_macro = T / steps;
  FieldTrajectory traj;
  traj.append(0.0, a0);
  Field a = a0;
  const std::size_t n = g.npts();
  for (int s = 0; s < steps; ++s) {
    const double t0 = s * h_macro;
    // CFL-driven substepping within the macro step
    const double vmax = detail::max_speed(v.state(std::min<std::size_t>(s, v.size() - 1)));
    int sub = 1;
    while (h_macro / sub * vmax / g.spacing() > opt.cfl && sub < opt.max_substeps) sub *= 2;
    if (h_macro / sub * vmax / g.spacing() > opt.cfl)
      throw StepRejected("characteristic CFL bound unreachable after halving dt " +
                         std::to_string(opt.max_substeps) + " times");
    const double h = h_macro / sub;
    for (int q = 0; q < sub; ++q) {
      const double ta = t0 + q * h, tb = t0 + (q + 1) * h;
      auto dep = detail::departure_points(g, vel, ta, tb);
      LagrangeInterpolant ai(a, opt.field_stencil);
      const double damp = std::exp(-lambda * h);
      std::vector<double> next(n);
      if (f) {
        Field fa = f(ta), fb = f(tb);
        LagrangeInterpolant fi(fa, opt.field_stencil);
        const auto& fbv = fb.physical();
        for (std::size_t i = 0; i < n; ++i)
          next[i] = damp * (ai.eval(0, dep[i]) + 0.5 * h * fi.eval(0, dep[i])) + 0.5 * h * fbv[i];
      } else {
        for (std::size_t i = 0; i < n; ++i) next[i] = damp * ai.eval(0, dep[i]);
      }
      a = Field::from_physical(g, 1, std::move(next));
    }
    if ((s + 1) % opt.store_every == 0 || s + 1 == steps) traj.append(t0 + h_macro, a);
  }
  return traj;
}

/// Commutator [v . grad, Delta_j] a = v . grad(Delta_j a) - Delta_j(v . grad a).
inline Field commutator(const Field& v, const Field& a, int j, const CutoffProfile& cut) {
  if (v.grid() != a.grid()) throw ShapeError("grid mismatch in commutator");
  return advect(v, lp_block(a, j, cut)) - lp_block(advect(v, a), j, cut);
}

inline Field commutator(const Field& v, const Field& a, int j) {
  return commutator(v, a, j, CutoffProfile(v.grid()));
}

struct SolverConfig {
  double dt = 1e-2;
  double T = 0.2;
  Viscosity viscosity{};
  PressureLaw pressure = PressureLaw::quadratic();
  double p = 2.0;             // exponent of the data space, for the smallness check
  double smallness = 0.05;    // admissible ||a0||_{B^{d/p}_{p,1}}
  double vacuum_margin = 0.5; // require 1 + a0 >= margin; abort below margin/2
  double pressure_coeff = 1.0;
  TransportOptions transport{};
  int store_every = 1;
};

inline double mass(const CnsState& s) { return 1.0 + s.a.mean(); }

inline double momentum(const CnsState& s, int c) {
  Field one_a = s.a + Field::sample(s.a.grid(), [](const auto&) { return 1.0; });
  return multiply(one_a, s.u.component(c)).mean();
}

/// Admissible horizon from the dyadic decay of u0: the largest T with
/// sum_j (1 - e^{-C0 2^{2j} T}) 2^{j(-1+d/p)} ||Delta_j u0|| <= c/(1 + ||u0||),
/// C0 = mu/4.  Found by bisection; capped at t_max.
inline double admissible_time(const Field& u0, double p, double mu, double smallness,
                              double t_max = 10.0) {
  const Grid& g = u0.grid();
  const int d = g.dim;
  NormSeries s = block_norms(u0, p);
  const double c0 = 0.25 * mu;
  auto lhs = [&](double T) {
    double acc = 0.0;
    for (const auto& [j, bn] : s.values)
      acc += (1.0 - std::exp(-c0 * std::exp2(2.0 * j) * T)) * std::exp2(j * (-1.0 + d / p)) * bn;
    return acc;
  };
  const double u0n = besov_norm(s, BesovIndex(-1.0 + d / p, p, 1.0));
  const double target = smallness / (1.0 + u0n);
  if (lhs(t_max) <= target) return t_max;
  double lo = 0.0, hi = t_max;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (lhs(mid) <= target ? lo : hi) = mid;
  }
  if (lo <= 0.0) throw ConvergenceError("no admissible horizon: data too large at every T");
  return lo;
}

/// Barotropic compressible Navier-Stokes in (a,u) form by Strang splitting:
/// semi-Lagrangian density transport (multiplicative, hence positivity
/// preserving), exponential Lame integrator with ETD2RK treatment of the
/// nonlinearity -u.grad u - I(a) A u - pressure_coeff grad G(a).
inline CnsTrajectory cns_solve(const CnsState& s0, const SolverConfig& cfg) {
  const Grid& g = s0.a.grid();
  const int d = g.dim;
  cfg.viscosity.check();
  cfg.pressure.check();
  if (cfg.dt <= 0.0 || cfg.T <= 0.0 || cfg.dt > cfg.T + 1e-15) throw DomainError("need 0 < dt <= T");
  {
    const double amin = -lp_norm(s0.a, kInfExponent);  // lower bound on min a
    const auto& av = s0.a.physical();
    double mn = 1e300;
    for (double x : av) mn = std::min(mn, 1.0 + x);
    if (mn < cfg.vacuum_margin)
      throw PreconditionError("initial density too close to vacuum: min(1+a0) = " +
                              std::to_string(mn));
    (void)amin;
  }
  const double a0norm = besov_norm(s0.a, BesovIndex(d / cfg.p, cfg.p, 1.0));
  if (a0norm > cfg.smallness)
    throw PreconditionError("||a0|| = " + std::to_string(a0norm) +
                            " exceeds the smallness threshold " + std::to_string(cfg.smallness));

  const int steps = static_cast<int>(std::ceil(cfg.T / cfg.dt - 1e-12));
  const double h_macro = cfg.T / steps;
  const std::size_t n = g.npts();

  // density half step: solve a_t + u.grad a = -(1+a) div u with frozen u over
  // [0,h]; multiplicatively: (1+a)(x) <- (1+a)(X_dep) exp(-int div u) with
  // trapezoid quadrature of div u along the foot
  auto density_step = [&](const Field& a, const Field& u, double h) {
    const double vmax = detail::max_speed(u);
    int sub = 1;
    while (h / sub * vmax / g.spacing() > cfg.transport.cfl && sub < cfg.transport.max_substeps)
      sub *= 2;
    if (h / sub * vmax / g.spacing() > cfg.transport.cfl)
      throw StepRejected("CFL bound unreachable in the density substep");
    const double hs = h / sub;
    LagrangeInterpolant ui(u, cfg.transport.velocity_stencil);
    auto vel = [&](double, const std::array<double, 3>& x, double* out) {
      for (int ax = 0; ax < d; ++ax) out[ax] = ui.eval(ax, x);
    };
    Field div_u = divergence(u);
    LagrangeInterpolant di(div_u, cfg.transport.field_stencil);
    const auto& dv = div_u.physical();
    Field a_cur = a;
    for (int q = 0; q < sub; ++q) {
      auto dep = detail::departure_points(g, vel, 0.0, hs);
      LagrangeInterpolant ai(a_cur, cfg.transport.field_stencil);
      std::vector<double> next(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double rho_dep = 1.0 + ai.eval(0, dep[i]);
        const double divint = 0.5 * hs * (di.eval(0, dep[i]) + dv[i]);
        next[i] = rho_dep * std::exp(-divint) - 1.0;
      }
      a_cur = Field::from_physical(g, 1, std::move(next));
      double mn = 1e300;
      for (double x : a_cur.physical()) mn = std::min(mn, 1.0 + x);
      if (mn < 0.5 * cfg.vacuum_margin)
        throw VacuumError("density dropped to min(1+a) = " + std::to_string(mn));
    }
    return a_cur;
  };

  auto nonlinear = [&](const Field& u, const Field& a) {
    Field Au = cfg.viscosity.mu * laplacian(u);
    Au += (cfg.viscosity.mu + cfg.viscosity.lambda) * gradient(divergence(u));
    Field Ia = compose(I_of, a, 1.0, 0.25 * cfg.vacuum_margin);
    std::vector<double> nl(static_cast<std::size_t>(d) * n, 0.0);
    const Field adv = advect(u, u);
    const auto& advp = adv.physical();
    const auto& iap = Ia.physical();
    const auto& aup = Au.physical();
    for (int c = 0; c < d; ++c)
      for (std::size_t i = 0; i < n; ++i)
        nl[c * n + i] = -advp[c * n + i] - iap[i] * aup[c * n + i];
    Field out = dealias(Field::from_physical(g, d, std::move(nl)));
    Field Ga = compose(cfg.pressure.G, a, 1.0, 0.25 * cfg.vacuum_margin);
    out -= cfg.pressure_coeff * gradient(Ga);
    return out;
  };

  auto expo = [](double z) { return std::exp(z); };

  CnsTrajectory traj;
  traj.append(0.0, s0);
  Field a = s0.a, u = s0.u;
  for (int s = 0; s < steps; ++s) {
    Field a_half = density_step(a, u, 0.5 * h_macro);
    // ETD2RK for u with a frozen at the half step
    Field Nn = nonlinear(u, a_half);
    Field Eu = detail::apply_lame_function(u, cfg.viscosity, h_macro, expo);
    Field ustar = Eu + h_macro * detail::apply_lame_function(Nn, cfg.viscosity, h_macro, detail::phi1);
    Field Ns = nonlinear(ustar, a_half);
    Field u_next = Eu;
    u_next += h_macro * detail::apply_lame_function(
                            Nn, cfg.viscosity, h_macro,
                            [&](double z) { return detail::phi1(z) - detail::phi2(z); });
    u_next += h_macro * detail::apply_lame_function(Ns, cfg.viscosity, h_macro, detail::phi2);
    u = dealias(u_next);
    a = density_step(a_half, u, 0.5 * h_macro);
    if ((s + 1) % cfg.store_every == 0 || s + 1 == steps)
      traj.append((s + 1) * h_macro, CnsState(a, u));
  }
  return traj;
}

}  // namespace cnspec

#endif  // CNSPEC_PDE_HPP_
