// A small compressible solve: a density pulse relaxes while mass and momentum
// stay conserved to discretization accuracy.
#include <cstdio>

#include "cnspec/cnspec.hpp"

using namespace cnspec;

int main() {
  Grid g(2, 32);
  Field a0 = Field::sample(g, [](const auto& x) {
    return 0.02 * (std::cos(x[0]) + std::sin(x[1]));
  });
  Field u0 = Field::sample_vector(g, 2, [](int c, const auto& x) {
    return 0.1 * std::sin(x[(c + 1) % 2]);
  });

  SolverConfig cfg;
  cfg.T = 0.5;
  cfg.dt = 0.01;
  cfg.store_every = 10;
  CnsTrajectory traj = cns_solve(CnsState(a0, u0), cfg);

  const double m0 = mass(traj.state(0));
  std::printf("%6s %12s %12s %12s %12s\n", "t", "||a||_B1", "||u||_B0", "mass drift",
              "mom drift");
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const CnsState s = traj.state(i);
    double mom = 0.0;
    for (int c = 0; c < 2; ++c)
      mom += std::abs(momentum(s, c) - momentum(traj.state(0), c));
    std::printf("%6.2f %12.5e %12.5e %12.3e %12.3e\n", traj.time(i),
                besov_norm(traj.a().norms(i, 2.0), BesovIndex(1.0, 2.0, 1.0)),
                besov_norm(traj.u().norms(i, 2.0), BesovIndex(0.0, 2.0, 1.0)),
                std::abs(mass(s) - m0), mom);
  }
  return 0;
}
