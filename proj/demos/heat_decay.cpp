// Dyadic decay of the heat semigroup: each Littlewood-Paley block of a random
// datum decays like exp(-mu 2^{2j} t), so the Besov norm table below collapses
// from the top block down.
#include <cstdio>

#include "cnspec/cnspec.hpp"

using namespace cnspec;

int main() {
  Grid g(2, 64);
  const double mu = 1.0;
  Field u0 = random_field(g, 0.5, 7);

  FieldTrajectory traj = heat_solve(u0, nullptr, mu, 0.1, 0.005, 4);
  std::printf("%8s", "t");
  for (int j = g.jmin(); j <= g.jmax(); ++j) std::printf("  block %d", j);
  std::printf("\n");
  for (std::size_t i = 0; i < traj.size(); ++i) {
    std::printf("%8.3f", traj.time(i));
    for (int j = g.jmin(); j <= g.jmax(); ++j)
      std::printf("  %7.1e", traj.norms(i, 2.0).values.at(j));
    std::printf("\n");
  }
  std::printf("\nB^{1}_{2,1} norm: %.4e -> %.4e\n",
              besov_norm(traj.norms(0, 2.0), BesovIndex(1.0, 2.0, 1.0)),
              besov_norm(traj.norms(traj.size() - 1, 2.0), BesovIndex(1.0, 2.0, 1.0)));
  return 0;
}
