// Command-line front end: standalone solves, scripted experiments, and
// checkpoint inspection.  Exit codes: 0 success / all criteria pass,
// 1 criterion failure, 2 configuration or IO error.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cnspec/cnspec.hpp"

namespace {

using namespace cnspec;

int cmd_list() {
  for (const auto& n : experiment_names()) std::printf("%s\n", n.c_str());
  return 0;
}

int cmd_solve(int d, double p, int n_grid, double dt, const std::string& t_flag,
              std::uint64_t seed, const std::string& out_dir, bool verbose) {
  ExperimentSpec spec;
  spec.d = d;
  spec.p = p;
  spec.n_grid = n_grid;
  spec.seed = seed;
  Grid g(d, n_grid);
  CnsState s0 = detail::base_state(g, spec);

  SolverConfig cfg;
  cfg.dt = dt;
  cfg.p = p;
  if (t_flag == "auto") {
    cfg.T = admissible_time(s0.u, p, cfg.viscosity.mu, cfg.smallness);
    if (verbose) std::printf("admissible horizon T = %.6g\n", cfg.T);
  } else {
    cfg.T = std::stod(t_flag);
  }
  if (cfg.T < cfg.dt) cfg.T = cfg.dt;

  CnsTrajectory traj = cns_solve(s0, cfg);

  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string ckpt = (fs::path(out_dir) / "solve.bin").string();
  write_checkpoint(ckpt, traj,
                   {{"d", d}, {"p", p}, {"n_grid", n_grid}, {"dt", cfg.dt}, {"T", cfg.T},
                    {"seed", seed}});

  std::ofstream csv(fs::path(out_dir) / "solve_norms.csv", std::ios::trunc);
  if (!csv) throw DataError("cannot write norm table to " + out_dir);
  csv << "t,a_low,u_low,u_high\n";
  const BesovIndex ba(d / p, p, 1.0), bu(-1.0 + d / p, p, 1.0), bh(1.0 + d / p, p, 1.0);
  for (std::size_t i = 0; i < traj.size(); ++i)
    csv << traj.time(i) << "," << besov_norm(traj.a().norms(i, p), ba) << ","
        << besov_norm(traj.u().norms(i, p), bu) << "," << besov_norm(traj.u().norms(i, p), bh)
        << "\n";
  if (verbose)
    std::printf("wrote %s and solve_norms.csv (%zu states)\n", ckpt.c_str(), traj.size());
  return 0;
}

int cmd_experiment(const std::string& name, const std::string& out_dir, ExperimentSpec spec,
                   bool verbose) {
  spec.name = name;
  ExperimentReport rep = run_experiment(spec);
  write_report(rep, out_dir);
  if (verbose || !rep.passed())
    for (const auto& c : rep.criteria)
      std::printf("[%s] %-32s value %.4e bound %.4e\n", c.pass ? "PASS" : "FAIL",
                  c.label.c_str(), c.value, c.bound);
  std::printf("%s: %s (report in %s)\n", name.c_str(), rep.passed() ? "pass" : "FAIL",
              out_dir.c_str());
  return rep.passed() ? 0 : 1;
}

int cmd_norms(const std::string& path, double s, double p, double r) {
  CnsTrajectory traj = read_checkpoint(path);
  const BesovIndex idx(s, p, r);
  std::printf("t,a_norm,u_norm\n");
  for (std::size_t i = 0; i < traj.size(); ++i)
    std::printf("%.10g,%.12e,%.12e\n", traj.time(i), besov_norm(traj.a().norms(i, p), idx),
                besov_norm(traj.u().norms(i, p), idx));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pseudospectral Besov toolkit for barotropic compressible flow"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "chatty output");

  app.add_subcommand("list", "list the available experiments");

  auto* solve = app.add_subcommand("solve", "run a standalone solve and write a checkpoint");
  solve->fallthrough();
  int d = 2, n_grid = 64;
  double p = 2.0, dt = 1e-2, s_idx = 0.0, r_idx = 1.0;
  std::string t_flag = "auto", out_dir = "out";
  std::uint64_t seed = 2024;
  solve->add_option("--d", d, "space dimension")->check(CLI::Range(1, 3));
  solve->add_option("--p", p, "Lebesgue exponent of the data space")->check(CLI::Range(1.0, 16.0));
  solve->add_option("--N", n_grid, "grid points per dimension")->check(CLI::Range(8, 512));
  solve->add_option("--dt", dt, "time step")->check(CLI::PositiveNumber);
  solve->add_option("--T", t_flag, "horizon, or 'auto' for the admissible time");
  solve->add_option("--seed", seed, "datum seed");
  solve->add_option("--out", out_dir, "output directory");

  auto* exp = app.add_subcommand("experiment", "run a named experiment and write its report");
  exp->fallthrough();
  std::string exp_name;
  ExperimentSpec overrides;
  bool has_d = false, has_p = false, has_n = false, has_dt = false, has_t = false;
  double o_T = 0.0, o_dt = 0.0, o_p = 0.0;
  int o_d = 0, o_n = 0;
  std::vector<double> o_eps;
  exp->add_option("name", exp_name, "experiment name")->required();
  exp->add_option("--d", o_d, "space dimension")->check(CLI::Range(1, 3))->each([&](const std::string&) { has_d = true; });
  exp->add_option("--p", o_p, "Lebesgue exponent")->check(CLI::Range(1.0, 16.0))->each([&](const std::string&) { has_p = true; });
  exp->add_option("--N", o_n, "grid points per dimension")->check(CLI::Range(8, 512))->each([&](const std::string&) { has_n = true; });
  exp->add_option("--dt", o_dt, "time step")->check(CLI::PositiveNumber)->each([&](const std::string&) { has_dt = true; });
  exp->add_option("--T", o_T, "horizon")->check(CLI::PositiveNumber)->each([&](const std::string&) { has_t = true; });
  exp->add_option("--eps", o_eps, "perturbation sizes");
  exp->add_option("--seed", seed, "datum seed");
  exp->add_option("--out", out_dir, "output directory");

  auto* norms = app.add_subcommand("norms", "print Besov norms per stored time of a checkpoint");
  norms->fallthrough();
  std::string ckpt_path;
  norms->add_option("checkpoint", ckpt_path, "checkpoint file")->required();
  norms->add_option("--s", s_idx, "regularity index");
  norms->add_option("--p", p, "Lebesgue exponent")->check(CLI::Range(1.0, 16.0));
  norms->add_option("--r", r_idx, "summation exponent");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand("list")) return cmd_list();
    if (app.got_subcommand("solve"))
      return cmd_solve(d, p, n_grid, dt, t_flag, seed, out_dir, verbose);
    if (app.got_subcommand("experiment")) {
      bool known = false;
      for (const auto& n : experiment_names()) known = known || n == exp_name;
      if (!known) {
        std::fprintf(stderr, "unknown experiment '%s'; valid names:\n", exp_name.c_str());
        for (const auto& n : experiment_names()) std::fprintf(stderr, "  %s\n", n.c_str());
        return 2;
      }
      ExperimentSpec spec = default_spec(exp_name);
      spec.seed = seed;
      if (has_d) spec.d = o_d;
      if (has_p) { spec.p = o_p; spec.solver.p = o_p; }
      if (has_n) spec.n_grid = o_n;
      if (has_dt) spec.dt = o_dt;
      if (has_t) spec.T = o_T;
      if (!o_eps.empty()) spec.epsilons = o_eps;
      return cmd_experiment(exp_name, out_dir, spec, verbose);
    }
    if (app.got_subcommand("norms")) return cmd_norms(ckpt_path, s_idx, p, r_idx);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
