#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <string>

#include "cnspec/checkpoint.hpp"
#include "cnspec/experiments.hpp"
#include "cnspec/pde.hpp"
#include "cnspec/random_fields.hpp"

using namespace cnspec;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("cnspec_io_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

CnsTrajectory small_trajectory(const Grid& g) {
  SolverConfig cfg;
  cfg.T = 0.04;
  cfg.dt = 0.02;
  CnsState s0(0.01 * random_field(g, 2.0, 41, 1.0, 4.0),
              0.1 * random_vector_field(g, 1.5, 42, false, 1.0, 4.0));
  return cns_solve(s0, cfg);
}

}  // namespace

TEST_CASE("checkpoint round trip") {
  TempDir tmp;
  Grid g(2, 16);
  CnsTrajectory traj = small_trajectory(g);
  const std::string path = tmp.file("traj.bin");
  write_checkpoint(path, traj, {{"note", "unit"}});

  CnsTrajectory back = read_checkpoint(path);
  REQUIRE(back.size() == traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    CHECK(back.time(i) == traj.time(i));
    const auto& sa = traj.a().state(i).spectral();
    const auto& ra = back.a().state(i).spectral();
    const auto& su = traj.u().state(i).spectral();
    const auto& ru = back.u().state(i).spectral();
    REQUIRE(ra.size() == sa.size());
    REQUIRE(ru.size() == su.size());
    for (std::size_t q = 0; q < sa.size(); ++q) CHECK(ra[q] == sa[q]);
    for (std::size_t q = 0; q < su.size(); ++q) CHECK(ru[q] == su[q]);
  }

  SECTION("sidecar carries grid metadata and user fields") {
    nlohmann::json side = read_sidecar(path);
    CHECK(side["format"] == "cnspec-checkpoint-1");
    CHECK(side["grid"]["dim"] == 2);
    CHECK(side["grid"]["points_per_dim"] == 16);
    CHECK(side["states"] == traj.size());
    CHECK(side["note"] == "unit");
    CHECK(side["horizon"].get<double>() == Catch::Approx(traj.horizon()));
  }

  SECTION("cached norms survive the round trip") {
    for (std::size_t i = 0; i < traj.size(); ++i) {
      const double orig = besov_norm(traj.a().norms(i, 2.0), BesovIndex(1.0, 2.0, 1.0));
      const double re = besov_norm(back.a().norms(i, 2.0), BesovIndex(1.0, 2.0, 1.0));
      CHECK(std::abs(orig - re) <= 1e-12 * std::max(1.0, orig));
    }
  }
}

TEST_CASE("checkpoint error handling") {
  TempDir tmp;
  Grid g(2, 16);
  CnsTrajectory traj = small_trajectory(g);

  SECTION("missing file") {
    CHECK_THROWS_AS(read_checkpoint(tmp.file("nothing.bin")), DataError);
    CHECK_THROWS_AS(read_sidecar(tmp.file("nothing.bin")), DataError);
  }

  SECTION("bad magic") {
    const std::string path = tmp.file("bad.bin");
    std::ofstream os(path, std::ios::binary);
    os << "NOTCNSPECDATA___________";
    os.close();
    CHECK_THROWS_AS(read_checkpoint(path), DataError);
  }

  SECTION("truncation") {
    const std::string path = tmp.file("trunc.bin");
    write_checkpoint(path, traj);
    const auto full = fs::file_size(path);
    fs::resize_file(path, full / 2);
    CHECK_THROWS_AS(read_checkpoint(path), DataError);
  }

  SECTION("empty trajectory refused") {
    CHECK_THROWS_AS(write_checkpoint(tmp.file("empty.bin"), CnsTrajectory{}), DataError);
  }
}

TEST_CASE("report serialization") {
  TempDir tmp;
  ExperimentReport rep;
  rep.name = "demo";
  rep.config = {{"d", 2}, {"p", 2.0}};
  rep.add_le("sample-bound", "eq-label", 0.5, 1.0);
  rep.add("sample-flag", "eq-label", 0.0, 1.0, false);
  rep.tables["sweep"] = "x,y\n1,2\n";
  rep.runtime_s = 1.25;

  SECTION("json layout") {
    nlohmann::json j = rep.to_json();
    CHECK(j["name"] == "demo");
    CHECK(j["criteria"].size() == 2);
    CHECK(j["criteria"][0]["label"] == "sample-bound");
    CHECK(j["criteria"][0]["paper_eq"] == "eq-label");
    CHECK(j["criteria"][0]["pass"] == true);
    CHECK(j["criteria"][1]["pass"] == false);
    CHECK(j["pass"] == false);
    CHECK(rep.passed() == false);
  }

  SECTION("determinism modulo runtime") {
    nlohmann::json a = rep.to_json();
    rep.runtime_s = 99.0;
    nlohmann::json b = rep.to_json();
    a.erase("runtime_s");
    b.erase("runtime_s");
    CHECK(a.dump() == b.dump());
  }

  SECTION("write_report emits json and csv files") {
    write_report(rep, tmp.file("out"));
    CHECK(fs::exists(tmp.path / "out" / "demo.json"));
    CHECK(fs::exists(tmp.path / "out" / "demo_sweep.csv"));
    std::ifstream js(tmp.path / "out" / "demo.json");
    nlohmann::json j;
    js >> j;
    CHECK(j["name"] == "demo");
    std::ifstream cs(tmp.path / "out" / "demo_sweep.csv");
    std::string line;
    std::getline(cs, line);
    CHECK(line == "x,y");
  }
}

TEST_CASE("worker cap") {
  // parallel_for honors the requested count and propagates exceptions
  std::vector<int> hit(17, 0);
  parallel_for(hit.size(), [&](std::size_t i) { hit[i] = 1; });
  for (int h : hit) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(3, [](std::size_t i) {
                    if (i == 2) throw DomainError("boom");
                  }),
                  DomainError);
  CHECK(artifact_threads() >= 1);
}
