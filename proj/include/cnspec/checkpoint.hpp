#ifndef CNSPEC_CHECKPOINT_HPP_
#define CNSPEC_CHECKPOINT_HPP_

#include <complex>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cnspec/errors.hpp"
#include "cnspec/field.hpp"
#include "cnspec/grid.hpp"
#include "cnspec/trajectory.hpp"

namespace cnspec {

/// Binary trajectory container: a fixed header followed by one record per
/// stored time (timestamp + raw spectral coefficients of a and u).  Grid and
/// solver metadata go to a JSON sidecar at <path>.json.
inline constexpr char kCheckpointMagic[8] = {'C', 'N', 'S', 'P', 'E', 'C', '0', '1'};

namespace detail {

template <typename T>
void put(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void get(std::ifstream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw DataError("truncated checkpoint file");
}

}  // namespace detail

inline std::string sidecar_path(const std::string& path) { return path + ".json"; }

inline void write_checkpoint(const std::string& path, const CnsTrajectory& traj,
                             const nlohmann::json& metadata = nlohmann::json::object()) {
  if (traj.empty()) throw DataError("refusing to write an empty trajectory");
  const Grid& g = traj.a().state(0).grid();
  const std::size_t n = g.npts();

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError("cannot open checkpoint file for writing: " + path);
  os.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  detail::put(os, static_cast<std::int32_t>(g.dim));
  detail::put(os, static_cast<std::int32_t>(g.points_per_dim));
  detail::put(os, g.length);
  detail::put(os, g.dealias_fraction);
  detail::put(os, static_cast<std::int64_t>(traj.size()));
  for (std::size_t i = 0; i < traj.size(); ++i) {
    detail::put(os, traj.time(i));
    const auto& as = traj.a().state(i).spectral();
    const auto& us = traj.u().state(i).spectral();
    os.write(reinterpret_cast<const char*>(as.data()), static_cast<std::streamsize>(
                                                           n * sizeof(std::complex<double>)));
    os.write(reinterpret_cast<const char*>(us.data()),
             static_cast<std::streamsize>(g.dim * n * sizeof(std::complex<double>)));
  }
  if (!os) throw DataError("failed while writing checkpoint: " + path);
  os.close();

  nlohmann::json side = metadata;
  side["format"] = "cnspec-checkpoint-1";
  side["grid"] = {{"dim", g.dim},
                  {"points_per_dim", g.points_per_dim},
                  {"length", g.length},
                  {"dealias_fraction", g.dealias_fraction}};
  side["states"] = traj.size();
  side["horizon"] = traj.horizon();
  std::ofstream js(sidecar_path(path), std::ios::trunc);
  if (!js) throw DataError("cannot write checkpoint sidecar: " + sidecar_path(path));
  js << side.dump(2) << "\n";
}

inline CnsTrajectory read_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open checkpoint file: " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::string(magic, 8) != std::string(kCheckpointMagic, 8))
    throw DataError("not a checkpoint file: " + path);
  std::int32_t dim = 0, npd = 0;
  double length = 0.0, dealias = 0.0;
  std::int64_t count = 0;
  detail::get(is, dim);
  detail::get(is, npd);
  detail::get(is, length);
  detail::get(is, dealias);
  detail::get(is, count);
  if (count <= 0) throw DataError("checkpoint holds no states");
  Grid g(dim, npd, length, dealias);
  const std::size_t n = g.npts();
  CnsTrajectory traj;
  for (std::int64_t i = 0; i < count; ++i) {
    double t = 0.0;
    detail::get(is, t);
    std::vector<std::complex<double>> as(n), us(static_cast<std::size_t>(dim) * n);
    is.read(reinterpret_cast<char*>(as.data()),
            static_cast<std::streamsize>(n * sizeof(std::complex<double>)));
    is.read(reinterpret_cast<char*>(us.data()),
            static_cast<std::streamsize>(us.size() * sizeof(std::complex<double>)));
    if (!is) throw DataError("truncated checkpoint file");
    traj.append(t, CnsState(Field::from_spectral(g, 1, std::move(as)),
                            Field::from_spectral(g, dim, std::move(us))));
  }
  return traj;
}

inline nlohmann::json read_sidecar(const std::string& path) {
  std::ifstream js(sidecar_path(path));
  if (!js) throw DataError("missing checkpoint sidecar: " + sidecar_path(path));
  nlohmann::json side;
  js >> side;
  return side;
}

}  // namespace cnspec

#endif  // CNSPEC_CHECKPOINT_HPP_
