#pragma once

// Binary trajectory container:
//
//   offset size  field
//   0      8     magic "SCLW1" padded with NUL
//   8      8     n_cells        (u64 LE)
//   16     8     n_frames       (u64 LE)
//   24     8     eps            (f64 LE)
//   32     8     gamma          (f64 LE)
//   40     8     dt             (f64 LE)
//   48     8     master seed    (u64 LE)
//   56     8     store stride   (u64 LE)
//   64     ...   n_frames rows of n_cells f64 LE values
//
// The sidecar "<path>.meta" holds key=value lines, including the frame times.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>

#include "sclaw/core/grid.hpp"

namespace sclaw::io {

inline constexpr char kMagic[8] = {'S', 'C', 'L', 'W', '1', 0, 0, 0};
inline constexpr std::size_t kHeaderBytes = 64;

namespace detail {

inline void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

inline void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

inline std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw StructuralError("trajectory file truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

inline double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

inline std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace detail

using Metadata = std::map<std::string, std::string>;

inline void write_trajectory_binary(std::ostream& os, const Trajectory& traj) {
  os.write(kMagic, 8);
  const auto& m = traj.meta();
  detail::put_u64(os, traj.grid().n_cells());
  detail::put_u64(os, traj.size());
  detail::put_f64(os, m.eps);
  detail::put_f64(os, m.gamma);
  detail::put_f64(os, m.dt);
  detail::put_u64(os, m.seed);
  detail::put_u64(os, m.store_stride);
  for (const auto& frame : traj.frames())
    for (double v : frame.values()) detail::put_f64(os, v);
}

inline Metadata trajectory_metadata(const Trajectory& traj) {
  const auto& m = traj.meta();
  Metadata md;
  md["format"] = "SCLW1";
  md["scheme"] = m.scheme;
  md["n_cells"] = std::to_string(traj.grid().n_cells());
  md["n_frames"] = std::to_string(traj.size());
  md["eps"] = detail::format_double(m.eps);
  md["gamma"] = detail::format_double(m.gamma);
  md["dt"] = detail::format_double(m.dt);
  md["seed"] = std::to_string(m.seed);
  md["stream_index"] = std::to_string(m.stream_index);
  md["store_stride"] = std::to_string(m.store_stride);
  std::string times;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (k) times += ',';
    times += detail::format_double(traj.times()[k]);
  }
  md["times"] = times;
  return md;
}

inline void write_metadata(std::ostream& os, const Metadata& md) {
  for (const auto& [k, v] : md) os << k << '=' << v << '\n';
}

inline Metadata read_metadata(std::istream& is) {
  Metadata md;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw StructuralError("metadata line " + std::to_string(lineno) + ": expected key=value");
    md[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return md;
}

/// Writes `<path>` (binary) and `<path>.meta` (sidecar).
inline void save_trajectory(const std::string& path, const Trajectory& traj) {
  std::ofstream bin(path, std::ios::binary);
  if (!bin) throw StructuralError("cannot open " + path + " for writing");
  write_trajectory_binary(bin, traj);
  std::ofstream meta(path + ".meta");
  if (!meta) throw StructuralError("cannot open " + path + ".meta for writing");
  write_metadata(meta, trajectory_metadata(traj));
}

inline Trajectory read_trajectory(std::istream& bin, const Metadata& md) {
  char magic[8];
  if (!bin.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
    throw StructuralError("not an SCLW1 trajectory (bad magic)");
  TrajectoryMeta m;
  const auto n_cells = detail::get_u64(bin);
  const auto n_frames = detail::get_u64(bin);
  m.eps = detail::get_f64(bin);
  m.gamma = detail::get_f64(bin);
  m.dt = detail::get_f64(bin);
  m.seed = detail::get_u64(bin);
  m.store_stride = detail::get_u64(bin);
  if (auto it = md.find("scheme"); it != md.end()) m.scheme = it->second;
  if (auto it = md.find("stream_index"); it != md.end()) m.stream_index = std::stoull(it->second);

  std::vector<double> times;
  if (auto it = md.find("times"); it != md.end()) {
    std::stringstream ss(it->second);
    std::string tok;
    while (std::getline(ss, tok, ',')) times.push_back(std::stod(tok));
  } else {
    for (std::uint64_t k = 0; k < n_frames; ++k)
      times.push_back(static_cast<double>(k * m.store_stride) * m.dt);
  }
  if (times.size() != n_frames) throw StructuralError("sidecar times do not match frame count");

  const TorusGrid grid(n_cells);
  Trajectory traj(grid, m);
  for (std::uint64_t k = 0; k < n_frames; ++k) {
    std::vector<double> row(n_cells);
    for (auto& v : row) v = detail::get_f64(bin);
    traj.push(times[k], GridField(grid, std::move(row)));
  }
  return traj;
}

inline Trajectory load_trajectory(const std::string& path) {
  std::ifstream bin(path, std::ios::binary);
  if (!bin) throw StructuralError("cannot open " + path);
  Metadata md;
  if (std::ifstream meta(path + ".meta"); meta) md = read_metadata(meta);
  return read_trajectory(bin, md);
}

/// One row per (t, x, value).
inline void write_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,x,value\n";
  os << std::setprecision(17);
  for (std::size_t k = 0; k < traj.size(); ++k)
    for (std::size_t i = 0; i < traj.grid().n_cells(); ++i)
      os << traj.times()[k] << ',' << traj.grid().center(i) << ',' << traj.frames()[k][i] << '\n';
}

}  // namespace sclaw::io
