#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sclaw/core/errors.hpp"

namespace sclaw {

/// Uniform periodic grid on the unit torus. Cell i covers [i*dx, (i+1)*dx).
class TorusGrid {
 public:
  static constexpr std::size_t kMinCells = 8;
  static constexpr double kLength = 1.0;

  explicit TorusGrid(std::size_t n_cells) : n_cells_(n_cells) {
    if (n_cells < kMinCells)
      throw PreconditionError("TorusGrid needs at least 8 cells, got " + std::to_string(n_cells));
  }

  std::size_t n_cells() const noexcept { return n_cells_; }
  double length() const noexcept { return kLength; }
  double dx() const noexcept { return kLength / static_cast<double>(n_cells_); }
  double center(std::size_t i) const noexcept { return (static_cast<double>(i) + 0.5) * dx(); }
  double face(std::size_t i) const noexcept { return static_cast<double>(i + 1) * dx(); }

  std::size_t wrap(std::ptrdiff_t i) const noexcept {
    const auto n = static_cast<std::ptrdiff_t>(n_cells_);
    return static_cast<std::size_t>(((i % n) + n) % n);
  }

  friend bool operator==(const TorusGrid&, const TorusGrid&) = default;

 private:
  std::size_t n_cells_;
};

/// Cell averages of a real function on a TorusGrid.
class GridField {
 public:
  explicit GridField(TorusGrid grid, double value = 0.0)
      : grid_(grid), values_(grid.n_cells(), value) {}

  GridField(TorusGrid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.n_cells())
      throw StructuralError("GridField: " + std::to_string(values_.size()) + " values for " +
                            std::to_string(grid_.n_cells()) + " cells");
  }

  /// Samples `fn` at cell centres.
  static GridField sample(TorusGrid grid, const std::function<double(double)>& fn) {
    std::vector<double> v(grid.n_cells());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid.center(i));
    return GridField(grid, std::move(v));
  }

  const TorusGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double at_wrapped(std::ptrdiff_t i) const noexcept { return values_[grid_.wrap(i)]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  std::vector<double>& data() noexcept { return values_; }
  const std::vector<double>& data() const noexcept { return values_; }

  bool all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
  }

  double integral() const noexcept {
    double s = 0.0;
    for (double v : values_) s += v;
    return s * grid_.dx();
  }

  double min() const { return *std::min_element(values_.begin(), values_.end()); }
  double max() const { return *std::max_element(values_.begin(), values_.end()); }

  friend bool operator==(const GridField& a, const GridField& b) {
    return a.grid_ == b.grid_ && a.values_ == b.values_;
  }

 private:
  TorusGrid grid_;
  std::vector<double> values_;
};

inline void require_same_grid(const GridField& a, const GridField& b, const char* who) {
  if (!(a.grid() == b.grid()))
    throw StructuralError(std::string(who) + ": grid mismatch (" +
                          std::to_string(a.grid().n_cells()) + " vs " +
                          std::to_string(b.grid().n_cells()) + " cells)");
}

inline double l1_distance(const GridField& a, const GridField& b) {
  require_same_grid(a, b, "l1_distance");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s * a.grid().dx();
}

struct TrajectoryMeta {
  std::string scheme = "none";
  double eps = 0.0;
  double gamma = 0.0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t stream_index = 0;
  std::size_t store_stride = 1;
};

/// Stored frames u(t_k, .) with t_0 = 0 < t_1 < ... on a common grid.
class Trajectory {
 public:
  Trajectory(TorusGrid grid, TrajectoryMeta meta) : grid_(grid), meta_(std::move(meta)) {}

  void push(double t, GridField frame) {
    if (!(frame.grid() == grid_)) throw StructuralError("Trajectory::push: grid mismatch");
    if (times_.empty() ? t != 0.0 : !(t > times_.back()))
      throw StructuralError("Trajectory times must start at 0 and increase strictly");
    times_.push_back(t);
    frames_.push_back(std::move(frame));
  }

  const TorusGrid& grid() const noexcept { return grid_; }
  const TrajectoryMeta& meta() const noexcept { return meta_; }
  TrajectoryMeta& meta() noexcept { return meta_; }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<GridField>& frames() const noexcept { return frames_; }
  std::size_t size() const noexcept { return frames_.size(); }
  const GridField& front() const { return frames_.front(); }
  const GridField& back() const { return frames_.back(); }
  double final_time() const { return times_.back(); }

 private:
  TorusGrid grid_;
  TrajectoryMeta meta_;
  std::vector<double> times_;
  std::vector<GridField> frames_;
};

/// Trapezoid weights for the stored time grid.
inline std::vector<double> trapezoid_weights(const std::vector<double>& times) {
  std::vector<double> w(times.size(), 0.0);
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    const double h = times[k + 1] - times[k];
    w[k] += 0.5 * h;
    w[k + 1] += 0.5 * h;
  }
  return w;
}

/// L1([0,T] x T) distance between two trajectories sharing their stored times.
inline double spacetime_l1_distance(const Trajectory& a, const Trajectory& b) {
  if (a.times() != b.times()) throw StructuralError("spacetime_l1_distance: time grids differ");
  const auto w = trapezoid_weights(a.times());
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += w[k] * l1_distance(a.frames()[k], b.frames()[k]);
  return s;
}

/// sup_t of the L1 distance between two trajectories sharing their stored times.
inline double sup_l1_distance(const Trajectory& a, const Trajectory& b) {
  if (a.times() != b.times()) throw StructuralError("sup_l1_distance: time grids differ");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s = std::max(s, l1_distance(a.frames()[k], b.frames()[k]));
  return s;
}

}  // namespace sclaw
