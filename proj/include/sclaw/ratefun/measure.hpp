#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sclaw/core/errors.hpp"
#include "sclaw/core/grid.hpp"
#include "sclaw/core/spectral.hpp"
#include "sclaw/model/coefficients.hpp"

namespace sclaw::ratefun {

struct Atom {
  double v = 0.0;
  double p = 0.0;
};

/// Probability measure on [0,1] with finitely many atoms.
class DiscreteMeasure {
 public:
  DiscreteMeasure() : atoms_{{0.0, 1.0}} {}
  explicit DiscreteMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw PreconditionError("DiscreteMeasure: no atoms");
    double s = 0.0;
    for (const auto& a : atoms_) {
      if (!(a.v >= 0.0 && a.v <= 1.0)) throw PreconditionError("DiscreteMeasure: atom outside [0,1]");
      if (!(a.p >= 0.0)) throw PreconditionError("DiscreteMeasure: negative weight");
      s += a.p;
    }
    if (std::abs(s - 1.0) > 1e-12) throw PreconditionError("DiscreteMeasure: weights sum to " + std::to_string(s));
  }

  static DiscreteMeasure dirac(double v) { return DiscreteMeasure({{v, 1.0}}); }

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }

  template <class F>
  double integrate(F&& fn) const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.p * fn(a.v);
    return s;
  }
  double mean() const {
    return integrate([](double v) { return v; });
  }

  /// Drops zero weights and merges coincident atoms.
  DiscreteMeasure compact() const {
    std::vector<Atom> out;
    for (const auto& a : atoms_) {
      if (a.p <= 0.0) continue;
      auto it = std::find_if(out.begin(), out.end(), [&](const Atom& b) { return b.v == a.v; });
      if (it != out.end())
        it->p += a.p;
      else
        out.push_back(a);
    }
    std::sort(out.begin(), out.end(), [](const Atom& x, const Atom& y) { return x.v < y.v; });
    return DiscreteMeasure(std::move(out));
  }

  std::string to_string() const {
    std::string s;
    for (const auto& a : atoms_) s += (s.empty() ? "" : " + ") + std::to_string(a.p) + "*d(" + std::to_string(a.v) + ")";
    return s;
  }

 private:
  std::vector<Atom> atoms_;
};

/// A measure per (stored time, cell) with the moments mu(id), mu(f), mu(a^2) cached.
class YoungMeasureField {
 public:
  YoungMeasureField(TorusGrid grid, std::vector<double> times, std::vector<DiscreteMeasure> cells,
                    const model::ModelCoefficients& m)
      : grid_(grid), times_(std::move(times)), cells_(std::move(cells)) {
    const std::size_t n = grid_.n_cells();
    if (times_.size() < 2) throw PreconditionError("YoungMeasureField: need at least two times");
    if (times_.front() != 0.0) throw PreconditionError("YoungMeasureField: times must start at 0");
    for (std::size_t k = 1; k < times_.size(); ++k)
      if (!(times_[k] > times_[k - 1])) throw PreconditionError("YoungMeasureField: times must increase");
    if (cells_.size() != n * times_.size()) throw StructuralError("YoungMeasureField: cell count mismatch");
    for (std::size_t k = 0; k < times_.size(); ++k) {
      GridField mi(grid_), mf(grid_), ma(grid_);
      for (std::size_t i = 0; i < n; ++i) {
        const auto& mu = cells_[k * n + i];
        mi[i] = mu.mean();
        mf[i] = mu.integrate([&](double v) { return m.f(v); });
        ma[i] = mu.integrate([&](double v) { return m.a2(v); });
      }
      mean_.push_back(std::move(mi));
      flux_.push_back(std::move(mf));
      a2_.push_back(std::move(ma));
    }
  }

  /// delta_{u(t,x)} of a trajectory.
  static YoungMeasureField dirac(const Trajectory& traj, const model::ModelCoefficients& m) {
    std::vector<DiscreteMeasure> cells;
    cells.reserve(traj.size() * traj.grid().n_cells());
    for (const auto& fr : traj.frames())
      for (double v : fr.values()) cells.push_back(DiscreteMeasure::dirac(std::clamp(v, 0.0, 1.0)));
    return YoungMeasureField(traj.grid(), traj.times(), std::move(cells), m);
  }

  /// The same measure in every cell at every time.
  static YoungMeasureField constant(TorusGrid grid, std::vector<double> times, const DiscreteMeasure& mu,
                                    const model::ModelCoefficients& m) {
    std::vector<DiscreteMeasure> cells(grid.n_cells() * times.size(), mu);
    return YoungMeasureField(grid, std::move(times), std::move(cells), m);
  }

  const TorusGrid& grid() const noexcept { return grid_; }
  const std::vector<double>& times() const noexcept { return times_; }
  std::size_t n_times() const noexcept { return times_.size(); }
  const DiscreteMeasure& cell(std::size_t k, std::size_t i) const { return cells_[k * grid_.n_cells() + i]; }
  const GridField& mean(std::size_t k) const { return mean_[k]; }
  const GridField& flux(std::size_t k) const { return flux_[k]; }
  const GridField& a2(std::size_t k) const { return a2_[k]; }

  /// Largest H^-1 distance between consecutive mean fields.
  double max_mean_increment() const {
    double worst = 0.0;
    for (std::size_t k = 1; k < times_.size(); ++k)
      worst = std::max(worst, h_minus1_distance(mean_[k], mean_[k - 1]));
    return worst;
  }

  /// Throws when some frame-to-frame H^-1 increment exceeds `rate` times the time step.
  void check_continuity(double rate) const {
    for (std::size_t k = 1; k < times_.size(); ++k) {
      const double d = h_minus1_distance(mean_[k], mean_[k - 1]);
      if (d > rate * (times_[k] - times_[k - 1]))
        throw PreconditionError("YoungMeasureField: mean jumps between t=" + std::to_string(times_[k - 1]) +
                                " and t=" + std::to_string(times_[k]) + " (H^-1 increment " +
                                std::to_string(d) + ")");
    }
  }

 private:
  TorusGrid grid_;
  std::vector<double> times_;
  std::vector<DiscreteMeasure> cells_;
  std::vector<GridField> mean_, flux_, a2_;
};

}  // namespace sclaw::ratefun
