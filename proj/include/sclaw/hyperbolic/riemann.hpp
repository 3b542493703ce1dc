#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "sclaw/core/grid.hpp"
#include "sclaw/model/coefficients.hpp"

namespace sclaw::hyperbolic {

struct RiemannProblem {
  double u_left = 0.0;
  double u_right = 0.0;
  double position = 0.0;
};

enum class WaveKind { Shock, Rarefaction };

/// Shock: speed_lo == speed_hi == sigma. Rarefaction: u(xi) solves f'(u) = xi
/// for xi in [speed_lo, speed_hi].
struct Wave {
  WaveKind kind = WaveKind::Shock;
  double u_minus = 0.0;
  double u_plus = 0.0;
  double speed_lo = 0.0;
  double speed_hi = 0.0;
};

class WaveFan {
 public:
  WaveFan() = default;
  WaveFan(const model::ModelCoefficients& m, RiemannProblem rp, std::vector<Wave> waves)
      : model_(std::make_shared<model::ModelCoefficients>(m)), rp_(rp), waves_(std::move(waves)) {}

  const RiemannProblem& problem() const noexcept { return rp_; }
  const std::vector<Wave>& waves() const noexcept { return waves_; }
  bool empty() const noexcept { return waves_.empty(); }
  double min_speed() const { return waves_.empty() ? 0.0 : waves_.front().speed_lo; }
  double max_speed() const { return waves_.empty() ? 0.0 : waves_.back().speed_hi; }

  /// Value at similarity coordinate xi = (x - x0) / t.
  double at_xi(double xi) const {
    for (const auto& w : waves_) {
      if (xi < w.speed_lo) return w.u_minus;
      if (w.kind == WaveKind::Rarefaction && xi <= w.speed_hi) return invert(w, xi);
    }
    return rp_.u_right;
  }

  /// Solution at (t, x) on the real line (no periodic wrapping).
  double operator()(double t, double x) const {
    const double d = x - rp_.position;
    if (t <= 0.0) return d < 0.0 ? rp_.u_left : rp_.u_right;
    return at_xi(d / t);
  }

  std::string to_text() const {
    std::ostringstream os;
    os.precision(12);
    os << "riemann u_left=" << rp_.u_left << " u_right=" << rp_.u_right << " x0=" << rp_.position << "\n";
    if (waves_.empty()) os << "  (no waves: constant state)\n";
    for (const auto& w : waves_) {
      if (w.kind == WaveKind::Shock)
        os << "  shock u-=" << w.u_minus << " u+=" << w.u_plus << " sigma=" << w.speed_lo << "\n";
      else
        os << "  rarefaction u-=" << w.u_minus << " u+=" << w.u_plus << " speeds=[" << w.speed_lo << ", "
           << w.speed_hi << "]\n";
    }
    return os.str();
  }

 private:
  double invert(const Wave& w, double xi) const {
    // f' is monotone along the rarefaction; bisection in the traversal direction.
    double a = w.u_minus, b = w.u_plus;
    for (int it = 0; it < 200 && std::abs(b - a) > 1e-15; ++it) {
      const double mid = 0.5 * (a + b);
      if (model_->df(mid) < xi) a = mid; else b = mid;
    }
    return 0.5 * (a + b);
  }

  std::shared_ptr<model::ModelCoefficients> model_;
  RiemannProblem rp_;
  std::vector<Wave> waves_;
};

namespace detail {

// Lower convex hull (indices) of the points (x_k, y_k), x strictly increasing.
// Vertices whose slope change is below `tol` are dropped as collinear.
inline std::vector<std::size_t> lower_hull(const std::vector<double>& x, const std::vector<double>& y, double tol) {
  std::vector<std::size_t> h;
  for (std::size_t k = 0; k < x.size(); ++k) {
    while (h.size() >= 2) {
      const std::size_t a = h[h.size() - 2], b = h.back();
      const double s_ab = (y[b] - y[a]) / (x[b] - x[a]);
      const double s_bk = (y[k] - y[b]) / (x[k] - x[b]);
      if (s_bk - s_ab <= tol) h.pop_back(); else break;
    }
    h.push_back(k);
  }
  return h;
}

}  // namespace detail

/// Entropic Riemann solution from the convex (u_left < u_right) or concave
/// (u_left > u_right) envelope of f between the states, sampled on 10^4 points.
inline WaveFan riemann_exact(const model::ModelCoefficients& m, RiemannProblem rp) {
  if (!(rp.u_left >= 0.0 && rp.u_left <= 1.0 && rp.u_right >= 0.0 && rp.u_right <= 1.0))
    throw PreconditionError("riemann_exact: states must lie in [0,1]");
  if (rp.u_left == rp.u_right) return WaveFan(m, rp, {});
  const bool increasing = rp.u_left < rp.u_right;
  const double lo = std::min(rp.u_left, rp.u_right), hi = std::max(rp.u_left, rp.u_right);
  constexpr std::size_t K = 10000;
  std::vector<double> x(K + 1), y(K + 1);
  for (std::size_t k = 0; k <= K; ++k) {
    x[k] = k == K ? hi : lo + (hi - lo) * static_cast<double>(k) / K;
    y[k] = increasing ? m.f(x[k]) : -m.f(x[k]);
  }
  auto hull = detail::lower_hull(x, y, 1e-10);

  // Hull edges in the direction of increasing speed: states from u_left to u_right.
  struct Edge {
    double a, b;
    bool shock;
  };
  std::vector<Edge> edges;
  for (std::size_t k = 0; k + 1 < hull.size(); ++k)
    edges.push_back({x[hull[k]], x[hull[k + 1]], hull[k + 1] - hull[k] > 1});
  if (!increasing) {
    std::reverse(edges.begin(), edges.end());
    for (auto& e : edges) std::swap(e.a, e.b);
  }

  std::vector<Wave> waves;
  for (std::size_t k = 0; k < edges.size();) {
    if (edges[k].shock) {
      const double a = edges[k].a, b = edges[k].b;
      const double sigma = (m.f(b) - m.f(a)) / (b - a);
      waves.push_back({WaveKind::Shock, a, b, sigma, sigma});
      ++k;
      continue;
    }
    std::size_t j = k;
    while (j < edges.size() && !edges[j].shock) ++j;
    const double a = edges[k].a, b = edges[j - 1].b;
    waves.push_back({WaveKind::Rarefaction, a, b, m.df(a), m.df(b)});
    k = j;
  }
  // Make the states at a shock/rarefaction contact coincide with the sampled hull.
  for (std::size_t k = 0; k + 1 < waves.size(); ++k) {
    auto& l = waves[k];
    auto& r = waves[k + 1];
    if (l.kind == WaveKind::Rarefaction && r.kind == WaveKind::Shock) l.speed_hi = std::min(l.speed_hi, r.speed_lo);
    if (l.kind == WaveKind::Shock && r.kind == WaveKind::Rarefaction) r.speed_lo = std::max(r.speed_lo, l.speed_hi);
  }
  return WaveFan(m, rp, std::move(waves));
}

/// max |f(u+) - f(u-) - sigma (u+ - u-)| over the shocks of a fan.
inline double rankine_hugoniot_defect(const model::ModelCoefficients& m, const WaveFan& fan) {
  double worst = 0.0;
  for (const auto& w : fan.waves())
    if (w.kind == WaveKind::Shock)
      worst = std::max(worst, std::abs(m.f(w.u_plus) - m.f(w.u_minus) - w.speed_lo * (w.u_plus - w.u_minus)));
  return worst;
}

/// Oleinik chord condition on every shock: the chord lies below f when u- < u+
/// and above f when u- > u+, checked on 1000 interior points.
inline bool oleinik_ok(const model::ModelCoefficients& m, const Wave& w, double tol = 1e-12) {
  if (w.kind != WaveKind::Shock) return true;
  const double s = w.u_minus < w.u_plus ? 1.0 : -1.0;
  for (int k = 1; k < 1000; ++k) {
    const double v = w.u_minus + (w.u_plus - w.u_minus) * k / 1000.0;
    const double chord = m.f(v) - m.f(w.u_minus) - w.speed_lo * (v - w.u_minus);
    if (s * chord < -tol) return false;
  }
  return true;
}

/// Piecewise-constant periodic data with jumps at `positions` (increasing in [0,1));
/// states[k] holds on [positions[k], positions[k+1]). Each jump evolves as its own
/// Riemann fan, which is exact until neighbouring fans meet.
class PeriodicRiemannSolution {
 public:
  PeriodicRiemannSolution(const model::ModelCoefficients& m, std::vector<double> positions,
                          std::vector<double> states)
      : positions_(std::move(positions)), states_(std::move(states)) {
    const std::size_t n = positions_.size();
    if (n == 0 || states_.size() != n) throw PreconditionError("PeriodicRiemannSolution: need matching jumps/states");
    for (std::size_t k = 0; k < n; ++k) {
      const double left = states_[(k + n - 1) % n];
      fans_.push_back(riemann_exact(m, {left, states_[k], positions_[k]}));
    }
  }

  const std::vector<WaveFan>& fans() const noexcept { return fans_; }

  /// Largest t for which nearest-jump evaluation is exact.
  double valid_until() const {
    const std::size_t n = positions_.size();
    double t = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
      double gap = positions_[(k + 1) % n] - positions_[k];
      if (gap <= 0.0) gap += 1.0;
      const double s = std::max(std::abs(fans_[k].max_speed()), std::abs(fans_[(k + 1) % n].min_speed()));
      if (s > 0.0) t = std::min(t, 0.5 * gap / s);
    }
    return t;
  }

  double operator()(double t, double x) const {
    x -= std::floor(x);
    std::size_t best = 0;
    double best_d = 2.0, best_signed = 0.0;
    for (std::size_t k = 0; k < positions_.size(); ++k) {
      double d = x - positions_[k];
      d -= std::round(d);
      if (std::abs(d) < best_d) best_d = std::abs(d), best = k, best_signed = d;
    }
    const auto& fan = fans_[best];
    return fan(t, fan.problem().position + best_signed);
  }

  /// Cell averages at time t from `sub` midpoint samples per cell.
  GridField cell_averages(const TorusGrid& grid, double t, std::size_t sub = 32) const {
    GridField out(grid);
    const double dx = grid.dx();
    for (std::size_t i = 0; i < grid.n_cells(); ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < sub; ++k) s += (*this)(t, i * dx + (k + 0.5) * dx / sub);
      out[i] = s / static_cast<double>(sub);
    }
    return out;
  }

  Trajectory exact_trajectory(const TorusGrid& grid, const std::vector<double>& times, std::size_t sub = 32) const {
    TrajectoryMeta meta;
    meta.scheme = "exact";
    Trajectory traj(grid, meta);
    for (double t : times) traj.push(t, cell_averages(grid, t, sub));
    return traj;
  }

 private:
  std::vector<double> positions_, states_;
  std::vector<WaveFan> fans_;
};

/// u_a on [0, 0.5), u_b on [0.5, 1): the torus realization of a Riemann problem at x = 0.5.
inline PeriodicRiemannSolution two_jump_solution(const model::ModelCoefficients& m, double u_a, double u_b) {
  return PeriodicRiemannSolution(m, {0.0, 0.5}, {u_a, u_b});
}

inline GridField two_jump_data(const TorusGrid& grid, double u_a, double u_b) {
  return GridField::sample(grid, [=](double x) { return x < 0.5 ? u_a : u_b; });
}

}  // namespace sclaw::hyperbolic
