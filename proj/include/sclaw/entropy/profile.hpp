#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "sclaw/core/errors.hpp"
#include "sclaw/core/grid.hpp"
#include "sclaw/hyperbolic/riemann.hpp"
#include "sclaw/model/coefficients.hpp"
#include "sclaw/model/polynomial.hpp"

namespace sclaw::entropy {

using TimeFn = std::function<double(double)>;

/// A jump curve x(t) on [t0, t1] with speed sigma = x'(t) and one-sided states.
struct Shock {
  TimeFn x;
  TimeFn sigma;
  TimeFn u_minus;
  TimeFn u_plus;
  double t0 = 0.0;
  double t1 = 1.0;
};

/// Constant states and a polynomial curve.
inline Shock polynomial_shock(const model::Polynomial& x, double u_minus, double u_plus, double t0, double t1) {
  return {[x](double t) { return x(t); }, [d = x.derivative()](double t) { return d(t); },
          [u_minus](double) { return u_minus; }, [u_plus](double) { return u_plus; }, t0, t1};
}

/// Bounded piecewise-smooth field on [0, T] x torus: an evaluator for u away from the
/// jump set and the list of shocks. The value on a shock curve itself is irrelevant.
class PiecewiseSmoothProfile {
 public:
  PiecewiseSmoothProfile(double horizon, std::function<double(double, double)> value, std::vector<Shock> shocks)
      : horizon_(horizon), value_(std::move(value)), shocks_(std::move(shocks)) {
    if (!(horizon_ > 0.0)) throw PreconditionError("profile horizon must be positive");
    for (const auto& s : shocks_)
      if (!(s.t0 >= 0.0 && s.t1 <= horizon_ * (1.0 + 1e-12) && s.t0 < s.t1))
        throw PreconditionError("shock time interval must lie in [0, T]");
  }

  double horizon() const noexcept { return horizon_; }
  const std::vector<Shock>& shocks() const noexcept { return shocks_; }
  bool has_value() const noexcept { return static_cast<bool>(value_); }
  double operator()(double t, double x) const { return value_(t, x - std::floor(x)); }

  /// Sampling times used for per-shock checks: `n` uniform points incl. the endpoints.
  static std::vector<double> sample_times(const Shock& s, std::size_t n = 65) {
    std::vector<double> t(n);
    for (std::size_t k = 0; k < n; ++k) t[k] = s.t0 + (s.t1 - s.t0) * static_cast<double>(k) / (n - 1);
    return t;
  }

  /// max over shocks and sampled times of |f(u+) - f(u-) - sigma (u+ - u-)|.
  double rankine_hugoniot_defect(const model::ModelCoefficients& m) const {
    double worst = 0.0;
    for (const auto& s : shocks_)
      for (double t : sample_times(s)) {
        const double a = s.u_minus(t), b = s.u_plus(t);
        worst = std::max(worst, std::abs(m.f(b) - m.f(a) - s.sigma(t) * (b - a)));
      }
    return worst;
  }

  /// Throws unless every shock satisfies Rankine-Hugoniot to `tol` and all states lie in [0,1].
  void validate(const model::ModelCoefficients& m, double tol = 1e-10) const {
    for (std::size_t k = 0; k < shocks_.size(); ++k)
      for (double t : sample_times(shocks_[k])) {
        const double a = shocks_[k].u_minus(t), b = shocks_[k].u_plus(t);
        if (!(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0))
          throw PreconditionError("shock " + std::to_string(k) + ": states outside [0,1] at t=" + std::to_string(t));
        const double d = std::abs(m.f(b) - m.f(a) - shocks_[k].sigma(t) * (b - a));
        if (d > tol)
          throw PreconditionError("shock " + std::to_string(k) + " violates Rankine-Hugoniot at t=" +
                                  std::to_string(t) + " (defect " + std::to_string(d) + ")");
      }
  }

  /// (min, max) of u over a space-time sample grid and all shock states.
  std::pair<double, double> range(std::size_t nt = 65, std::size_t nx = 1024) const {
    double lo = 1e300, hi = -1e300;
    if (value_)
      for (std::size_t k = 0; k < nt; ++k) {
        const double t = horizon_ * static_cast<double>(k) / (nt - 1);
        for (std::size_t i = 0; i < nx; ++i) {
          const double v = value_(t, (i + 0.5) / static_cast<double>(nx));
          lo = std::min(lo, v), hi = std::max(hi, v);
        }
      }
    for (const auto& s : shocks_)
      for (double t : sample_times(s))
        for (double v : {s.u_minus(t), s.u_plus(t)}) lo = std::min(lo, v), hi = std::max(hi, v);
    return {lo, hi};
  }

  /// Cell averages from `sub` midpoint samples per cell.
  GridField rasterize(const TorusGrid& grid, double t, std::size_t sub = 16) const {
    if (!value_) throw PreconditionError("profile has no evaluator to rasterize");
    GridField out(grid);
    const double dx = grid.dx();
    for (std::size_t i = 0; i < grid.n_cells(); ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < sub; ++k) s += value_(t, i * dx + (k + 0.5) * dx / sub);
      out[i] = s / static_cast<double>(sub);
    }
    return out;
  }

  Trajectory to_trajectory(const TorusGrid& grid, std::size_t n_intervals, std::size_t sub = 16) const {
    TrajectoryMeta meta;
    meta.scheme = "profile";
    Trajectory traj(grid, meta);
    for (std::size_t k = 0; k <= n_intervals; ++k) {
      const double t = k == n_intervals ? horizon_ : horizon_ * static_cast<double>(k) / n_intervals;
      traj.push(t, rasterize(grid, t, sub));
    }
    return traj;
  }

 private:
  double horizon_;
  std::function<double(double, double)> value_;
  std::vector<Shock> shocks_;
};

/// Piecewise-constant profile: curves x_k(t) (polynomials, ordered and non-crossing on
/// [0, T]) and states[k] on the arc from curve k to curve k+1. Curve k separates
/// states[k-1] (left) from states[k] (right).
inline PiecewiseSmoothProfile piecewise_constant_profile(double horizon, std::vector<model::Polynomial> curves,
                                                         std::vector<double> states) {
  const std::size_t n = curves.size();
  if (n == 0 || states.size() != n) throw PreconditionError("piecewise_constant_profile: need one state per curve");
  std::vector<Shock> shocks;
  for (std::size_t k = 0; k < n; ++k) {
    const double left = states[(k + n - 1) % n], right = states[k];
    if (left != right) shocks.push_back(polynomial_shock(curves[k], left, right, 0.0, horizon));
  }
  auto value = [curves, states](double t, double x) {
    std::size_t best = 0;
    double best_d = 2.0;
    for (std::size_t k = 0; k < curves.size(); ++k) {
      double d = x - curves[k](t);
      d -= std::floor(d);
      if (d < best_d) best_d = d, best = k;
    }
    return states[best];
  };
  return PiecewiseSmoothProfile(horizon, value, std::move(shocks));
}

/// Standing shock at x0 with u_left on the left and u_right on the right, closed on the
/// torus by a second standing jump at x0 + 1/2. Needs f(u_left) = f(u_right).
inline PiecewiseSmoothProfile standing_shock_pair(double horizon, double u_left, double u_right, double x0 = 0.5) {
  return piecewise_constant_profile(horizon, {model::Polynomial({x0 - 0.5}), model::Polynomial({x0})},
                                    {u_left, u_right});
}

/// Exact entropic solution of periodic Riemann data up to time T (before fans interact):
/// the shock waves of every fan become straight shock curves.
inline PiecewiseSmoothProfile profile_from_riemann(const hyperbolic::PeriodicRiemannSolution& sol, double horizon) {
  if (horizon > sol.valid_until() * (1.0 + 1e-12))
    throw PreconditionError("profile_from_riemann: T=" + std::to_string(horizon) + " exceeds the interaction time " +
                            std::to_string(sol.valid_until()));
  std::vector<Shock> shocks;
  for (const auto& fan : sol.fans())
    for (const auto& w : fan.waves())
      if (w.kind == hyperbolic::WaveKind::Shock)
        shocks.push_back(polynomial_shock(model::Polynomial({fan.problem().position, w.speed_lo}), w.u_minus,
                                          w.u_plus, 0.0, horizon));
  return PiecewiseSmoothProfile(horizon, [sol](double t, double x) { return sol(t, x); }, std::move(shocks));
}

}  // namespace sclaw::entropy
