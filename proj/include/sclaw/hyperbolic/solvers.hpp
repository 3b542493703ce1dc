#pragma once

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "sclaw/core/grid.hpp"
#include "sclaw/core/log.hpp"
#include "sclaw/hyperbolic/flux.hpp"
#include "sclaw/model/coefficients.hpp"

namespace sclaw::hyperbolic {

/// Number of steps and actual dt for an integration over [0, T]; n_steps is a
/// multiple of both `stride` and `multiple`.
struct TimeGrid {
  std::size_t n_steps = 0;
  double dt = 0.0;
  std::size_t stride = 1;

  double time(std::size_t step) const { return static_cast<double>(step) * dt; }
};

/// With dt_explicit > 0 the step must divide T exactly (relative 1e-9); otherwise
/// dt is the largest value <= dt_max that lands on T.
inline TimeGrid make_time_grid(double T, double dt_max, double dt_explicit, std::size_t stride,
                               std::size_t multiple = 1) {
  if (!(T > 0.0)) throw PreconditionError("time horizon must be positive");
  if (stride == 0) throw PreconditionError("store stride must be >= 1");
  const std::size_t m = std::lcm(stride, multiple);
  TimeGrid g;
  g.stride = stride;
  if (dt_explicit > 0.0) {
    const double steps = T / dt_explicit;
    const auto n = static_cast<std::size_t>(std::llround(steps));
    if (n == 0 || std::abs(static_cast<double>(n) * dt_explicit - T) > 1e-9 * T)
      throw PreconditionError("dt=" + std::to_string(dt_explicit) + " does not divide T=" + std::to_string(T));
    if (n % m != 0)
      throw PreconditionError("number of steps " + std::to_string(n) + " is not a multiple of " +
                              std::to_string(m));
    if (dt_explicit > dt_max * (1.0 + 1e-12))
      log_warn("dt=" + std::to_string(dt_explicit) + " exceeds the stability bound " + std::to_string(dt_max));
    g.n_steps = n;
  } else {
    if (!(dt_max > 0.0) || !std::isfinite(dt_max)) throw PreconditionError("invalid stability bound for dt");
    const double blocks = std::ceil(T / (dt_max * static_cast<double>(m)) - 1e-12);
    g.n_steps = static_cast<std::size_t>(std::max(1.0, blocks)) * m;
  }
  g.dt = T / static_cast<double>(g.n_steps);
  return g;
}

/// 0.25 min(dx / lip_f, dx^2 / (eps max D)); terms with a zero denominator drop out.
inline double viscous_dt_bound(const model::ModelCoefficients& m, double eps, double dx) {
  double b = std::numeric_limits<double>::infinity();
  if (m.lip_f() > 0.0) b = std::min(b, dx / m.lip_f());
  if (eps * m.d_max() > 0.0) b = std::min(b, dx * dx / (eps * m.d_max()));
  return 0.25 * b;
}

inline void check_finite_or_throw(std::span<const double> u, std::size_t step, double t) {
  for (double v : u)
    if (!std::isfinite(v)) throw BlowUpError(step, t, "non-finite value in solution");
}

namespace detail {

inline Trajectory run_deterministic(const model::ModelCoefficients& m, double eps, const GridField& u0,
                                    const TimeGrid& tg, const std::string& scheme) {
  const TorusGrid grid = u0.grid();
  const double dx = grid.dx();
  const double lambda = tg.dt / dx;
  const double mu = eps * tg.dt / (2.0 * dx * dx);
  TrajectoryMeta meta;
  meta.scheme = scheme;
  meta.eps = eps;
  meta.dt = tg.dt;
  meta.store_stride = tg.stride;
  Trajectory traj(grid, meta);
  traj.push(0.0, u0);
  std::vector<double> u = u0.data(), next(u.size());
  StencilWorkspace ws;
  for (std::size_t step = 1; step <= tg.n_steps; ++step) {
    deterministic_update(m, u, u, lambda, mu, ws, next);
    u.swap(next);
    if (step % tg.stride == 0 || step == tg.n_steps) {
      check_finite_or_throw(u, step, tg.time(step));
      traj.push(step == tg.n_steps ? tg.time(tg.n_steps) : tg.time(step), GridField(grid, u));
    }
  }
  return traj;
}

}  // namespace detail

/// du/dt + div f(u) = (eps/2) div(D(u) grad u) with the EO flux and centred diffusion.
/// dt <= 0 selects the stability bound.
inline Trajectory solve_viscous(const model::ModelCoefficients& m, double eps, const GridField& u0, double T,
                                double dt = 0.0, std::size_t stride = 1) {
  if (!(eps > 0.0)) throw PreconditionError("solve_viscous: eps must be positive");
  const double dx = u0.grid().dx();
  if (dx > eps / 4.0 * (1.0 + 1e-12))
    log_warn("solve_viscous: dx=" + std::to_string(dx) + " > eps/4; numerical viscosity is not negligible");
  const auto tg = make_time_grid(T, viscous_dt_bound(m, eps, dx), dt, stride);
  return detail::run_deterministic(m, eps, u0, tg, "viscous");
}

/// Zero-viscosity monotone EO scheme; dt <= 0 selects 0.45 dx / lip_f.
inline Trajectory solve_kruzkov(const model::ModelCoefficients& m, const GridField& u0, double T, double dt = 0.0,
                                std::size_t stride = 1) {
  const double dx = u0.grid().dx();
  const double cfl = m.lip_f() > 0.0 ? 0.5 * dx / m.lip_f() : std::numeric_limits<double>::infinity();
  if (dt > 0.0 && dt > cfl * (1.0 + 1e-12))
    throw PreconditionError("solve_kruzkov: CFL violated, dt=" + std::to_string(dt) +
                            " > 0.5 dx/lip_f=" + std::to_string(cfl));
  const double dt_max = std::isfinite(cfl) ? 0.9 * cfl : dx;
  const auto tg = make_time_grid(T, dt_max, dt, stride);
  return detail::run_deterministic(m, 0.0, u0, tg, "kruzkov");
}

}  // namespace sclaw::hyperbolic
