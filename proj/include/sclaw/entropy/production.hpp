#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "sclaw/core/grid.hpp"
#include "sclaw/core/log.hpp"
#include "sclaw/model/entropy_pair.hpp"

namespace sclaw::entropy {

struct ProductionResult {
  double value = 0.0;
  /// Largest stored interval and the stepping dt it is compared with.
  double dt_store_max = 0.0;
  double dt_step = 0.0;
  bool coarse_stride = false;
  std::string warning;
};

namespace detail {

inline void stride_check(const Trajectory& traj, ProductionResult& r) {
  const auto& t = traj.times();
  for (std::size_t k = 0; k + 1 < t.size(); ++k) r.dt_store_max = std::max(r.dt_store_max, t[k + 1] - t[k]);
  r.dt_step = traj.meta().dt;
  if (r.dt_step > 0.0 && r.dt_store_max > 10.0 * r.dt_step) {
    r.coarse_stride = true;
    r.warning = "stored interval " + std::to_string(r.dt_store_max) + " exceeds 10 dt = " +
                std::to_string(10.0 * r.dt_step) + "; time quadrature is coarse";
    log_warn(r.warning);
  }
}

inline void require_frames(const Trajectory& traj) {
  if (traj.size() < 2) throw PreconditionError("entropy production needs at least two stored frames");
}

}  // namespace detail

/// -<eta(u0), phi(0)> - <<eta(u), d_t phi>> - <<q(u), d_x phi>>.
/// u is held at its left value on each stored interval; the time term uses the exact
/// increments of phi and the flux term the face differences of phi at the interval
/// midpoint, so constant states give zero up to rounding.
inline ProductionResult entropy_production_weak(const Trajectory& traj, const model::EntropyPair& pair,
                                                const model::SpaceTimeFunction& phi) {
  detail::require_frames(traj);
  ProductionResult r;
  detail::stride_check(traj, r);
  const auto& g = traj.grid();
  const std::size_t n = g.n_cells();
  const double dx = g.dx();
  const auto& times = traj.times();
  std::vector<double> face_phi(n + 1), eta(n), q(n);

  double init = 0.0;
  for (std::size_t i = 0; i < n; ++i) init += pair.eta(traj.front()[i]) * phi(0.0, g.center(i));
  double total = -init * dx;

  for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
    const auto& u = traj.frames()[k];
    const double t0 = times[k], t1 = times[k + 1], tm = 0.5 * (t0 + t1);
    for (std::size_t i = 0; i < n; ++i) {
      eta[i] = pair.eta(u[i]);
      q[i] = pair.q(u[i]);
    }
    double time_term = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = g.center(i);
      time_term += eta[i] * (phi(t1, x) - phi(t0, x));
    }
    for (std::size_t j = 0; j < n; ++j) face_phi[j] = phi(tm, static_cast<double>(j) * dx);
    face_phi[n] = face_phi[0];
    double flux_term = 0.0;
    for (std::size_t i = 0; i < n; ++i) flux_term += q[i] * (face_phi[i + 1] - face_phi[i]);
    total -= time_term * dx + (t1 - t0) * flux_term;
  }
  r.value = total;
  return r;
}

/// -int theta(u0, 0, x) dx - int int [(d_t theta)(u, t, x) + (d_x Q)(u, t, x)] dx dt with the
/// same quadrature as entropy_production_weak: both derivatives are taken at frozen v as
/// exact increments of theta in t and of Q across the two faces of each cell.
inline ProductionResult sampled_production(const Trajectory& traj, const model::EntropySampler& s) {
  detail::require_frames(traj);
  ProductionResult r;
  detail::stride_check(traj, r);
  const auto& g = traj.grid();
  const std::size_t n = g.n_cells();
  const double dx = g.dx();
  const auto& times = traj.times();

  double init = 0.0;
  for (std::size_t i = 0; i < n; ++i) init += s.theta(traj.front()[i], 0.0, g.center(i));
  double total = -init * dx;

  for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
    const auto& u = traj.frames()[k];
    const double t0 = times[k], t1 = times[k + 1], tm = 0.5 * (t0 + t1);
    double time_term = 0.0, flux_term = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = u[i], x = g.center(i);
      time_term += s.theta(v, t1, x) - s.theta(v, t0, x);
      const double xl = static_cast<double>(i) * dx, xr = i + 1 == n ? 0.0 : static_cast<double>(i + 1) * dx;
      flux_term += s.Q(v, tm, xr) - s.Q(v, tm, xl);
    }
    total -= time_term * dx + (t1 - t0) * flux_term;
  }
  r.value = total;
  return r;
}

}  // namespace sclaw::entropy
