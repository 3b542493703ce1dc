#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "sclaw/core/errors.hpp"
#include "sclaw/core/grid.hpp"
#include "sclaw/core/rng.hpp"
#include "sclaw/ratefun/young.hpp"
#include "sclaw/spde/simulate.hpp"
#include "sclaw/spde/stepper.hpp"

namespace sclaw::rareevent {

/// A tilted trajectory with its importance weight.
/// log_rn_weight = log dP/dQ along the path = martingale - quadratic_variation / 2, where
/// martingale = amp^-1 sum <h, dW> and quadratic_variation = amp^-2 sum |h|^2 dt, with
/// h = j * (a(v) grad psi) and dW the increments actually drawn.
struct TiltedRun {
  Trajectory trajectory;
  double log_rn_weight = 0.0;
  double martingale = 0.0;
  double quadratic_variation = 0.0;
  /// amp^2 quadratic_variation / 2 = 1/2 sum |h|^2 dx dt.
  double cost_estimate = 0.0;
};

/// Face velocities g = a(v) grad psi at every stored control time.
inline std::vector<std::vector<double>> control_velocities(const ratefun::ControlField& c) {
  std::vector<std::vector<double>> g(c.times.size(), std::vector<double>(c.grid.n_cells()));
  for (std::size_t k = 0; k < c.times.size(); ++k)
    for (std::size_t i = 0; i < c.grid.n_cells(); ++i) g[k][i] = std::sqrt(c.face_a2[k][i]) * c.gradient(k, i);
  return g;
}

/// Euler-Maruyama run of the SPDE with the extra flux a(u) (j * j * (a(v) grad psi)), the
/// control taken linearly in time between its stored slices.
inline TiltedRun simulate_tilted(const model::ModelCoefficients& m, const spde::SpdeParams& p,
                                 const spde::NoisePlan& plan, const ratefun::ControlField& control,
                                 const GridField& u0, RngStream& stream) {
  if (!(p.eps > 0.0)) throw PreconditionError("simulate_tilted: eps must be positive");
  if (!(control.grid == u0.grid())) throw StructuralError("simulate_tilted: control and data on different grids");
  if (!(plan.kernel.grid() == u0.grid())) throw StructuralError("simulate_tilted: kernel and data on different grids");
  if (control.psi.empty() || !std::isfinite(control.cost))
    throw PreconditionError("simulate_tilted: control has no finite slices");
  if (control.times.front() != 0.0 || control.times.back() < p.T * (1 - 1e-12))
    throw PreconditionError("simulate_tilted: control slices do not cover [0, T]");
  if (!u0.all_finite() || u0.min() < 0.0 || u0.max() > 1.0)
    throw PreconditionError("simulate_tilted: initial datum must take values in [0,1]");

  const TorusGrid grid = u0.grid();
  const std::size_t n = grid.n_cells();
  const double dx = grid.dx();
  const double amp = p.amplitude();
  const auto tg = spde::resolve_time_grid(m, p, plan, grid);
  const auto G = control_velocities(control);
  bool null_tilt = true;
  for (const auto& s : G)
    for (double x : s) null_tilt = null_tilt && x == 0.0;

  TrajectoryMeta meta;
  meta.scheme = "em+tilt";
  meta.eps = p.eps;
  meta.gamma = p.gamma;
  meta.dt = tg.dt;
  meta.seed = stream.master_seed();
  meta.stream_index = stream.stream_index();
  meta.store_stride = tg.stride;
  TiltedRun run{Trajectory(grid, meta)};
  run.trajectory.push(0.0, u0);

  spde::Stepper st = spde::make_stepper(m, p, plan, grid, tg.dt);
  std::vector<double> u = u0.data(), next(n), g(n), h(n), jh(n), E(n);
  std::size_t slice = 0;
  for (std::size_t step = 1; step <= tg.n_steps; ++step) {
    const double t0 = tg.time(step - 1);
    if (!null_tilt) {
      while (slice + 2 < control.times.size() && control.times[slice + 1] <= t0) ++slice;
      const double th =
          std::clamp((t0 - control.times[slice]) / (control.times[slice + 1] - control.times[slice]), 0.0, 1.0);
      for (std::size_t i = 0; i < n; ++i) g[i] = (1 - th) * G[slice][i] + th * G[slice + 1][i];
      plan.kernel.convolve(g, h);
      plan.kernel.convolve(h, jh);
      const auto& af = st.face_amplitudes(u);
      for (std::size_t i = 0; i < n; ++i) E[i] = af[i] * jh[i];
    }
    st.step(u, u, stream, next, null_tilt ? nullptr : &E);
    if (!null_tilt) {
      const auto& dw = st.last_dw();
      double dm = 0.0, dq = 0.0;
      for (std::size_t i = 0; i < n; ++i) dm += h[i] * dw[i], dq += h[i] * h[i];
      dm *= dx / amp;
      dq *= dx * tg.dt / (amp * amp);
      run.martingale += dm;
      run.quadratic_variation += dq;
    }
    u.swap(next);
    const double t = step == tg.n_steps ? p.T : tg.time(step);
    spde::check_step(u, step, t);
    if (step % tg.stride == 0) run.trajectory.push(t, GridField(grid, u));
  }
  run.log_rn_weight = run.martingale - 0.5 * run.quadratic_variation;
  run.cost_estimate = 0.5 * amp * amp * run.quadratic_variation;
  return run;
}

/// Target frame at time t, linear between the stored frames of `target`.
inline GridField frame_at(const Trajectory& target, double t) {
  const auto& ts = target.times();
  if (t <= ts.front()) return target.front();
  if (t >= ts.back()) return target.back();
  const std::size_t k = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin()) - 1;
  const double th = (t - ts[k]) / (ts[k + 1] - ts[k]);
  GridField out(target.grid());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1 - th) * target.frames()[k][i] + th * target.frames()[k + 1][i];
  return out;
}

/// sup over the stored times of `traj` of the L1 distance to `target` (interpolated in time).
inline double sup_l1_to(const Trajectory& traj, const Trajectory& target) {
  double s = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k)
    s = std::max(s, l1_distance(traj.frames()[k], frame_at(target, traj.times()[k])));
  return s;
}

}  // namespace sclaw::rareevent
