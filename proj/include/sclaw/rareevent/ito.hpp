#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "sclaw/core/errors.hpp"
#include "sclaw/core/grid.hpp"
#include "sclaw/core/rng.hpp"
#include "sclaw/entropy/production.hpp"
#include "sclaw/hyperbolic/flux.hpp"
#include "sclaw/model/entropy_pair.hpp"
#include "sclaw/spde/stepper.hpp"

namespace sclaw::rareevent {

/// Terms of the discrete Ito balance, all summed over steps and cells (times dx).
///   lhs = int theta(u(T), T) dx + sampled production
///   rhs = transport + viscous + martingale + ito - flux_term
/// where the four increments split theta'(u^n) (u^{n+1} - u^n) by the parts of the step,
/// ito = 1/2 theta''(u^n) (noise increment)^2 uses the realized squared increments and
/// flux_term = sum dt (Q at right face - Q at left face). transport_defect =
/// transport - flux_term is the entropy the upwind flux dissipates.
struct ItoReport {
  double lhs = 0.0;
  double transport = 0.0;
  double viscous = 0.0;
  double martingale = 0.0;
  double ito = 0.0;
  double flux_term = 0.0;
  double transport_defect = 0.0;
  double residual = 0.0;  // |lhs - rhs|
  std::size_t steps = 0;

  double rhs() const noexcept { return transport + viscous + martingale + ito - flux_term; }

  std::string to_text() const {
    std::ostringstream os;
    os.precision(10);
    os << "steps=" << steps << " lhs=" << lhs << " rhs=" << rhs() << " residual=" << residual << "\n"
       << "  transport=" << transport << " viscous=" << viscous << " martingale=" << martingale << " ito=" << ito
       << " flux_term=" << flux_term << " transport_defect=" << transport_defect << "\n";
    return os.str();
  }
};

/// Replays the noise of an Euler-Maruyama trajectory stored at every step and evaluates the
/// Ito balance for `sampler`. Throws PreconditionError when the metadata cannot reproduce the
/// run (wrong scheme, stride, eps or seed) or the replay disagrees with the stored frames.
inline ItoReport ito_residual(const Trajectory& traj, const model::ModelCoefficients& m, const spde::SpdeParams& p,
                              const spde::NoisePlan& plan, const model::EntropySampler& s) {
  const auto& meta = traj.meta();
  if (meta.scheme != "em") throw PreconditionError("ito_residual: needs an em trajectory, got '" + meta.scheme + "'");
  if (!(meta.dt > 0.0)) throw PreconditionError("ito_residual: trajectory carries no step size");
  if (meta.store_stride != 1) throw PreconditionError("ito_residual: trajectory must be stored at every step");
  if (meta.eps != p.eps) throw PreconditionError("ito_residual: eps differs from the trajectory metadata");
  if (traj.size() < 2) throw PreconditionError("ito_residual: need at least two frames");
  if (!(plan.kernel.grid() == traj.grid())) throw StructuralError("ito_residual: kernel and data on different grids");

  const TorusGrid g = traj.grid();
  const std::size_t n = g.n_cells();
  const double dx = g.dx();
  const auto& times = traj.times();
  spde::Stepper st = spde::make_stepper(m, p, plan, g, meta.dt);
  RngStream stream(meta.seed, meta.stream_index);
  hyperbolic::StencilWorkspace ws;
  std::vector<double> out(n), adv(n);

  ItoReport r;
  r.steps = traj.size() - 1;
  for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
    const auto& u = traj.frames()[k].values();
    const auto& v = traj.frames()[k + 1].values();
    st.step(u, u, stream, out);
    double scale = 1.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(v[i]));
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(out[i] - v[i]) > 1e-12 * scale)
        throw PreconditionError("ito_residual: replayed step " + std::to_string(k + 1) +
                                " does not reproduce the stored frame");
    hyperbolic::deterministic_update(m, u, u, st.lambda(), 0.0, ws, adv);
    const auto& det = st.last_deterministic();
    const auto& noise = st.last_noise();
    const double t1 = times[k + 1], tm = 0.5 * (times[k] + t1), dt = t1 - times[k];
    double tr = 0, vi = 0, ma = 0, it = 0, fq = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = g.center(i);
      const double d1 = s.theta_v(u[i], t1, x), d2 = s.theta_vv(u[i], t1, x);
      tr += d1 * (adv[i] - u[i]);
      vi += d1 * (det[i] - adv[i]);
      ma += d1 * noise[i];
      it += 0.5 * d2 * noise[i] * noise[i];
      const double xl = static_cast<double>(i) * dx, xr = i + 1 == n ? 0.0 : static_cast<double>(i + 1) * dx;
      fq += s.Q(u[i], tm, xr) - s.Q(u[i], tm, xl);
    }
    r.transport += tr * dx;
    r.viscous += vi * dx;
    r.martingale += ma * dx;
    r.ito += it * dx;
    r.flux_term += fq * dt;
  }
  double fin = 0.0;
  for (std::size_t i = 0; i < n; ++i) fin += s.theta(traj.back()[i], times.back(), g.center(i));
  r.lhs = fin * dx + entropy::sampled_production(traj, s).value;
  r.transport_defect = r.transport - r.flux_term;
  r.residual = std::abs(r.lhs - r.rhs());
  return r;
}

}  // namespace sclaw::rareevent
