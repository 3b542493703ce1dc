#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "sclaw/core/errors.hpp"
#include "sclaw/core/grid.hpp"
#include "sclaw/model/coefficients.hpp"
#include "sclaw/numerics/quadrature.hpp"
#include "sclaw/ratefun/rfun.hpp"
#include "sclaw/ratefun/young.hpp"

namespace sclaw::ratefun {

struct IOptions {
  double mass_tol = 1e-6;
  std::size_t scan = 64;
  std::size_t table_w = 257;
  std::size_t table_c = 257;
  std::size_t support = 201;
  /// Reuse a table built for the same model and c range.
  std::shared_ptr<const RTable> table;
};

/// Face flux potential per stored time: Phi_{i+1/2} - Phi_{i-1/2} = -(D_t u)_i dx, Phi_{-1/2} = 0.
inline std::vector<double> flux_potential(const GridField& dtu) {
  const std::size_t n = dtu.size();
  const double dx = dtu.grid().dx();
  std::vector<double> phi(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc -= dtu[i] * dx;
    phi[i] = acc;
  }
  return phi;
}

/// Contraction functional: sum_k w_k min_c 1/2 sum_faces R(u_face, Phi_face + c) dx.
/// R comes from a tabulated moment polygon; each face also takes the two-cell measure
/// 1/2 (delta_{u_i} + delta_{u_{i+1}}) as a candidate, and the shift from the elliptic
/// solve is tried besides the scan, so the value never exceeds the Young functional of delta_u.
inline FunctionalResult i_functional(const Trajectory& traj, const model::ModelCoefficients& m, IOptions opt = {}) {
  const std::size_t n = traj.grid().n_cells(), K = traj.size();
  if (K < 2) throw PreconditionError("i_functional: need at least two stored frames");
  const double dx = traj.grid().dx();
  const double m0 = traj.front().integral();
  for (std::size_t k = 1; k < K; ++k) {
    const double d = std::abs(traj.frames()[k].integral() - m0);
    if (d > opt.mass_tol)
      throw PreconditionError("i_functional: mass drifts by " + std::to_string(d) + " at t=" +
                              std::to_string(traj.times()[k]));
  }
  const SliceData s = slice_data(traj, m);
  detail::check_time_step(s);

  // Shifts c making Phi + c equal the elliptic face flux F + A grad psi.
  EllipticOptions eo;
  eo.init_tol = kInf;
  eo.mass_tol = kInf;
  eo.continuity_rate = kInf;
  ControlField ctl;
  const auto ell = elliptic_functional(s, traj.front(), eo, &ctl);

  std::vector<std::vector<double>> Phi(K);
  double phi_lo = 0.0, phi_hi = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    Phi[k] = flux_potential(time_derivative(traj.frames(), traj.times(), k));
    for (double p : Phi[k]) phi_lo = std::min(phi_lo, p), phi_hi = std::max(phi_hi, p);
  }
  const double c_lo = m.f_min() - phi_hi, c_hi = m.f_max() - phi_lo;
  const double pad = 0.25 * (m.f_max() - m.f_min()) + 1e-3;
  auto table = opt.table;
  if (!table || table->c_lo() > m.f_min() - pad - (phi_hi - phi_lo) || table->c_hi() < m.f_max() + pad + (phi_hi - phi_lo))
    table = std::make_shared<RTable>(m, m.f_min() - pad - (phi_hi - phi_lo), m.f_max() + pad + (phi_hi - phi_lo),
                                     opt.table_w, opt.table_c, opt.support);

  FunctionalResult res;
  res.weights = trapezoid_weights(traj.times());
  res.per_slice.assign(K, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    const auto& u = traj.frames()[k];
    std::vector<double> uf(n);
    for (std::size_t i = 0; i < n; ++i)
      uf[i] = std::clamp(0.5 * (u[i] + u[i + 1 == n ? 0 : i + 1]), 0.0, 1.0);
    auto J = [&](double c) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double target = Phi[k][i] + c;
        const double two = moment_objective(s.face_flux[k][i], s.face_a2[k][i], target);
        acc += std::min((*table)(uf[i], target), two);
      }
      return 0.5 * acc * dx;
    };
    double best_c = c_lo, best = kInf;
    for (std::size_t j = 0; j < opt.scan; ++j) {
      const double c = c_lo + (c_hi - c_lo) * static_cast<double>(j) / (opt.scan - 1);
      const double v = J(c);
      if (v < best) best = v, best_c = c;
    }
    if (std::isfinite(best)) {
      const double h = (c_hi - c_lo) / (opt.scan - 1);
      const auto [c_ref, v_ref] = numerics::golden_section(J, best_c - h, best_c + h, 1e-10, 200);
      if (v_ref < best) best = v_ref;
    }
    if (ell.finite && !ctl.psi.empty()) {
      // Phi_face + c = F_face + A_face grad psi_face holds for a unique c.
      const double A0 = ctl.face_a2[k][0];
      const double c = s.face_flux[k][0] + A0 * ctl.gradient(k, 0) - Phi[k][0];
      best = std::min(best, J(c));
    }
    res.per_slice[k] = best;
    res.value += res.weights[k] * best;
  }
  if (!std::isfinite(res.value)) {
    res.finite = false;
    res.diagnostic = "no finite shift on some slice";
  }
  return res;
}

}  // namespace sclaw::ratefun
