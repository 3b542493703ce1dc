#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "sclaw/core/grid.hpp"
#include "sclaw/core/rng.hpp"
#include "sclaw/hyperbolic/flux.hpp"
#include "sclaw/hyperbolic/solvers.hpp"
#include "sclaw/model/coefficients.hpp"
#include "sclaw/model/kernel.hpp"

namespace sclaw::spde {

struct SpdeParams {
  double eps = 0.1;
  double gamma = 1.0;
  double dt = 0.0;  // <= 0: stability bound
  std::size_t store_stride = 1;
  double T = 1.0;
  /// Replaces eps^gamma in front of the noise when set.
  std::optional<double> noise_amplitude;

  double amplitude() const { return noise_amplitude ? *noise_amplitude : std::pow(eps, gamma); }
};

/// Face-centred white-noise increments N(0, dt/dx), mollified by the kernel.
struct NoisePlan {
  model::MollifierKernel kernel;
};

/// 0.25 min(dx / lip_f, dx^2 / (eps max D), dx^2 / (amp^2 max a^2 ||j||^2)).
inline double stability_dt(const model::ModelCoefficients& m, const SpdeParams& p, const NoisePlan& plan,
                           const TorusGrid& grid) {
  const double dx = grid.dx();
  double b = 4.0 * hyperbolic::viscous_dt_bound(m, p.eps, dx);
  const double amp = p.amplitude();
  const double noise = amp * amp * m.a2_max() * plan.kernel.norm_l2_sq();
  if (noise > 0.0) b = std::min(b, dx * dx / noise);
  return 0.25 * b;
}

inline hyperbolic::TimeGrid resolve_time_grid(const model::ModelCoefficients& m, const SpdeParams& p,
                                              const NoisePlan& plan, const TorusGrid& grid,
                                              std::size_t multiple = 1) {
  return hyperbolic::make_time_grid(p.T, stability_dt(m, p, plan, grid), p.dt, p.store_stride, multiple);
}

/// One explicit step of the conservative-noise scheme. D and a are evaluated on
/// `coeff_at`, which is u for Euler-Maruyama and the frozen field for the split
/// scheme. The buffers of the last step stay readable for diagnostics.
class Stepper {
 public:
  Stepper(const model::ModelCoefficients& m, const NoisePlan& plan, const TorusGrid& grid, double eps,
          double amplitude, double dt)
      : m_(&m), plan_(&plan), grid_(grid), eps_(eps), amp_(amplitude), dt_(dt) {
    const std::size_t n = grid.n_cells();
    const double dx = grid.dx();
    lambda_ = dt / dx;
    mu_ = eps * dt / (2.0 * dx * dx);
    kappa_ = amplitude / dx;
    det_.resize(n);
    dw_.resize(n);
    conv_.resize(n);
    sface_.resize(n);
    noise_.resize(n);
    aface_.resize(n);
  }

  double dt() const noexcept { return dt_; }
  double lambda() const noexcept { return lambda_; }
  double mu() const noexcept { return mu_; }
  double kappa() const noexcept { return kappa_; }

  /// out = det(u) + kappa (S_{i+1/2} - S_{i-1/2}) [- lambda (E_{i+1/2} - E_{i-1/2})].
  void step(std::span<const double> u, std::span<const double> coeff_at, RngStream& stream,
            std::span<double> out, const std::vector<double>* tilt_faces = nullptr) {
    const std::size_t n = u.size();
    hyperbolic::deterministic_update(*m_, u, coeff_at, lambda_, mu_, ws_, det_);
    fill_gaussian(stream, dw_, dt_ / grid_.dx());
    noise_from_increments(coeff_at);
    for (std::size_t i = 0; i < n; ++i) out[i] = det_[i] + noise_[i];
    if (tilt_faces) {
      const auto& e = *tilt_faces;
      for (std::size_t i = 0; i < n; ++i) out[i] = out[i] - lambda_ * (e[i] - e[i == 0 ? n - 1 : i - 1]);
    }
  }

  /// Face values a(clamp(mean of coeff_at over the two cells)).
  const std::vector<double>& face_amplitudes(std::span<const double> coeff_at) {
    const std::size_t n = coeff_at.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double w = std::clamp(0.5 * (coeff_at[i] + coeff_at[i + 1 == n ? 0 : i + 1]), 0.0, 1.0);
      aface_[i] = m_->a(w);
    }
    return aface_;
  }

  /// Raw face increments Delta W of the last step.
  const std::vector<double>& last_dw() const noexcept { return dw_; }
  /// Mollified increments (j * Delta W) at faces.
  const std::vector<double>& last_convolved() const noexcept { return conv_; }
  /// The noise contribution kappa (S_{i+1/2} - S_{i-1/2}) per cell.
  const std::vector<double>& last_noise() const noexcept { return noise_; }
  /// Deterministic part of the last step.
  const std::vector<double>& last_deterministic() const noexcept { return det_; }

 private:
  void noise_from_increments(std::span<const double> coeff_at) {
    const std::size_t n = coeff_at.size();
    plan_->kernel.convolve(dw_, conv_);
    face_amplitudes(coeff_at);
    for (std::size_t i = 0; i < n; ++i) sface_[i] = aface_[i] * conv_[i];
    for (std::size_t i = 0; i < n; ++i) noise_[i] = kappa_ * (sface_[i] - sface_[i == 0 ? n - 1 : i - 1]);
  }

  const model::ModelCoefficients* m_;
  const NoisePlan* plan_;
  TorusGrid grid_;
  double eps_, amp_, dt_;
  double lambda_ = 0.0, mu_ = 0.0, kappa_ = 0.0;
  hyperbolic::StencilWorkspace ws_;
  std::vector<double> det_, dw_, conv_, sface_, noise_, aface_;
};

inline Stepper make_stepper(const model::ModelCoefficients& m, const SpdeParams& p, const NoisePlan& plan,
                            const TorusGrid& grid, double dt) {
  return Stepper(m, plan, grid, p.eps, p.amplitude(), dt);
}

inline void check_step(std::span<const double> u, std::size_t step, double t) {
  hyperbolic::check_finite_or_throw(u, step, t);
  for (double v : u)
    if (std::abs(v) > 1e6) throw BlowUpError(step, t, "overflow in solution (|u| > 1e6)");
}

/// One Euler-Maruyama step; dt is taken from params (the stability bound if unset).
inline GridField step_em(const GridField& u, const model::ModelCoefficients& m, const SpdeParams& p,
                         const NoisePlan& plan, RngStream& stream) {
  const double dt = p.dt > 0.0 ? p.dt : stability_dt(m, p, plan, u.grid());
  Stepper st = make_stepper(m, p, plan, u.grid(), dt);
  GridField out(u.grid());
  st.step(u.values(), u.values(), stream, out.values());
  check_step(out.values(), 1, dt);
  return out;
}

/// One semilinear step with D and a frozen at v.
inline GridField step_split(const GridField& u, const GridField& frozen_v, const model::ModelCoefficients& m,
                            const SpdeParams& p, const NoisePlan& plan, RngStream& stream) {
  require_same_grid(u, frozen_v, "step_split");
  const double dt = p.dt > 0.0 ? p.dt : stability_dt(m, p, plan, u.grid());
  Stepper st = make_stepper(m, p, plan, u.grid(), dt);
  GridField out(u.grid());
  st.step(u.values(), frozen_v.values(), stream, out.values());
  check_step(out.values(), 1, dt);
  return out;
}

}  // namespace sclaw::spde
