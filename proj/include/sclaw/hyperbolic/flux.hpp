#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "sclaw/core/grid.hpp"
#include "sclaw/model/coefficients.hpp"

namespace sclaw::hyperbolic {

/// Engquist-Osher flux F(a, b) = f+(a) + f-(b) with f- = f - f+.
inline double eo_flux(const model::ModelCoefficients& m, double a, double b) {
  return m.f_plus(a) + (m.f(b) - m.f_plus(b));
}

/// Scratch buffers for the finite-volume update; reused across steps.
struct StencilWorkspace {
  std::vector<double> fp, fv, flux, dcell, dface;

  void resize(std::size_t n) {
    fp.resize(n);
    fv.resize(n);
    flux.resize(n);
    dcell.resize(n);
    dface.resize(n);
  }
};

/// Face fluxes F[i] at x_{i+1/2} for the cell averages u.
inline void eo_face_fluxes(const model::ModelCoefficients& m, std::span<const double> u, StencilWorkspace& ws) {
  const std::size_t n = u.size();
  for (std::size_t i = 0; i < n; ++i) {
    ws.fp[i] = m.f_plus(u[i]);
    ws.fv[i] = m.f(u[i]);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) ws.flux[i] = ws.fp[i] + (ws.fv[i + 1] - ws.fp[i + 1]);
  ws.flux[n - 1] = ws.fp[n - 1] + (ws.fv[0] - ws.fp[0]);
}

/// Deterministic part of one explicit step:
///   out_i = u_i - lambda (F_{i+1/2} - F_{i-1/2}) + mu (D_{i+1/2}(u_{i+1}-u_i) - D_{i-1/2}(u_i-u_{i-1}))
/// with lambda = dt/dx, mu = eps dt / (2 dx^2), and D_{i+1/2} the mean of D over
/// the two cells evaluated on `d_at` (u itself, or a frozen field).
inline void deterministic_update(const model::ModelCoefficients& m, std::span<const double> u,
                                 std::span<const double> d_at, double lambda, double mu,
                                 StencilWorkspace& ws, std::span<double> out) {
  const std::size_t n = u.size();
  ws.resize(n);
  eo_face_fluxes(m, u, ws);
  for (std::size_t i = 0; i < n; ++i) ws.dcell[i] = m.D(d_at[i]);
  for (std::size_t i = 0; i < n; ++i) ws.dface[i] = 0.5 * (ws.dcell[i] + ws.dcell[i + 1 == n ? 0 : i + 1]);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t l = i == 0 ? n - 1 : i - 1;
    const std::size_t r = i + 1 == n ? 0 : i + 1;
    out[i] = u[i] - lambda * (ws.flux[i] - ws.flux[l]) +
             mu * (ws.dface[i] * (u[r] - u[i]) - ws.dface[l] * (u[i] - u[l]));
  }
}

inline double total_variation(std::span<const double> u) {
  double tv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) tv += std::abs(u[(i + 1) % u.size()] - u[i]);
  return tv;
}

/// Largest cell entropy production of one zero-viscosity step for eta = |v - k|:
///   |u'_i - k| - |u_i - k| + lambda (G_{i+1/2} - G_{i-1/2}),
/// with the numerical entropy flux G(a, b) = F(a v k, b v k) - F(a ^ k, b ^ k).
inline double kruzkov_cell_production(const model::ModelCoefficients& m, std::span<const double> u_old,
                                      std::span<const double> u_new, double k, double lambda) {
  const std::size_t n = u_old.size();
  auto G = [&](double a, double b) {
    return eo_flux(m, std::max(a, k), std::max(b, k)) - eo_flux(m, std::min(a, k), std::min(b, k));
  };
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = G(u_old[i], u_old[(i + 1) % n]);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t l = i == 0 ? n - 1 : i - 1;
    const double p = std::abs(u_new[i] - k) - std::abs(u_old[i] - k) + lambda * (g[i] - g[l]);
    worst = std::max(worst, p);
  }
  return worst;
}

}  // namespace sclaw::hyperbolic
