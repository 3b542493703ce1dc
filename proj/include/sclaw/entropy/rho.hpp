#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include "sclaw/entropy/profile.hpp"
#include "sclaw/model/entropy_pair.hpp"
#include "sclaw/numerics/quadrature.hpp"

namespace sclaw::entropy {

/// Chord-defect density of one shock, carried by the curve (t, x(t)) and parametrized by t:
/// r(v, t) = s (f(v) - f(u-) - sigma (v - u-)) for v between the states, with s = -1 on
/// up-jumps (u- < u+) and s = +1 on down-jumps.
struct ShockDensity {
  std::size_t shock = 0;
  std::shared_ptr<const model::ModelCoefficients> model;
  Shock curve;

  double lo(double t) const { return std::min(curve.u_minus(t), curve.u_plus(t)); }
  double hi(double t) const { return std::max(curve.u_minus(t), curve.u_plus(t)); }

  double operator()(double v, double t) const {
    const double a = curve.u_minus(t), b = curve.u_plus(t);
    if (a == b || v < std::min(a, b) || v > std::max(a, b)) return 0.0;
    const double s = a < b ? -1.0 : 1.0;
    return s * (model->f(v) - model->f(a) - curve.sigma(t) * (v - a));
  }
};

/// Entropy-production measure of a piecewise-smooth weak solution: zero on smooth parts,
/// a density in v times the curve measure on every shock.
struct RhoMeasure {
  std::vector<ShockDensity> shocks;
  bool smooth_part_zero = true;

  /// sum over shocks of int dt phi(t, x(t)) int r(v, t) eta''(v) dv.
  /// Gauss panels in t and in v; kinks of eta'' must be avoided by the caller.
  double production(const model::EntropyPair& pair, const model::SpaceTimeFunction& phi, int t_panels = 16,
                    int v_panels = 16) const {
    double total = 0.0;
    for (const auto& s : shocks) {
      auto slice = [&](double t) {
        const double lo = s.lo(t), hi = s.hi(t);
        if (hi <= lo) return 0.0;
        const double inner =
            numerics::composite_gauss([&](double v) { return s(v, t) * pair.eta2(v); }, lo, hi, v_panels, 10);
        const double x = s.curve.x(t);
        return phi(t, x - std::floor(x)) * inner;
      };
      total += numerics::composite_gauss(slice, s.curve.t0, s.curve.t1, t_panels, 10);
    }
    return total;
  }
};

/// Throws on a Rankine-Hugoniot violation.
inline RhoMeasure rho_of_profile(const PiecewiseSmoothProfile& profile, const model::ModelCoefficients& m) {
  profile.validate(m);
  RhoMeasure rho;
  auto mp = std::make_shared<const model::ModelCoefficients>(m);
  for (std::size_t k = 0; k < profile.shocks().size(); ++k) rho.shocks.push_back({k, mp, profile.shocks()[k]});
  return rho;
}

/// Independent oracle: sum over shocks of int dt phi(t, x(t)) ([q] - sigma [eta]) with
/// [g] = g(u+) - g(u-).
inline double jump_production(const PiecewiseSmoothProfile& profile, const model::EntropyPair& pair,
                              const model::SpaceTimeFunction& phi, int t_panels = 16) {
  double total = 0.0;
  for (const auto& s : profile.shocks()) {
    auto slice = [&](double t) {
      const double a = s.u_minus(t), b = s.u_plus(t);
      const double x = s.x(t);
      return phi(t, x - std::floor(x)) * ((pair.q(b) - pair.q(a)) - s.sigma(t) * (pair.eta(b) - pair.eta(a)));
    };
    total += numerics::composite_gauss(slice, s.t0, s.t1, t_panels, 10);
  }
  return total;
}

}  // namespace sclaw::entropy
