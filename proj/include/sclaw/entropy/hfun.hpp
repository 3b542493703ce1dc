#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "sclaw/entropy/rho.hpp"
#include "sclaw/numerics/quadrature.hpp"

namespace sclaw::entropy {

struct HResult {
  double value = 0.0;
  bool finite = true;
  std::vector<double> per_shock;
  std::string diagnostic;

  std::string to_text() const {
    std::ostringstream os;
    os.precision(10);
    os << "H = " << value << (finite ? "" : " (divergent)") << "\n";
    for (std::size_t k = 0; k < per_shock.size(); ++k) os << "  shock " << k << ": " << per_shock[k] << "\n";
    if (!diagnostic.empty()) os << "  " << diagnostic << "\n";
    return os.str();
  }
};

/// H(u) = sum over shocks of int dt int max(r(v, t), 0) D(v) / a^2(v) dv.
/// Adaptive Gauss-Kronrod in v (absolute tolerance `v_tol`), composite Gauss in t.
/// Positive density where a^2 = 0 < D, or a quadrature that does not settle, gives +inf.
inline HResult h_functional(const PiecewiseSmoothProfile& profile, const model::ModelCoefficients& m,
                            double v_tol = 1e-9, int t_panels = 8) {
  const auto rho = rho_of_profile(profile, m);
  HResult out;
  for (const auto& s : rho.shocks) {
    bool ok = true;
    auto slice = [&](double t) {
      const double lo = s.lo(t), hi = s.hi(t);
      if (hi <= lo || !ok) return 0.0;
      auto integrand = [&](double v) {
        const double r = s(v, t);
        if (!(r > 0.0)) return 0.0;
        const double a2 = m.a2(v);
        if (!(a2 > 0.0)) return m.D(v) > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
        return r * m.D(v) / a2;
      };
      const auto q = numerics::adaptive_gauss_kronrod(integrand, lo, hi, v_tol);
      if (!q.converged || !std::isfinite(q.value)) {
        ok = false;
        return 0.0;
      }
      return q.value;
    };
    const double h = numerics::composite_gauss(slice, s.curve.t0, s.curve.t1, t_panels, 8);
    if (!ok) {
      out.finite = false;
      out.per_shock.push_back(std::numeric_limits<double>::infinity());
      out.diagnostic = "shock " + std::to_string(s.shock) + ": divergent v-integral of r+ D / a^2";
      continue;
    }
    out.per_shock.push_back(h);
    out.value += h;
  }
  if (!out.finite) out.value = std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace sclaw::entropy
