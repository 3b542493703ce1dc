#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "sclaw/model/coefficients.hpp"
#include "sclaw/model/kernel.hpp"

namespace sclaw::model {

struct ValidationReport {
  // H1
  bool h1_ok = true;
  double nonfinite_at = -1.0;
  double lip_f = 0.0;
  double lip_D = 0.0;
  // H2
  bool h2_ok = true;
  double d_min = 0.0;
  // H3
  bool h3_ok = true;
  double a2_at_0 = 0.0;
  double a2_at_1 = 0.0;
  double a2_min_interior = 0.0;
  double a2_min_interior_at = 0.0;
  // H4
  bool h4_ok = true;
  double kernel_mass_error = 0.0;
  double kernel_min = 0.0;
  // smallness indicators
  double noise_l2 = 0.0;        // eps^{2 gamma - 1} ||j||^2
  double noise_h1 = 0.0;        // eps^{2(gamma - 1)} (||j||^2 + eps ||grad j||^2)
  double kernel_w11 = 0.0;      // eps^{-3/2} ||j - 1||_{W^{-1,1}}
  // A4: min over v of D(v) - a'(v)^2 ||j||^2
  double a4_margin = 0.0;
  double a4_margin_at = 0.0;
  // a is derived from a^2; a large endpoint slope means sqrt(a^2) is not C^1 there.
  double max_abs_da = 0.0;
  std::vector<std::string> notes;

  bool passed() const noexcept { return h1_ok && h2_ok && h3_ok && h4_ok; }

  std::string to_text() const {
    std::ostringstream os;
    os.precision(10);
    auto flag = [](bool b) { return b ? "pass" : "FAIL"; };
    os << "H1 " << flag(h1_ok) << " lip_f=" << lip_f << " lip_D=" << lip_D;
    if (!h1_ok) os << " nonfinite_at=" << nonfinite_at;
    os << "\nH2 " << flag(h2_ok) << " d_min=" << d_min;
    os << "\nH3 " << flag(h3_ok) << " a2(0)=" << a2_at_0 << " a2(1)=" << a2_at_1
       << " a2_min_interior=" << a2_min_interior << " at v=" << a2_min_interior_at;
    os << "\nH4 " << flag(h4_ok) << " mass_error=" << kernel_mass_error << " min_sample=" << kernel_min;
    os << "\nsmallness eps^(2g-1)|j|^2=" << noise_l2 << " eps^(2(g-1))(|j|^2+eps|dj|^2)=" << noise_h1
       << " eps^(-3/2)|j-1|_W-1,1=" << kernel_w11;
    os << "\nA4 margin=" << a4_margin << " at v=" << a4_margin_at << " max|a'|=" << max_abs_da;
    for (const auto& n : notes) os << "\nnote: " << n;
    os << "\nverdict " << (passed() ? "pass" : "FAIL") << "\n";
    return os.str();
  }
};

inline ValidationReport validate_hypotheses(const ModelCoefficients& model, const MollifierKernel& kernel,
                                            double eps, double gamma) {
  if (!(eps > 0.0)) throw PreconditionError("validate_hypotheses: eps must be positive");
  if (!(gamma > 0.5)) throw PreconditionError("validate_hypotheses: gamma must exceed 1/2");
  ValidationReport r;
  r.h1_ok = model.finite();
  r.nonfinite_at = model.nonfinite_at();
  r.lip_f = model.lip_f();
  r.lip_D = model.lip_D();
  if (!r.h1_ok) r.notes.push_back("non-finite coefficient value at v=" + std::to_string(r.nonfinite_at));

  r.d_min = model.d_min();
  r.h2_ok = r.h1_ok && r.d_min > 0.0;

  constexpr double tol = 1e-12;
  r.a2_at_0 = model.a2(0.0);
  r.a2_at_1 = model.a2(1.0);
  const std::size_t n = ModelCoefficients::kProbePoints;
  r.a2_min_interior = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < n; ++k) {
    const double v = static_cast<double>(k) / static_cast<double>(n);
    const double a2 = model.a2(v);
    if (a2 < r.a2_min_interior) r.a2_min_interior = a2, r.a2_min_interior_at = v;
  }
  r.h3_ok = std::abs(r.a2_at_0) <= tol && std::abs(r.a2_at_1) <= tol && r.a2_min_interior > 0.0;
  if (std::abs(r.a2_at_0) > tol) r.notes.push_back("a2(0) != 0");
  if (std::abs(r.a2_at_1) > tol) r.notes.push_back("a2(1) != 0");
  if (!(r.a2_min_interior > 0.0)) r.notes.push_back("a2 not positive inside (0,1)");

  const auto& s = kernel.samples();
  double mass = 0.0;
  r.kernel_min = s.min();
  for (std::size_t i = 0; i < s.size(); ++i) mass += s[i];
  r.kernel_mass_error = std::abs(mass * s.grid().dx() - 1.0);
  r.h4_ok = r.kernel_min >= 0.0 && r.kernel_mass_error <= 1e-12;

  const double j2 = kernel.norm_l2_sq();
  r.noise_l2 = std::pow(eps, 2.0 * gamma - 1.0) * j2;
  r.noise_h1 = std::pow(eps, 2.0 * (gamma - 1.0)) * (j2 + eps * kernel.norm_grad_l2_sq());
  r.kernel_w11 = std::pow(eps, -1.5) * kernel.dist_w11();

  r.a4_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= n; ++k) {
    const double v = static_cast<double>(k) / static_cast<double>(n);
    const double da = model.da(v);
    r.max_abs_da = std::max(r.max_abs_da, std::abs(da));
    const double m = model.D(v) - da * da * j2;
    if (m < r.a4_margin) r.a4_margin = m, r.a4_margin_at = v;
  }
  if (r.max_abs_da > 1e2)
    r.notes.push_back("sqrt(a2) has a steep slope near v=" + std::to_string(r.a4_margin_at) +
                      "; a C^2 square root of a2 is not guaranteed (not enforced)");
  return r;
}

}  // namespace sclaw::model
