#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "sclaw/entropy/rho.hpp"

namespace sclaw::entropy {

/// Mixed: r changes sign in v at a fixed time. Switching: one sign at each time, both over time.
enum class ShockSign { Zero, Positive, Negative, Mixed, Switching };

inline const char* to_string(ShockSign s) {
  switch (s) {
    case ShockSign::Zero: return "zero";
    case ShockSign::Positive: return "+";
    case ShockSign::Negative: return "-";
    case ShockSign::Mixed: return "mixed";
    case ShockSign::Switching: return "switching";
  }
  return "?";
}

/// Piece [t_a, t_b] of a shock curve on which the density keeps one sign.
struct ShockSegment {
  std::size_t shock = 0;
  ShockSign sign = ShockSign::Zero;
  double t_a = 0.0;
  double t_b = 0.0;
};

struct SplitReport {
  std::vector<ShockSign> per_shock;
  std::vector<ShockSegment> e_plus, e_minus;
  bool cond_support = true;   // supports of rho+ / rho- inside E+ / E-
  bool cond_disjoint = true;  // times where E+ and E- meet are nowhere dense
  bool cond_bounded = true;   // delta <= u <= 1 - delta
  double delta = 0.0;
  std::vector<double> contact_times;  // sampled times where E+ and E- meet
  bool splittable() const { return cond_support && cond_disjoint && cond_bounded; }

  std::string to_text() const {
    std::ostringstream os;
    os.precision(6);
    os << "splittable: " << (splittable() ? "yes" : "no") << "\n";
    os << "  (i) support: " << (cond_support ? "ok" : "fail") << "\n";
    os << "  (ii) contact set nowhere dense: " << (cond_disjoint ? "ok" : "fail");
    if (!contact_times.empty()) os << " (" << contact_times.size() << " sampled contact times)";
    os << "\n  (iii) delta = " << delta << (cond_bounded ? " ok" : " fail") << "\n";
    for (std::size_t k = 0; k < per_shock.size(); ++k) os << "  shock " << k << ": " << to_string(per_shock[k]) << "\n";
    for (const auto& s : e_plus) os << "  E+ shock " << s.shock << " t in [" << s.t_a << ", " << s.t_b << "]\n";
    for (const auto& s : e_minus) os << "  E- shock " << s.shock << " t in [" << s.t_a << ", " << s.t_b << "]\n";
    return os.str();
  }
};

namespace detail {

// Sign of v -> r(v, t) on `nv` interior points; |r| <= tol counts as zero.
inline ShockSign density_sign(const ShockDensity& s, double t, std::size_t nv = 200, double tol = 1e-13) {
  const double lo = s.lo(t), hi = s.hi(t);
  bool pos = false, neg = false;
  for (std::size_t k = 1; k < nv; ++k) {
    const double r = s(lo + (hi - lo) * static_cast<double>(k) / nv, t);
    pos |= r > tol;
    neg |= r < -tol;
  }
  if (pos && neg) return ShockSign::Mixed;
  return pos ? ShockSign::Positive : (neg ? ShockSign::Negative : ShockSign::Zero);
}

inline double torus_distance(double a, double b) {
  double d = a - b;
  d -= std::round(d);
  return std::abs(d);
}

}  // namespace detail

/// E+ and E- are the closures of the shock pieces carrying positive and negative density
/// (a mixed piece belongs to both). Condition (ii) is checked on a time grid: two
/// consecutive sampled times with a common point of E+ and E- mean the contact set has
/// interior.
inline SplitReport classify_splittable(const PiecewiseSmoothProfile& profile, const model::ModelCoefficients& m,
                                       std::size_t n_times = 1025) {
  const auto rho = rho_of_profile(profile, m);
  SplitReport rep;
  const double T = profile.horizon();

  for (const auto& s : rho.shocks) {
    const auto ts = PiecewiseSmoothProfile::sample_times(s.curve);
    std::vector<ShockSign> signs;
    for (double t : ts) signs.push_back(detail::density_sign(s, t));
    bool any_pos = false, any_neg = false, any_mixed = false;
    for (auto g : signs) {
      any_pos |= g == ShockSign::Positive;
      any_neg |= g == ShockSign::Negative;
      any_mixed |= g == ShockSign::Mixed;
    }
    ShockSign overall = any_pos ? ShockSign::Positive : (any_neg ? ShockSign::Negative : ShockSign::Zero);
    if (any_pos && any_neg) overall = ShockSign::Switching;
    if (any_mixed) overall = ShockSign::Mixed;
    rep.per_shock.push_back(overall);
    // Maximal runs of one sign; a sign change is placed midway between the two samples,
    // so neighbouring runs of one shock share a single instant.
    for (std::size_t k = 0; k < ts.size();) {
      std::size_t j = k;
      while (j + 1 < ts.size() && signs[j + 1] == signs[k]) ++j;
      const double ta = k == 0 ? ts[0] : 0.5 * (ts[k - 1] + ts[k]);
      const double tb = j + 1 == ts.size() ? ts[j] : 0.5 * (ts[j] + ts[j + 1]);
      const ShockSegment seg{s.shock, signs[k], ta, tb};
      if (signs[k] == ShockSign::Positive || signs[k] == ShockSign::Mixed) rep.e_plus.push_back(seg);
      if (signs[k] == ShockSign::Negative || signs[k] == ShockSign::Mixed) rep.e_minus.push_back(seg);
      k = j + 1;
    }
  }

  // Point sets of E+ and E- at time t.
  auto points = [&](const std::vector<ShockSegment>& segs, double t) {
    std::vector<double> xs;
    for (const auto& seg : segs)
      if (t >= seg.t_a - 1e-12 && t <= seg.t_b + 1e-12) xs.push_back(profile.shocks()[seg.shock].x(t));
    return xs;
  };
  auto contact = [&](double t) {
    const auto p = points(rep.e_plus, t), q = points(rep.e_minus, t);
    for (double a : p)
      for (double b : q)
        if (detail::torus_distance(a, b) < 1e-9) return true;
    return false;
  };
  bool prev = false;
  for (std::size_t k = 0; k < n_times; ++k) {
    const double t = T * static_cast<double>(k) / (n_times - 1);
    const bool c = contact(t);
    if (c) rep.contact_times.push_back(t);
    if (c && prev) rep.cond_disjoint = false;
    prev = c;
  }

  const auto [lo, hi] = profile.range();
  rep.delta = std::min(lo, 1.0 - hi);
  rep.cond_bounded = rep.delta > 0.0;
  return rep;
}

}  // namespace sclaw::entropy
