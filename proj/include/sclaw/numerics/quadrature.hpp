#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

namespace sclaw::numerics {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

namespace detail {

// Returns (P_n(x), P_{n-1}(x)) by the three-term recurrence.
inline std::pair<double, double> legendre_pair(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, p0};
}

}  // namespace detail

/// n-point Gauss-Legendre rule (n >= 1) by Newton iteration on P_n.
inline GaussRule gauss_legendre(int n) {
  GaussRule rule{std::vector<double>(n), std::vector<double>(n)};
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [pn, pm] = detail::legendre_pair(n, x);
      const double step = pn / (n * (x * pn - pm) / (x * x - 1.0));
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const auto [pn, pm] = detail::legendre_pair(n, x);
    const double dp = n * (x * pn - pm) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

/// Composite Gauss-Legendre on [a, b] with `panels` equal panels.
inline double composite_gauss(const std::function<double(double)>& f, double a, double b,
                              int panels = 16, int order = 8) {
  static thread_local GaussRule cached;
  if (static_cast<int>(cached.nodes.size()) != order) cached = gauss_legendre(order);
  const double h = (b - a) / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (int k = 0; k < order; ++k) s += cached.weights[k] * f(mid + 0.5 * h * cached.nodes[k]);
  }
  return 0.5 * h * s;
}

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
  int evaluations = 0;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights on [0, 1] half (symmetric).
inline constexpr std::array<double, 8> kXk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline std::pair<double, double> gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * kWk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double x = h * kXk[j];
    const double s = f(c - x) + f(c + x);
    kron += kWk[j] * s;
    if (j % 2 == 1) gauss += kWg[j / 2] * s;
  }
  return {kron * h, std::abs((kron - gauss) * h)};
}

inline void gk_recurse(const std::function<double(double)>& f, double a, double b, double whole,
                       double err, double tol, int depth, QuadResult& out) {
  out.evaluations += 15;
  if (!std::isfinite(whole)) {
    out.converged = false;
    out.value = std::numeric_limits<double>::infinity();
    return;
  }
  if (err <= tol || depth == 0) {
    if (err > tol) out.converged = false;
    out.value += whole;
    out.error += err;
    return;
  }
  const double m = 0.5 * (a + b);
  auto [l, le] = gk15(f, a, m);
  auto [r, re] = gk15(f, m, b);
  gk_recurse(f, a, m, l, le, 0.5 * tol, depth - 1, out);
  if (!std::isfinite(out.value)) return;
  gk_recurse(f, m, b, r, re, 0.5 * tol, depth - 1, out);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (7-15) with bisection; `converged` is false when the
/// depth limit is hit before the error estimate drops below `abs_tol`.
inline QuadResult adaptive_gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                                         double abs_tol = 1e-9, int max_depth = 30) {
  QuadResult out;
  if (a == b) return out;
  auto [v, e] = detail::gk15(f, a, b);
  detail::gk_recurse(f, a, b, v, e, abs_tol, max_depth, out);
  return out;
}

/// Golden-section minimization of a unimodal function on [a, b].
inline std::pair<double, double> golden_section(const std::function<double(double)>& f, double a,
                                                double b, double tol = 1e-10, int max_iter = 200) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

}  // namespace sclaw::numerics
