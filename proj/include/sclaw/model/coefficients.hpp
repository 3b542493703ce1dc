#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sclaw/core/errors.hpp"
#include "sclaw/model/polynomial.hpp"
#include "sclaw/numerics/quadrature.hpp"

namespace sclaw::model {

/// A scalar coefficient on [0, 1], extended by constants outside.
/// Carries its polynomial form when it has one, which gives exact derivatives.
class Coefficient {
 public:
  Coefficient() = default;
  explicit Coefficient(Polynomial p) : poly_(std::move(p)) {
    fn_ = [q = *poly_](double v) { return q(v); };
    dpoly_ = poly_->derivative();
  }
  explicit Coefficient(std::function<double(double)> fn) : fn_(std::move(fn)) {}

  double operator()(double v) const { return fn_(std::clamp(v, 0.0, 1.0)); }

  /// Derivative; zero outside [0, 1]. Central differences for black-box functions,
  /// one-sided within h of the endpoints.
  double derivative(double v) const {
    if (v < 0.0 || v > 1.0) return 0.0;
    if (dpoly_) return (*dpoly_)(v);
    constexpr double h = 1e-6;
    if (v < h) return (fn_(v + h) - fn_(v)) / h;
    if (v > 1.0 - h) return (fn_(v) - fn_(v - h)) / h;
    return (fn_(v + h) - fn_(v - h)) / (2.0 * h);
  }

  const std::optional<Polynomial>& polynomial() const noexcept { return poly_; }

 private:
  std::function<double(double)> fn_;
  std::optional<Polynomial> poly_;
  std::optional<Polynomial> dpoly_;
};

/// Interval of [0, 1] on which the flux is nondecreasing.
struct MonotonePiece {
  double lo;
  double hi;
};

/// The triple (f, D, a^2) together with the grid-estimated constants the
/// schemes and the hypothesis checks need.
class ModelCoefficients {
 public:
  static constexpr std::size_t kProbePoints = 10000;

  ModelCoefficients(std::string name, Coefficient flux, Coefficient diffusion, Coefficient fluctuation)
      : name_(std::move(name)), f_(std::move(flux)), d_(std::move(diffusion)), a2_(std::move(fluctuation)) {
    estimate_constants();
    find_increasing_pieces();
  }

  const std::string& name() const noexcept { return name_; }
  double f(double v) const { return f_(v); }
  double df(double v) const { return f_.derivative(v); }
  double D(double v) const { return d_(v); }
  double a2(double v) const { return a2_(v); }
  /// a = sqrt(max(a^2, 0)).
  double a(double v) const { return std::sqrt(std::max(a2_(v), 0.0)); }

  /// da/dv from a = sqrt(a^2): central differences inside, one-sided at the endpoints.
  double da(double v) const {
    constexpr double h = 1e-5;
    v = std::clamp(v, 0.0, 1.0);
    if (v < h) return (a(v + h) - a(v)) / h;
    if (v > 1.0 - h) return (a(v) - a(v - h)) / h;
    return (a(v + h) - a(v - h)) / (2.0 * h);
  }

  const Coefficient& flux() const noexcept { return f_; }
  const Coefficient& diffusion() const noexcept { return d_; }
  const Coefficient& fluctuation() const noexcept { return a2_; }

  double lip_f() const noexcept { return lip_f_; }
  double lip_D() const noexcept { return lip_d_; }
  double d_min() const noexcept { return d_min_; }
  double d_max() const noexcept { return d_max_; }
  double a2_max() const noexcept { return a2_max_; }
  double f_min() const noexcept { return f_min_; }
  double f_max() const noexcept { return f_max_; }
  bool finite() const noexcept { return nonfinite_at_ < 0.0; }
  /// First probe point where a coefficient was not finite, or a negative value.
  double nonfinite_at() const noexcept { return nonfinite_at_; }
  const std::vector<MonotonePiece>& increasing_pieces() const noexcept { return increasing_; }

  /// Nondecreasing part of the flux: f+(u) = f(0) + sum over increasing pieces
  /// of f(clamp(u, lo, hi)) - f(lo). f- = f - f+ is nonincreasing.
  double f_plus(double u) const {
    u = std::clamp(u, 0.0, 1.0);
    double s = f0_;
    for (std::size_t k = 0; k < increasing_.size(); ++k) {
      const auto& p = increasing_[k];
      if (u <= p.lo) break;
      s += f_(std::min(u, p.hi)) - piece_base_[k];
    }
    return s;
  }

 private:
  void estimate_constants() {
    const double h = 1.0 / static_cast<double>(kProbePoints);
    d_min_ = std::numeric_limits<double>::infinity();
    d_max_ = -d_min_;
    a2_max_ = -d_min_;
    f_min_ = d_min_;
    f_max_ = -d_min_;
    double f_prev = f_(0.0), d_prev = d_(0.0);
    for (std::size_t k = 0; k <= kProbePoints; ++k) {
      const double v = static_cast<double>(k) * h;
      const double fv = f_(v), dv = d_(v), av = a2_(v);
      if (!(std::isfinite(fv) && std::isfinite(dv) && std::isfinite(av))) {
        if (nonfinite_at_ < 0.0) nonfinite_at_ = v;
        continue;
      }
      d_min_ = std::min(d_min_, dv);
      d_max_ = std::max(d_max_, dv);
      a2_max_ = std::max(a2_max_, av);
      f_min_ = std::min(f_min_, fv);
      f_max_ = std::max(f_max_, fv);
      if (k > 0) {
        lip_f_ = std::max(lip_f_, std::abs(fv - f_prev) / h);
        lip_d_ = std::max(lip_d_, std::abs(dv - d_prev) / h);
      }
      f_prev = fv;
      d_prev = dv;
    }
    // Sampled slopes miss the exact maximum of |f'| by O(h); take the derivative too.
    for (std::size_t k = 0; k <= 200; ++k) lip_f_ = std::max(lip_f_, std::abs(f_.derivative(k / 200.0)));
  }

  // Locates the extrema of f between probe points and records the maximal
  // intervals where f is nondecreasing.
  void find_increasing_pieces() {
    f0_ = f_(0.0);
    if (!finite()) return;
    const std::size_t n = 2000;
    const double h = 1.0 / static_cast<double>(n);
    std::vector<int> sign(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double d = f_(h * (k + 1)) - f_(h * k);
      sign[k] = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    }
    auto refine = [&](std::size_t k, bool maximum) {
      // extremum near probe point k*h
      const double lo = std::max(0.0, h * (static_cast<double>(k) - 1.0));
      const double hi = std::min(1.0, h * (static_cast<double>(k) + 1.0));
      if (f_.polynomial()) {
        // bisection on f' sign change gives machine precision for polynomials
        double a = lo, b = hi;
        double fa = f_.derivative(a);
        if ((fa > 0) == (f_.derivative(b) > 0)) return h * k;
        for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
          const double m = 0.5 * (a + b);
          const double fm = f_.derivative(m);
          if ((fm > 0) == (fa > 0)) a = m, fa = fm; else b = m;
        }
        return 0.5 * (a + b);
      }
      auto obj = [&](double v) { return maximum ? -f_(v) : f_(v); };
      return numerics::golden_section(obj, lo, hi, 1e-12).first;
    };
    std::size_t k = 0;
    while (k < n) {
      if (sign[k] <= 0) {
        ++k;
        continue;
      }
      const std::size_t start = k;
      while (k < n && sign[k] > 0) ++k;
      const double lo = start == 0 ? 0.0 : refine(start, false);
      const double hi = k == n ? 1.0 : refine(k, true);
      increasing_.push_back({lo, hi});
    }
    for (const auto& p : increasing_) piece_base_.push_back(f_(p.lo));
  }

  std::string name_;
  Coefficient f_, d_, a2_;
  double lip_f_ = 0.0, lip_d_ = 0.0;
  double d_min_ = 0.0, d_max_ = 0.0, a2_max_ = 0.0, f_min_ = 0.0, f_max_ = 0.0;
  double nonfinite_at_ = -1.0;
  double f0_ = 0.0;
  std::vector<MonotonePiece> increasing_;
  std::vector<double> piece_base_;
};

inline Polynomial tasep_poly() { return Polynomial({0.0, 1.0, -1.0}); }

/// f = a^2 = u(1-u), D = 1: the exclusion-process coefficients.
inline ModelCoefficients tasep_model() {
  return ModelCoefficients("tasep", Coefficient(tasep_poly()), Coefficient(Polynomial({1.0})),
                           Coefficient(tasep_poly()));
}

/// f = u^2/2, D = 1, a^2 = u(1-u).
inline ModelCoefficients burgers_model() {
  return ModelCoefficients("burgers", Coefficient(Polynomial({0.0, 0.0, 0.5})),
                           Coefficient(Polynomial({1.0})), Coefficient(tasep_poly()));
}

/// f = c u, D = 1, a^2 = u(1-u).
inline ModelCoefficients linear_model(double c = 1.0) {
  return ModelCoefficients("linear", Coefficient(Polynomial({0.0, c})), Coefficient(Polynomial({1.0})),
                           Coefficient(tasep_poly()));
}

inline ModelCoefficients polynomial_model(std::string name, std::vector<double> f, std::vector<double> d,
                                          std::vector<double> a2) {
  return ModelCoefficients(std::move(name), Coefficient(Polynomial(std::move(f))),
                           Coefficient(Polynomial(std::move(d))), Coefficient(Polynomial(std::move(a2))));
}

/// Presets addressable from the command line.
inline ModelCoefficients preset_model(const std::string& name) {
  if (name == "tasep") return tasep_model();
  if (name == "burgers") return burgers_model();
  if (name == "linear") return linear_model();
  throw ConfigError("unknown model preset '" + name + "' (expected tasep, burgers or linear)");
}

}  // namespace sclaw::model
