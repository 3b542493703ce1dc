#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "sclaw/model/coefficients.hpp"
#include "sclaw/numerics/quadrature.hpp"

namespace sclaw::model {

using Scalar1 = std::function<double(double)>;
using Scalar3 = std::function<double(double, double, double)>;

namespace detail {

// int_0^v g(w) dw by composite Gauss-Legendre, with the interval broken at `kinks`.
inline double integrate_from_zero(const Scalar1& g, double v, const std::vector<double>& kinks) {
  double lo = 0.0, hi = v, sign = 1.0;
  if (hi < lo) std::swap(lo, hi), sign = -1.0;
  if (hi == lo) return 0.0;
  std::vector<double> cuts{lo};
  for (double k : kinks)
    if (k > lo && k < hi) cuts.push_back(k);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) s += numerics::composite_gauss(g, cuts[k], cuts[k + 1], 8, 10);
  return sign * s;
}

}  // namespace detail

/// Entropy eta with its conjugate flux q(v) = int_0^v eta'(w) f'(w) dw.
/// `kinks` lists points where eta'' is not continuous (the Kruzkov family).
class EntropyPair {
 public:
  EntropyPair(Scalar1 eta, Scalar1 eta1, Scalar1 eta2, const ModelCoefficients& model,
              std::vector<double> kinks = {})
      : eta_(std::move(eta)), eta1_(std::move(eta1)), eta2_(std::move(eta2)),
        df_([m = std::make_shared<ModelCoefficients>(model)](double v) { return m->df(v); }),
        kinks_(std::move(kinks)) {
    // The flux is extended by constants outside [0, 1], so f' has kinks at the ends.
    kinks_.push_back(0.0);
    kinks_.push_back(1.0);
  }

  double eta(double v) const { return eta_(v); }
  double eta1(double v) const { return eta1_(v); }
  double eta2(double v) const { return eta2_(v); }
  double q(double v) const {
    return detail::integrate_from_zero([this](double w) { return eta1_(w) * df_(w); }, v, kinks_);
  }
  double q_prime(double v) const { return eta1_(v) * df_(v); }
  const std::vector<double>& kinks() const noexcept { return kinks_; }

 private:
  Scalar1 eta_, eta1_, eta2_, df_;
  std::vector<double> kinks_;
};

/// Builds the pair for eta and returns its conjugate flux.
inline Scalar1 conjugate_flux(Scalar1 eta, Scalar1 eta1, Scalar1 eta2, const ModelCoefficients& model,
                              std::vector<double> kinks = {}) {
  auto pair = std::make_shared<EntropyPair>(std::move(eta), std::move(eta1), std::move(eta2), model,
                                            std::move(kinks));
  return [pair](double v) { return pair->q(v); };
}

inline EntropyPair quadratic_entropy(const ModelCoefficients& model) {
  return EntropyPair([](double v) { return v * v; }, [](double v) { return 2.0 * v; },
                     [](double) { return 2.0; }, model);
}

/// eta(v) = |v - k|; eta'' is a Dirac mass at k, reported as 0 away from it.
inline EntropyPair kruzkov_entropy(double k, const ModelCoefficients& model) {
  return EntropyPair([k](double v) { return std::abs(v - k); },
                     [k](double v) { return v > k ? 1.0 : (v < k ? -1.0 : 0.0); },
                     [](double) { return 0.0; }, model, {k});
}

inline EntropyPair linear_entropy(double slope, double offset, const ModelCoefficients& model) {
  return EntropyPair([=](double v) { return offset + slope * v; }, [=](double) { return slope; },
                     [](double) { return 0.0; }, model);
}

/// Test function phi(t, x) on [0, T] x torus with phi(T, .) = 0.
struct SpaceTimeFunction {
  std::function<double(double, double)> value;
  std::function<double(double, double)> dt;  // optional
  std::function<double(double, double)> dx;  // optional
  double horizon = 1.0;

  double operator()(double t, double x) const { return value(t, x); }
};

/// theta(v, t, x) with its v-derivatives and the conjugate flux sampler
/// Q(v, t, x) = int_0^v theta'(w, t, x) f'(w) dw.
class EntropySampler {
 public:
  EntropySampler(Scalar3 theta, Scalar3 theta_v, Scalar3 theta_vv, double horizon,
                 const ModelCoefficients& model, std::vector<double> kinks = {})
      : theta_(std::move(theta)), theta_v_(std::move(theta_v)), theta_vv_(std::move(theta_vv)),
        horizon_(horizon),
        df_([m = std::make_shared<ModelCoefficients>(model)](double v) { return m->df(v); }),
        kinks_(std::move(kinks)) {
    kinks_.push_back(0.0);
    kinks_.push_back(1.0);
  }

  /// Uses a closed-form flux sampler instead of quadrature.
  void set_flux(Scalar3 q) { q_override_ = std::move(q); }

  double theta(double v, double t, double x) const { return theta_(v, t, x); }
  double theta_v(double v, double t, double x) const { return theta_v_(v, t, x); }
  double theta_vv(double v, double t, double x) const { return theta_vv_(v, t, x); }
  double horizon() const noexcept { return horizon_; }

  double Q(double v, double t, double x) const {
    if (q_override_) return q_override_(v, t, x);
    return detail::integrate_from_zero([&](double w) { return theta_v_(w, t, x) * df_(w); }, v, kinks_);
  }
  /// Partial x-derivative of Q at fixed v (central differences).
  double Q_x(double v, double t, double x, double h = 1e-5) const {
    return (Q(v, t, x + h) - Q(v, t, x - h)) / (2.0 * h);
  }
  /// Partial t-derivative of theta at fixed (v, x) (central differences, one-sided at 0).
  double theta_t(double v, double t, double x, double h = 1e-6) const {
    if (t < h) return (theta_(v, t + h, x) - theta_(v, t, x)) / h;
    return (theta_(v, t + h, x) - theta_(v, t - h, x)) / (2.0 * h);
  }

 private:
  Scalar3 theta_, theta_v_, theta_vv_;
  double horizon_;
  Scalar1 df_;
  std::vector<double> kinks_;
  Scalar3 q_override_;
};

/// theta(v, t, x) = eta(v) phi(t, x), with Q = q(v) phi(t, x).
inline EntropySampler factorized_sampler(const EntropyPair& pair, const SpaceTimeFunction& phi,
                                         const ModelCoefficients& model) {
  auto p = std::make_shared<EntropyPair>(pair);
  auto ph = std::make_shared<SpaceTimeFunction>(phi);
  EntropySampler s([p, ph](double v, double t, double x) { return p->eta(v) * ph->value(t, x); },
                   [p, ph](double v, double t, double x) { return p->eta1(v) * ph->value(t, x); },
                   [p, ph](double v, double t, double x) { return p->eta2(v) * ph->value(t, x); },
                   phi.horizon, model, pair.kinks());
  s.set_flux([p, ph](double v, double t, double x) { return p->q(v) * ph->value(t, x); });
  return s;
}

}  // namespace sclaw::model
