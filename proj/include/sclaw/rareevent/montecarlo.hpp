#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "sclaw/core/errors.hpp"
#include "sclaw/core/parallel.hpp"
#include "sclaw/spde/simulate.hpp"

namespace sclaw::rareevent {

struct McEstimate {
  std::size_t n_samples = 0;
  std::size_t hits = 0;
  std::size_t predicate_errors = 0;
  std::size_t simulation_errors = 0;
  double estimate = 0.0;
  double lo = 0.0;  // Wilson 95%
  double hi = 1.0;

  std::size_t valid() const noexcept { return n_samples - predicate_errors - simulation_errors; }
};

/// Wilson score interval for `hits` out of `n`.
inline std::pair<double, double> wilson_interval(std::size_t hits, std::size_t n, double z = 1.96) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n), p = static_cast<double>(hits) / nn, z2 = z * z;
  const double centre = (p + z2 / (2 * nn)) / (1 + z2 / nn);
  const double half = z / (1 + z2 / nn) * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn));
  return {std::max(0.0, std::min(p, centre - half)), std::min(1.0, std::max(p, centre + half))};
}

inline McEstimate summarize(const std::vector<int>& outcomes) {
  McEstimate e;
  e.n_samples = outcomes.size();
  for (int o : outcomes) {
    if (o == 1) ++e.hits;
    if (o == -1) ++e.predicate_errors;
    if (o == -2) ++e.simulation_errors;
  }
  const std::size_t v = e.valid();
  e.estimate = v ? static_cast<double>(e.hits) / static_cast<double>(v) : 0.0;
  std::tie(e.lo, e.hi) = wilson_interval(e.hits, v);
  return e;
}

using EventPredicate = std::function<bool(const Trajectory&)>;

/// Frequency of `event` over n trajectories on substreams 0..n-1 of master_seed. A throwing
/// predicate counts as a predicate error and a blow-up as a simulation error; neither
/// enters the estimate. Per-sample outcomes are written to `outcomes` if given.
inline McEstimate mc_probability(const EventPredicate& event, const model::ModelCoefficients& m,
                                 const spde::SpdeParams& p, const spde::NoisePlan& plan, const GridField& u0,
                                 std::size_t n, std::uint64_t master_seed, spde::Scheme scheme = spde::Scheme::em(),
                                 unsigned workers = 1, std::vector<int>* outcomes = nullptr) {
  if (n < 1) throw PreconditionError("mc_probability: need n >= 1");
  auto out = spde::run_ensemble(n, master_seed, workers, [&](RngStream& s, std::size_t) -> int {
    Trajectory traj(u0.grid(), {});
    try {
      traj = spde::simulate(m, p, plan, u0, s, scheme);
    } catch (const BlowUpError&) {
      return -2;
    }
    try {
      return event(traj) ? 1 : 0;
    } catch (...) {
      return -1;
    }
  });
  if (outcomes) *outcomes = out;
  return summarize(out);
}

/// Least-squares line log P = intercept - slope * eps^(-2 gamma) through the nonzero estimates.
struct LdpFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  double r2 = std::numeric_limits<double>::quiet_NaN();
  std::size_t points = 0;

  std::string to_text() const {
    std::ostringstream os;
    if (points < 2) {
      os << "ldp fit: only " << points << " eps values with a nonzero estimate, no fit\n";
      return os.str();
    }
    os << "ldp fit over " << points << " points: log P = " << intercept << " - " << slope << " * eps^(-2 gamma), r^2 = " << r2
       << "\n";
    return os.str();
  }
};

inline LdpFit ldp_fit(const std::vector<double>& eps, const std::vector<double>& prob, double gamma,
                      double speed_shift = 0.0) {
  if (eps.size() != prob.size()) throw StructuralError("ldp_fit: size mismatch");
  std::vector<double> x, y;
  for (std::size_t k = 0; k < eps.size(); ++k)
    if (prob[k] > 0.0) x.push_back(std::pow(eps[k], -2.0 * gamma + speed_shift)), y.push_back(std::log(prob[k]));
  LdpFit f;
  f.points = x.size();
  if (x.size() < 2) return f;
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < x.size(); ++k) mx += x[k], my += y[k];
  mx /= x.size(), my /= y.size();
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < x.size(); ++k)
    sxx += (x[k] - mx) * (x[k] - mx), sxy += (x[k] - mx) * (y[k] - my), syy += (y[k] - my) * (y[k] - my);
  if (sxx == 0) return f;
  const double b = sxy / sxx;
  f.slope = -b;
  f.intercept = my - b * mx;
  f.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

}  // namespace sclaw::rareevent
