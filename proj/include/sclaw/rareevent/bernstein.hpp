#pragma once

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "sclaw/core/errors.hpp"
#include "sclaw/core/parallel.hpp"
#include "sclaw/core/rng.hpp"

namespace sclaw::rareevent {

/// What the Bernstein event needs from one martingale path: its running maximum and its
/// quadratic variation at the horizon.
struct PathSummary {
  double sup = 0.0;
  double qv = 0.0;
};

/// Summary of a discrete path X_0 = 0, X_1, ... with bracket `qv`.
inline PathSummary summarize_path(const std::vector<double>& x, double qv) {
  PathSummary s{0.0, qv};
  for (double v : x) s.sup = std::max(s.sup, v);
  return s;
}

/// n standard Brownian paths on [0, horizon] sampled at `steps` points, substream k for path k.
/// The bracket is the exact one, qv = horizon; `realized_qv` switches to the sum of squared
/// increments instead.
inline std::vector<PathSummary> brownian_summaries(std::size_t n, std::size_t steps, double horizon,
                                                   std::uint64_t seed, unsigned workers = 1,
                                                   bool realized_qv = false) {
  if (steps < 1 || !(horizon > 0.0)) throw PreconditionError("brownian_summaries: need steps >= 1 and horizon > 0");
  std::vector<PathSummary> out(n);
  const double sd = std::sqrt(horizon / static_cast<double>(steps));
  parallel_for(n, workers, [&](std::size_t k) {
    RngStream s(seed, k);
    double x = 0.0, sup = 0.0, q = 0.0;
    for (std::size_t j = 0; j < steps; ++j) {
      const double d = sd * s.normal();
      x += d;
      q += d * d;
      sup = std::max(sup, x);
    }
    out[k] = {sup, realized_qv ? q : horizon};
  });
  return out;
}

using ScalarFn = std::function<double(double)>;

/// Throws PreconditionError unless F > 0 and F(x)/F(zeta) <= 2x/zeta - 1 on
/// (zeta, x_max], checked at `points` equispaced abscissae.
inline void check_bernstein_admissible(const ScalarFn& F, double zeta, double x_max = 0.0, std::size_t points = 2000) {
  if (!(zeta > 0.0)) throw PreconditionError("bernstein: zeta must be positive");
  if (x_max <= zeta) x_max = 20.0 * zeta + 10.0;
  const double fz = F(zeta);
  if (!(fz > 0.0) || !std::isfinite(fz)) throw PreconditionError("bernstein: F(zeta) must be positive");
  for (std::size_t k = 1; k <= points; ++k) {
    const double x = zeta + (x_max - zeta) * static_cast<double>(k) / static_cast<double>(points);
    const double fx = F(x);
    if (!(fx > 0.0)) throw PreconditionError("bernstein: F not positive at x=" + std::to_string(x));
    if (fx / fz > 2.0 * x / zeta - 1.0 + 1e-12)
      throw PreconditionError("bernstein: F violates F(x)/F(zeta) <= 2x/zeta - 1 at x=" + std::to_string(x));
  }
}

struct BernsteinReport {
  std::size_t n = 0;
  std::size_t hits = 0;
  double zeta = 0.0;
  double frequency = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  /// bound + 3 std_error - frequency; negative means an observed violation.
  double margin = 0.0;

  bool holds() const noexcept { return margin >= 0.0; }

  std::string to_text() const {
    std::ostringstream os;
    os << "zeta=" << zeta << " n=" << n << " hits=" << hits << " frequency=" << frequency << " se=" << std_error
       << " bound=" << bound << " margin=" << margin << (holds() ? " ok" : " VIOLATED") << "\n";
    return os.str();
  }
};

/// Empirical frequency of {sup X >= zeta and [X,X] <= F(sup X)} against exp(-zeta^2 / 2F(zeta)).
inline BernsteinReport bernstein_check(const std::vector<PathSummary>& paths, const ScalarFn& F, double zeta) {
  check_bernstein_admissible(F, zeta);
  if (paths.empty()) throw PreconditionError("bernstein: no paths");
  BernsteinReport r;
  r.n = paths.size();
  r.zeta = zeta;
  for (const auto& p : paths)
    if (p.sup >= zeta && p.qv <= F(p.sup)) ++r.hits;
  const double n = static_cast<double>(r.n);
  r.frequency = static_cast<double>(r.hits) / n;
  r.std_error = std::sqrt(r.frequency * (1.0 - r.frequency) / n);
  r.bound = std::exp(-zeta * zeta / (2.0 * F(zeta)));
  r.margin = r.bound + 3.0 * r.std_error - r.frequency;
  return r;
}

}  // namespace sclaw::rareevent
