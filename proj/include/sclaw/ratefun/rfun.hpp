#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "sclaw/core/errors.hpp"
#include "sclaw/model/coefficients.hpp"
#include "sclaw/ratefun/measure.hpp"

namespace sclaw::ratefun {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// (F - c)^2 / A with (c - c)^2 / 0 = 0.
inline double moment_objective(double F, double A, double c) {
  const double num = (F - c) * (F - c);
  if (A > 0.0) return num / A;
  return num == 0.0 ? 0.0 : kInf;
}

namespace detail {

struct SegmentMin {
  double value = kInf;
  double t = 0.0;
};

// min over t in [0,1] of (al + be t)^2 / (ga + de t), with ga, ga + de >= 0.
// Convex in t, so the minimum sits at an endpoint, at the zero of the numerator or at
// the stationary point t = (de al - 2 be ga) / (be de).
inline SegmentMin segment_min(double al, double be, double ga, double de) {
  SegmentMin best;
  auto consider = [&](double t) {
    if (!(t >= 0.0 && t <= 1.0)) return;
    const double v = moment_objective(al + be * t, std::max(ga + de * t, 0.0), 0.0);
    if (v < best.value) best = {v, t};
  };
  consider(0.0);
  consider(1.0);
  if (be != 0.0) consider(-al / be);
  if (be != 0.0 && de != 0.0) consider((de * al - 2.0 * be * ga) / (be * de));
  return best;
}

// Moments of (f, a^2) at the sampled positions.
struct MomentPoint {
  double F, A;
};

}  // namespace detail

struct RFunResult {
  double value = kInf;
  DiscreteMeasure argmin;
};

/// Minimizer of (nu(f) - c)^2 / nu(a^2) over measures with at most three atoms and mean w.
/// Positions are searched by multi-start coordinate descent; for fixed positions the
/// admissible weights form a segment on which the objective is minimized in closed form.
class RFunSolver {
 public:
  explicit RFunSolver(const model::ModelCoefficients& m) : m_(&m) {}

  /// Fixed positions x (any order); returns the best weights or value = inf if
  /// w is outside their hull.
  RFunResult three_atom(std::array<double, 3> x, double w, double c) const {
    std::sort(x.begin(), x.end());
    RFunResult r;
    if (w < x[0] - 1e-15 || w > x[2] + 1e-15) return r;
    const double span = x[2] - x[0];
    if (span <= 0.0) {
      r.value = moment_objective(m_->f(w), m_->a2(w), c);
      r.argmin = DiscreteMeasure::dirac(w);
      return r;
    }
    // p2 = t, p3 = (w - x1 - t (x2 - x1)) / span, p1 = 1 - t - p3; both >= 0 on [0, t_max].
    const double q = (x[1] - x[0]) / span;  // in [0,1]
    const double b = (w - x[0]) / span;     // in [0,1]
    double t_max = 1.0;
    // p3 >= 0: b - t q >= 0; p1 >= 0: 1 - b - t (1 - q) >= 0.
    if (q > 0.0) t_max = std::min(t_max, b / q);
    if (q < 1.0) t_max = std::min(t_max, (1.0 - b) / (1.0 - q));
    t_max = std::max(t_max, 0.0);
    const double f1 = m_->f(x[0]), f2 = m_->f(x[1]), f3 = m_->f(x[2]);
    const double a1 = m_->a2(x[0]), a2 = m_->a2(x[1]), a3 = m_->a2(x[2]);
    auto weights = [&](double t) {
      const double p3 = std::max(b - t * q, 0.0);
      const double p1 = std::max(1.0 - t - p3, 0.0);
      return std::array<double, 3>{p1, t, p3};
    };
    const auto w0 = weights(0.0), w1 = weights(t_max);
    const double F0 = w0[0] * f1 + w0[1] * f2 + w0[2] * f3, F1 = w1[0] * f1 + w1[1] * f2 + w1[2] * f3;
    const double A0 = w0[0] * a1 + w0[1] * a2 + w0[2] * a3, A1 = w1[0] * a1 + w1[1] * a2 + w1[2] * a3;
    const auto s = detail::segment_min(F0 - c, F1 - F0, std::max(A0, 0.0), A1 - A0);
    const auto p = weights(s.t * t_max);
    const double tot = p[0] + p[1] + p[2];
    r.value = s.value;
    r.argmin = DiscreteMeasure({{x[0], p[0] / tot}, {x[1], p[1] / tot}, {x[2], p[2] / tot}}).compact();
    return r;
  }

  RFunResult operator()(double w, double c) const {
    if (!(w >= 0.0 && w <= 1.0)) throw PreconditionError("r_fun: mean w=" + std::to_string(w) + " outside [0,1]");
    if (!std::isfinite(c)) throw PreconditionError("r_fun: c must be finite");
    std::vector<double> grid;
    for (int k = 0; k <= 16; ++k) grid.push_back(k / 16.0);
    grid.push_back(w);

    struct Seed {
      double value;
      std::array<double, 3> x;
    };
    std::vector<Seed> seeds;
    for (std::size_t i = 0; i < grid.size(); ++i)
      for (std::size_t j = i; j < grid.size(); ++j)
        for (std::size_t k = j; k < grid.size(); ++k) {
          const std::array<double, 3> x{grid[i], grid[j], grid[k]};
          const double lo = std::min({x[0], x[1], x[2]}), hi = std::max({x[0], x[1], x[2]});
          if (w < lo || w > hi) continue;
          seeds.push_back({three_atom(x, w, c).value, x});
        }
    std::partial_sort(seeds.begin(), seeds.begin() + std::min<std::size_t>(kStarts, seeds.size()), seeds.end(),
                      [](const Seed& a, const Seed& b) { return a.value < b.value; });

    RFunResult best = three_atom({w, w, w}, w, c);
    for (std::size_t s = 0; s < std::min<std::size_t>(kStarts, seeds.size()); ++s) {
      auto x = seeds[s].x;
      RFunResult cur = three_atom(x, w, c);
      for (double step = 0.1; step >= 1e-7 && cur.value > 0.0;) {
        bool moved = false;
        for (int a = 0; a < 3; ++a)
          for (double dir : {-1.0, 1.0}) {
            auto y = x;
            y[a] = std::clamp(y[a] + dir * step, 0.0, 1.0);
            const auto r = three_atom(y, w, c);
            if (r.value < cur.value) cur = r, x = y, moved = true;
          }
        if (!moved) step *= 0.5;
      }
      if (cur.value < best.value) best = cur;
    }
    return best;
  }

 private:
  static constexpr std::size_t kStarts = 6;
  const model::ModelCoefficients* m_;
};

inline RFunResult r_fun(const model::ModelCoefficients& m, double w, double c) { return RFunSolver(m)(w, c); }

/// The moment set {(nu(f), nu(a^2)) : nu supported on an n-point grid, mean w} as a convex
/// polygon. Its vertices come from two-atom measures, so the polygon is exact for the grid
/// and R restricted to grid measures is a minimum over its edges.
class MomentPolygon {
 public:
  MomentPolygon(const model::ModelCoefficients& m, double w, std::size_t n = 201) : w_(w) {
    if (!(w >= 0.0 && w <= 1.0)) throw PreconditionError("MomentPolygon: w outside [0,1]");
    std::vector<double> v(n), f(n), a(n);
    for (std::size_t j = 0; j < n; ++j) {
      v[j] = static_cast<double>(j) / (n - 1);
      f[j] = m.f(v[j]);
      a[j] = m.a2(v[j]);
    }
    std::vector<detail::MomentPoint> pts{{m.f(w), m.a2(w)}};
    for (std::size_t l = 0; l < n && v[l] <= w; ++l)
      for (std::size_t r = n; r-- > 0 && v[r] >= w;) {
        if (v[r] == v[l]) continue;
        const double p = (v[r] - w) / (v[r] - v[l]);
        pts.push_back({p * f[l] + (1 - p) * f[r], p * a[l] + (1 - p) * a[r]});
      }
    hull_ = convex_hull(std::move(pts));
  }

  const std::vector<detail::MomentPoint>& vertices() const noexcept { return hull_; }

  double r(double c) const {
    if (hull_.size() == 1) return moment_objective(hull_[0].F, hull_[0].A, c);
    double best = kInf;
    for (std::size_t k = 0; k < hull_.size(); ++k) {
      const auto& P = hull_[k];
      const auto& Q = hull_[(k + 1) % hull_.size()];
      best = std::min(best, detail::segment_min(P.F - c, Q.F - P.F, std::max(P.A, 0.0), Q.A - P.A).value);
      if (best == 0.0) break;
    }
    return best;
  }

 private:
  static std::vector<detail::MomentPoint> convex_hull(std::vector<detail::MomentPoint> p) {
    std::sort(p.begin(), p.end(), [](auto& x, auto& y) { return x.F < y.F || (x.F == y.F && x.A < y.A); });
    p.erase(std::unique(p.begin(), p.end(), [](auto& x, auto& y) { return x.F == y.F && x.A == y.A; }), p.end());
    if (p.size() < 3) return p;
    auto cross = [](const auto& o, const auto& a, const auto& b) {
      return (a.F - o.F) * (b.A - o.A) - (a.A - o.A) * (b.F - o.F);
    };
    std::vector<detail::MomentPoint> h(2 * p.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      while (k >= 2 && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
      h[k++] = p[i];
    }
    for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
      while (k >= t && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
      h[k++] = p[i];
    }
    h.resize(k - 1);
    return h;
  }

  double w_;
  std::vector<detail::MomentPoint> hull_;
};

/// R(w, c) on a (w, c) grid with bilinear interpolation; queries outside the c range
/// fall back to interpolating exact polygon values in w.
class RTable {
 public:
  RTable(const model::ModelCoefficients& m, double c_lo, double c_hi, std::size_t nw = 257, std::size_t nc = 257,
         std::size_t support = 201)
      : c_lo_(c_lo), c_hi_(c_hi), nw_(nw), nc_(nc) {
    if (!(c_hi > c_lo) || nw < 2 || nc < 2) throw PreconditionError("RTable: bad range");
    polys_.reserve(nw);
    for (std::size_t i = 0; i < nw; ++i) polys_.emplace_back(m, static_cast<double>(i) / (nw - 1), support);
    table_.resize(nw * nc);
    for (std::size_t i = 0; i < nw; ++i)
      for (std::size_t j = 0; j < nc; ++j) table_[i * nc + j] = polys_[i].r(c_at(j));
  }

  double c_lo() const noexcept { return c_lo_; }
  double c_hi() const noexcept { return c_hi_; }

  double operator()(double w, double c) const {
    w = std::clamp(w, 0.0, 1.0);
    const double sw = w * (nw_ - 1);
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(sw), nw_ - 2);
    const double tw = sw - i;
    if (c < c_lo_ || c > c_hi_) {
      const double r0 = polys_[i].r(c), r1 = polys_[i + 1].r(c);
      return blend(r0, r1, tw);
    }
    const double sc = (c - c_lo_) / (c_hi_ - c_lo_) * (nc_ - 1);
    const std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(sc), nc_ - 2);
    const double tc = sc - j;
    const double lo = blend(table_[i * nc_ + j], table_[i * nc_ + j + 1], tc);
    const double hi = blend(table_[(i + 1) * nc_ + j], table_[(i + 1) * nc_ + j + 1], tc);
    return blend(lo, hi, tw);
  }

 private:
  double c_at(std::size_t j) const { return c_lo_ + (c_hi_ - c_lo_) * static_cast<double>(j) / (nc_ - 1); }
  // Linear blend; an infinite end point makes the whole cell infinite unless t hits the other end.
  static double blend(double a, double b, double t) {
    if (t == 0.0) return a;
    if (t == 1.0) return b;
    if (!std::isfinite(a) || !std::isfinite(b)) return kInf;
    return (1 - t) * a + t * b;
  }

  double c_lo_, c_hi_;
  std::size_t nw_, nc_;
  std::vector<MomentPolygon> polys_;
  std::vector<double> table_;
};

}  // namespace sclaw::ratefun
