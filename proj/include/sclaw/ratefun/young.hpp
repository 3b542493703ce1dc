#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "sclaw/core/errors.hpp"
#include "sclaw/core/grid.hpp"
#include "sclaw/core/parallel.hpp"
#include "sclaw/model/coefficients.hpp"
#include "sclaw/numerics/tridiagonal.hpp"
#include "sclaw/ratefun/measure.hpp"

namespace sclaw::ratefun {

inline constexpr double kCoeffFloor = 1e-10;

/// Discrete d/dt on a stored time grid: centred (u_{k+1} - u_{k-1}) / (t_{k+1} - t_{k-1}),
/// one-sided at both ends. Together with the trapezoid weights it satisfies summation by
/// parts exactly: sum_k w_k phi_k (D u)_k = phi_K u_K - phi_0 u_0 - sum_k w_k u_k (D phi)_k.
inline double time_derivative(const std::vector<double>& t, std::size_t k, double prev, double cur, double next) {
  const std::size_t K = t.size() - 1;
  if (k == 0) return (next - cur) / (t[1] - t[0]);
  if (k == K) return (cur - prev) / (t[K] - t[K - 1]);
  return (next - prev) / (t[k + 1] - t[k - 1]);
}

inline GridField time_derivative(const std::vector<GridField>& u, const std::vector<double>& t, std::size_t k) {
  const std::size_t K = t.size() - 1;
  GridField out(u[k].grid());
  const GridField& prev = u[k == 0 ? 0 : k - 1];
  const GridField& next = u[k == K ? K : k + 1];
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = time_derivative(t, k, prev[i], u[k][i], next[i]);
  return out;
}

/// Face-centred moment data per stored time: the mean field, face flux mu(f) and
/// face coefficient mu(a^2) (cell averages of the adjacent cells).
struct SliceData {
  TorusGrid grid;
  std::vector<double> times;
  std::vector<GridField> mean;
  std::vector<std::vector<double>> face_flux;
  std::vector<std::vector<double>> face_a2;
};

inline SliceData slice_data(const YoungMeasureField& mu) {
  SliceData s{mu.grid(), mu.times(), {}, {}, {}};
  const std::size_t n = mu.grid().n_cells();
  for (std::size_t k = 0; k < mu.n_times(); ++k) {
    s.mean.push_back(mu.mean(k));
    std::vector<double> F(n), A(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = i + 1 == n ? 0 : i + 1;
      F[i] = 0.5 * (mu.flux(k)[i] + mu.flux(k)[j]);
      A[i] = 0.5 * (mu.a2(k)[i] + mu.a2(k)[j]);
    }
    s.face_flux.push_back(std::move(F));
    s.face_a2.push_back(std::move(A));
  }
  return s;
}

/// Same data for delta_{v(t,x)} without building per-cell measures.
inline SliceData slice_data(const Trajectory& v, const model::ModelCoefficients& m) {
  SliceData s{v.grid(), v.times(), v.frames(), {}, {}};
  const std::size_t n = v.grid().n_cells();
  for (const auto& fr : v.frames()) {
    std::vector<double> F(n), A(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double a = std::clamp(fr[i], 0.0, 1.0), b = std::clamp(fr[i + 1 == n ? 0 : i + 1], 0.0, 1.0);
      F[i] = 0.5 * (m.f(a) + m.f(b));
      A[i] = 0.5 * (m.a2(a) + m.a2(b));
    }
    s.face_flux.push_back(std::move(F));
    s.face_a2.push_back(std::move(A));
  }
  return s;
}

struct FunctionalResult {
  double value = 0.0;
  bool finite = true;
  std::vector<double> per_slice;  // slice value before the time weight
  std::vector<double> weights;    // time weights
  long bad_slice = -1;
  std::string diagnostic;

  static FunctionalResult infinite(std::string why, long slice = -1) {
    FunctionalResult r;
    r.value = std::numeric_limits<double>::infinity();
    r.finite = false;
    r.bad_slice = slice;
    r.diagnostic = std::move(why);
    return r;
  }

  std::string to_text() const {
    std::ostringstream os;
    os.precision(10);
    if (finite)
      os << "value " << value << "\n";
    else
      os << "value inf (" << diagnostic << ")\n";
    return os.str();
  }
};

/// Per-stored-time solution psi of -div(A grad psi) = D_t mean + div F, zero mean.
struct ControlField {
  TorusGrid grid{8};
  std::vector<double> times;
  std::vector<GridField> psi;
  std::vector<std::vector<double>> face_a2;  // floored coefficient used in the solve
  double cost = 0.0;

  /// (nabla psi)_{i+1/2} on slice k.
  double gradient(std::size_t k, std::size_t i) const {
    const std::size_t n = grid.n_cells();
    return (psi[k][i + 1 == n ? 0 : i + 1] - psi[k][i]) / grid.dx();
  }

  /// sum_k w_k 1/2 sum_faces A (nabla psi)^2 dx.
  double recompute_cost() const {
    const auto w = trapezoid_weights(times);
    double total = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < grid.n_cells(); ++i) {
        const double g = gradient(k, i);
        s += face_a2[k][i] * g * g;
      }
      total += w[k] * 0.5 * s * grid.dx();
    }
    return total;
  }

  /// Slice at time t, linear in t between stored times.
  GridField psi_at(double t) const {
    if (t <= times.front()) return psi.front();
    if (t >= times.back()) return psi.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - times.begin()) - 1;
    const double th = (t - times[k]) / (times[k + 1] - times[k]);
    GridField out(grid);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1 - th) * psi[k][i] + th * psi[k + 1][i];
    return out;
  }
};

struct EllipticOptions {
  double init_tol = 1e-8;
  double mass_tol = 1e-8;
  /// Largest admissible H^-1 distance between consecutive mean fields per unit time.
  double continuity_rate = 5.0;
  unsigned workers = 1;
};

namespace detail {

inline std::vector<double> slice_rhs(const SliceData& s, std::size_t k) {
  const std::size_t n = s.grid.n_cells();
  const double dx = s.grid.dx();
  const GridField dt = time_derivative(s.mean, s.times, k);
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = dt[i] + (s.face_flux[k][i] - s.face_flux[k][i == 0 ? n - 1 : i - 1]) / dx;
  return r;
}

inline void check_time_step(const SliceData& s) {
  for (std::size_t k = 1; k < s.times.size(); ++k)
    if (s.times[k] - s.times[k - 1] > s.grid.dx() * (1 + 1e-12))
      throw PreconditionError("stored time step " + std::to_string(s.times[k] - s.times[k - 1]) +
                              " exceeds dx = " + std::to_string(s.grid.dx()) + "; store more frames");
}

}  // namespace detail

/// Evaluates sum_k w_k sup_phi [<R_k, phi> - 1/2 <A grad phi, grad phi>] by one periodic
/// elliptic solve per slice. Infinite on a mismatched initial state, a nonzero-mean
/// slice residual, a jump in time of the mean, or a slice where every face coefficient is
/// below the floor while the residual is not zero.
inline FunctionalResult elliptic_functional(const SliceData& s, const GridField& u0, const EllipticOptions& opt = {},
                                            ControlField* control = nullptr) {
  const std::size_t n = s.grid.n_cells(), K = s.times.size();
  if (K < 2) throw PreconditionError("elliptic functional: need at least two stored times");
  if (!(u0.grid() == s.grid)) throw StructuralError("elliptic functional: u0 grid mismatch");
  detail::check_time_step(s);
  const double dx = s.grid.dx();

  double init = 0.0;
  for (std::size_t i = 0; i < n; ++i) init = std::max(init, std::abs(s.mean[0][i] - u0[i]));
  if (init > opt.init_tol)
    return FunctionalResult::infinite("initial mean differs from u0 by " + std::to_string(init), 0);
  for (std::size_t k = 1; k < K; ++k) {
    const double d = h_minus1_distance(s.mean[k], s.mean[k - 1]);
    if (d > opt.continuity_rate * (s.times[k] - s.times[k - 1]))
      return FunctionalResult::infinite("mean jumps in time before slice " + std::to_string(k) + " (H^-1 increment " +
                                            std::to_string(d) + ")",
                                        static_cast<long>(k));
  }

  std::vector<double> slice(K, 0.0);
  std::vector<std::string> bad(K);
  std::vector<GridField> psi(K, GridField(s.grid));
  std::vector<std::vector<double>> coeff(K);
  parallel_for(K, opt.workers, [&](std::size_t k) {
    auto r = detail::slice_rhs(s, k);
    double mean = 0.0, rmax = 0.0;
    for (double x : r) mean += x * dx, rmax = std::max(rmax, std::abs(x));
    if (std::abs(mean) > opt.mass_tol) {
      bad[k] = "slice residual has mean " + std::to_string(mean) + " (mass not conserved)";
      return;
    }
    auto A = s.face_a2[k];
    bool all_floored = true;
    for (double& a : A) {
      if (a >= kCoeffFloor) all_floored = false;
      a = std::max(a, kCoeffFloor);
    }
    coeff[k] = A;
    if (rmax == 0.0) return;
    if (all_floored) {
      bad[k] = "degenerate coefficient with nonzero residual";
      return;
    }
    for (double& x : r) x -= mean;
    auto p = numerics::solve_periodic_elliptic(A, r, dx);
    double val = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double g = (p[i + 1 == n ? 0 : i + 1] - p[i]) / dx;
      val += A[i] * g * g;
    }
    slice[k] = 0.5 * val * dx;
    psi[k] = GridField(s.grid, std::move(p));
  });
  for (std::size_t k = 0; k < K; ++k)
    if (!bad[k].empty()) return FunctionalResult::infinite(bad[k] + " at slice " + std::to_string(k), static_cast<long>(k));

  FunctionalResult res;
  res.weights = trapezoid_weights(s.times);
  res.per_slice = slice;
  for (std::size_t k = 0; k < K; ++k) res.value += res.weights[k] * slice[k];
  if (control) {
    control->grid = s.grid;
    control->times = s.times;
    control->psi = std::move(psi);
    control->face_a2 = std::move(coeff);
    control->cost = res.value;
  }
  return res;
}

/// Young-measure functional with initial state u0.
inline FunctionalResult young_i(const YoungMeasureField& mu, const GridField& u0, const EllipticOptions& opt = {}) {
  return elliptic_functional(slice_data(mu), u0, opt);
}

/// The sup-form objective at one test function phi (given at the stored times):
/// <mean_K, phi_K> - <u0, phi_0> - sum_k w_k [<mean_k, D_t phi> + <F_k, grad phi> + 1/2 <A_k grad phi, grad phi>],
/// with the same floored coefficient as the elliptic evaluation, so it never exceeds it
/// beyond rounding.
inline double young_objective(const SliceData& s, const GridField& u0, const std::vector<GridField>& phi) {
  const std::size_t n = s.grid.n_cells(), K = s.times.size();
  if (phi.size() != K) throw StructuralError("young_objective: need phi at every stored time");
  const double dx = s.grid.dx();
  const auto w = trapezoid_weights(s.times);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += (s.mean[K - 1][i] * phi[K - 1][i] - u0[i] * phi[0][i]) * dx;
  for (std::size_t k = 0; k < K; ++k) {
    const GridField dphi = time_derivative(phi, s.times, k);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double g = (phi[k][i + 1 == n ? 0 : i + 1] - phi[k][i]) / dx;
      const double A = std::max(s.face_a2[k][i], kCoeffFloor);
      acc += s.mean[k][i] * dphi[i] + s.face_flux[k][i] * g + 0.5 * A * g * g;
    }
    total -= w[k] * acc * dx;
  }
  return total;
}

inline double young_objective(const YoungMeasureField& mu, const GridField& u0, const std::vector<GridField>& phi) {
  return young_objective(slice_data(mu), u0, phi);
}

/// Psi for a target path v: -div(a^2(v) grad psi) = d_t v + div f(v) per stored time; cost
/// equals the Young functional of delta_v. Infinite cost (empty psi) on degenerate slices.
inline ControlField control_from_target(const Trajectory& target, const model::ModelCoefficients& m,
                                        const EllipticOptions& opt = {}) {
  ControlField c;
  const auto res = elliptic_functional(slice_data(target, m), target.front(), opt, &c);
  if (!res.finite) {
    c.grid = target.grid();
    c.times = target.times();
    c.cost = res.value;
  }
  return c;
}

}  // namespace sclaw::ratefun
