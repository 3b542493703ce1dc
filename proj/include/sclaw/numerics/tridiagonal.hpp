#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "sclaw/core/errors.hpp"

namespace sclaw::numerics {

/// Thomas algorithm for lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]
/// (lower[0] and upper[n-1] ignored). No pivoting: the matrix must be
/// diagonally dominant or otherwise safely factorable.
inline std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                             std::span<const double> upper, std::span<const double> rhs) {
  const std::size_t n = diag.size();
  std::vector<double> c(n), d(n), x(n);
  double denom = diag[0];
  if (denom == 0.0) throw PreconditionError("solve_tridiagonal: zero pivot");
  c[0] = n > 1 ? upper[0] / denom : 0.0;
  d[0] = rhs[0] / denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = diag[i] - lower[i] * c[i - 1];
    if (denom == 0.0) throw PreconditionError("solve_tridiagonal: zero pivot");
    c[i] = i + 1 < n ? upper[i] / denom : 0.0;
    d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom;
  }
  x[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

/// Cyclic tridiagonal system: as above plus the corner couplings
/// lower[0] x[n-1] and upper[n-1] x[0]. Sherman-Morrison on the Thomas solve.
inline std::vector<double> solve_cyclic_tridiagonal(std::span<const double> lower,
                                                    std::span<const double> diag,
                                                    std::span<const double> upper,
                                                    std::span<const double> rhs) {
  const std::size_t n = diag.size();
  if (n < 3) throw PreconditionError("solve_cyclic_tridiagonal: need n >= 3");
  const double alpha = upper[n - 1];  // A(n-1, 0)
  const double beta = lower[0];       // A(0, n-1)
  const double gamma = -diag[0];
  std::vector<double> b(diag.begin(), diag.end());
  b[0] = diag[0] - gamma;
  b[n - 1] = diag[n - 1] - alpha * beta / gamma;
  const auto x = solve_tridiagonal(lower, b, upper, rhs);
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = alpha;
  const auto z = solve_tridiagonal(lower, b, upper, u);
  const double fact =
      (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - fact * z[i];
  return out;
}

/// Periodic variable-coefficient elliptic problem on a uniform grid:
///   -(A[i] (psi[i+1] - psi[i]) - A[i-1] (psi[i] - psi[i-1])) / dx^2 = rhs[i],
/// where A[i] lives on face i+1/2. rhs must have zero mean. Returns the
/// mean-zero solution. The null space is removed by pinning psi[n-1] = 0,
/// which leaves a plain tridiagonal system on the first n-1 unknowns.
inline std::vector<double> solve_periodic_elliptic(std::span<const double> face_coeff,
                                                   std::span<const double> rhs, double dx) {
  const std::size_t n = rhs.size();
  if (face_coeff.size() != n) throw StructuralError("solve_periodic_elliptic: size mismatch");
  if (n < 3) throw PreconditionError("solve_periodic_elliptic: need n >= 3");
  const std::size_t m = n - 1;
  const double inv = 1.0 / (dx * dx);
  std::vector<double> lo(m), di(m), up(m), r(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double a_left = face_coeff[i == 0 ? n - 1 : i - 1];
    const double a_right = face_coeff[i];
    lo[i] = -a_left * inv;
    up[i] = -a_right * inv;
    di[i] = (a_left + a_right) * inv;
    r[i] = rhs[i];
  }
  auto x = solve_tridiagonal(lo, di, up, r);
  std::vector<double> psi(n, 0.0);
  double mean = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    psi[i] = x[i];
    mean += x[i];
  }
  mean /= static_cast<double>(n);
  for (double& p : psi) p -= mean;
  return psi;
}

}  // namespace sclaw::numerics
