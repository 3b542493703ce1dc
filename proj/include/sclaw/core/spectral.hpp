#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include "sclaw/core/grid.hpp"

namespace sclaw {

namespace detail {

// FFTW planning is not thread-safe; execution is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace detail

/// Normalized DFT c_k = (1/N) sum_j v_j exp(-2 pi i j k / N), k = 0..N/2.
inline std::vector<std::complex<double>> real_dft(std::span<const double> values) {
  const int n = static_cast<int>(values.size());
  std::vector<double> in(values.begin(), values.end());
  std::vector<std::complex<double>> out(static_cast<std::size_t>(n / 2 + 1));
  fftw_plan plan;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(out.data()),
                                FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  for (auto& c : out) c /= static_cast<double>(n);
  return out;
}

/// Symbol of the forward-difference Laplacian: (4/dx^2) sin^2(pi k / N).
inline double laplacian_symbol(std::size_t k, std::size_t n, double dx) {
  const double s = std::sin(std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
  return 4.0 * s * s / (dx * dx);
}

/// Discrete H^{-1} distance: the dual of the grid norm ||phi||^2 + ||D+ phi||^2,
/// evaluated spectrally as (sum_k |c_k|^2 / (1 + lambda_k))^{1/2}.
inline double h_minus1_distance(const GridField& a, const GridField& b) {
  require_same_grid(a, b, "h_minus1_distance");
  const std::size_t n = a.size();
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = a[i] - b[i];
  const auto c = real_dft(diff);
  const double dx = a.grid().dx();
  double s = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    // Modes k and N-k coincide in magnitude; count the conjugate half except k=0 and k=N/2.
    const double mult = (k == 0 || 2 * k == n) ? 1.0 : 2.0;
    s += mult * std::norm(c[k]) / (1.0 + laplacian_symbol(k, n, dx));
  }
  return std::sqrt(s);
}

}  // namespace sclaw
