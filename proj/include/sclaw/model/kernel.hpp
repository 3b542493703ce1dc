#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "sclaw/core/grid.hpp"

namespace sclaw::model {

enum class KernelShape { Triangle, GaussianTruncated, Uniform };

inline KernelShape parse_kernel_shape(const std::string& s) {
  if (s == "triangle") return KernelShape::Triangle;
  if (s == "gaussian-truncated" || s == "gaussian") return KernelShape::GaussianTruncated;
  if (s == "uniform") return KernelShape::Uniform;
  throw ConfigError("unknown kernel shape '" + s + "' (expected triangle, gaussian-truncated, uniform)");
}

inline std::string to_string(KernelShape s) {
  switch (s) {
    case KernelShape::Triangle: return "triangle";
    case KernelShape::GaussianTruncated: return "gaussian-truncated";
    case KernelShape::Uniform: return "uniform";
  }
  return "?";
}

/// Positive periodic mollifier sampled at the grid offsets m*dx, m = 0..N-1,
/// with unit discrete mass. `width` is the diameter of the support.
class MollifierKernel {
 public:
  MollifierKernel(KernelShape shape, double width, GridField samples)
      : shape_(shape), width_(width), samples_(std::move(samples)) {
    compute_norms();
  }

  KernelShape shape() const noexcept { return shape_; }
  double width() const noexcept { return width_; }
  const TorusGrid& grid() const noexcept { return samples_.grid(); }
  const GridField& samples() const noexcept { return samples_; }
  /// Value at signed offset m (cells).
  double at_offset(std::ptrdiff_t m) const noexcept { return samples_.at_wrapped(m); }
  /// Largest |m| with a nonzero sample.
  std::size_t half_support() const noexcept { return half_support_; }

  double norm_l2() const noexcept { return std::sqrt(l2_sq_); }
  double norm_l2_sq() const noexcept { return l2_sq_; }
  double norm_grad_l2() const noexcept { return std::sqrt(grad_sq_); }
  double norm_grad_l2_sq() const noexcept { return grad_sq_; }
  /// ||j - 1||_{W^{-1,1}}: least L1 norm over primitives J of j - 1.
  double dist_w11() const noexcept { return dist_w11_; }

  /// out_i = sum_m j(m dx) in_{i-m} dx (circular).
  void convolve(std::span<const double> in, std::span<double> out) const {
    const std::size_t n = in.size();
    const double dx = grid().dx();
    const auto hs = static_cast<std::ptrdiff_t>(half_support_);
    if (2 * half_support_ + 1 >= n) {
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t m = 0; m < n; ++m) s += samples_[m] * in[(i + n - m) % n];
        out[i] = s * dx;
      }
      return;
    }
    // Periodic padding: padded[k + hs] = in[k mod n] for k in [-hs, n + hs).
    thread_local std::vector<double> padded;
    padded.resize(n + 2 * half_support_);
    for (std::ptrdiff_t k = -hs; k < static_cast<std::ptrdiff_t>(n) + hs; ++k)
      padded[static_cast<std::size_t>(k + hs)] = in[grid().wrap(k)];
    const double* w = weights_.data() + half_support_;  // w[m] for m in [-hs, hs]
    for (std::size_t i = 0; i < n; ++i) {
      const double* x = padded.data() + i + half_support_;  // x[-m] = in[i - m]
      double s = 0.0;
      for (std::ptrdiff_t m = -hs; m <= hs; ++m) s += w[m] * x[-m];
      out[i] = s * dx;
    }
  }

  GridField convolve(const GridField& in) const {
    GridField out(in.grid());
    convolve(in.values(), out.values());
    return out;
  }

 private:
  void compute_norms() {
    const std::size_t n = samples_.size();
    const double dx = grid().dx();
    l2_sq_ = 0.0;
    grad_sq_ = 0.0;
    half_support_ = 0;
    for (std::size_t m = 0; m < n; ++m) {
      l2_sq_ += samples_[m] * samples_[m] * dx;
      const double g = (samples_.at_wrapped(static_cast<std::ptrdiff_t>(m) + 1) -
                        samples_.at_wrapped(static_cast<std::ptrdiff_t>(m) - 1)) /
                       (2.0 * dx);
      grad_sq_ += g * g * dx;
      if (samples_[m] != 0.0) half_support_ = std::max(half_support_, std::min(m, n - m));
    }
    weights_.assign(2 * half_support_ + 1, 0.0);
    for (std::size_t k = 0; k < weights_.size(); ++k)
      weights_[k] = at_offset(static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(half_support_));

    std::vector<double> primitive(n);
    double acc = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      acc += (samples_[m] - 1.0) * dx;
      primitive[m] = acc;
    }
    // The L1-optimal additive constant is minus a median of the primitive.
    std::vector<double> sorted = primitive;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n / 2), sorted.end());
    const double c = -sorted[n / 2];
    dist_w11_ = 0.0;
    for (double p : primitive) dist_w11_ += std::abs(p + c) * dx;
  }

  KernelShape shape_;
  double width_;
  GridField samples_;
  std::vector<double> weights_;
  std::size_t half_support_ = 0;
  double l2_sq_ = 0.0, grad_sq_ = 0.0, dist_w11_ = 0.0;
};

/// Samples the shape on the grid offsets, clips to >= 0 and renormalizes to unit mass.
inline MollifierKernel make_kernel(KernelShape shape, double width, TorusGrid grid) {
  const double dx = grid.dx();
  if (!(width >= 2.0 * dx * (1.0 - 1e-12)))
    throw PreconditionError("make_kernel: width " + std::to_string(width) +
                            " below grid resolution 2*dx = " + std::to_string(2.0 * dx));
  if (!(width <= 1.0)) throw PreconditionError("make_kernel: width must not exceed the torus length");
  const std::size_t n = grid.n_cells();
  const double half = 0.5 * width;
  std::vector<double> v(n, 0.0);
  for (std::size_t m = 0; m < n; ++m) {
    const double r = static_cast<double>(std::min(m, n - m)) * dx;
    switch (shape) {
      case KernelShape::Triangle: v[m] = std::max(0.0, 1.0 - r / half) / half; break;
      case KernelShape::Uniform: v[m] = r <= half * (1.0 + 1e-12) ? 1.0 / width : 0.0; break;
      case KernelShape::GaussianTruncated: {
        const double sigma = width / 6.0;
        v[m] = r <= half ? std::exp(-0.5 * r * r / (sigma * sigma)) : 0.0;
        break;
      }
    }
    v[m] = std::max(v[m], 0.0);
  }
  double mass = 0.0;
  for (double x : v) mass += x;
  mass *= dx;
  for (double& x : v) x /= mass;
  // A second pass pins the discrete mass to 1 within one rounding of the sum.
  double mass2 = 0.0;
  for (double x : v) mass2 += x;
  mass2 *= dx;
  if (mass2 != 1.0)
    for (double& x : v) x /= mass2;
  return MollifierKernel(shape, width, GridField(grid, std::move(v)));
}

}  // namespace sclaw::model
