#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "sclaw/core/grid.hpp"
#include "sclaw/core/parallel.hpp"
#include "sclaw/core/rng.hpp"
#include "sclaw/spde/stepper.hpp"

namespace sclaw::spde {

struct Scheme {
  enum class Kind { EM, Split } kind = Kind::EM;
  int n_dyadic = 0;

  static Scheme em() { return {Kind::EM, 0}; }
  static Scheme split(int n) { return {Kind::Split, n}; }

  std::string name() const { return kind == Kind::EM ? "em" : "split(" + std::to_string(n_dyadic) + ")"; }
};

inline Scheme parse_scheme(const std::string& s) {
  if (s == "em") return Scheme::em();
  if (s.rfind("split", 0) == 0) {
    const auto open = s.find('('), close = s.find(')');
    if (open == std::string::npos || close == std::string::npos || close <= open + 1)
      throw ConfigError("scheme '" + s + "': expected split(n)");
    return Scheme::split(std::stoi(s.substr(open + 1, close - open - 1)));
  }
  throw ConfigError("unknown scheme '" + s + "' (expected em or split(n))");
}

/// Initial mollifier for the split scheme: triangle of width max(4 dx, 2^-n).
inline model::MollifierKernel split_initial_mollifier(const TorusGrid& grid, int n_dyadic) {
  const double w = std::max(4.0 * grid.dx(), std::ldexp(1.0, -n_dyadic));
  return model::make_kernel(model::KernelShape::Triangle, std::min(w, 1.0), grid);
}

inline Trajectory simulate(const model::ModelCoefficients& m, const SpdeParams& p, const NoisePlan& plan,
                           const GridField& u0, RngStream& stream, Scheme scheme = Scheme::em()) {
  if (!(p.eps > 0.0)) throw PreconditionError("simulate: eps must be positive");
  if (!(p.gamma > 0.5)) throw PreconditionError("simulate: gamma must exceed 1/2");
  if (!(plan.kernel.grid() == u0.grid())) throw StructuralError("simulate: kernel and data on different grids");
  if (!u0.all_finite() || u0.min() < 0.0 || u0.max() > 1.0)
    throw PreconditionError("simulate: initial datum must take values in [0,1]");
  const TorusGrid grid = u0.grid();
  const bool split = scheme.kind == Scheme::Kind::Split;
  if (split && scheme.n_dyadic < 1) throw PreconditionError("simulate: split scheme needs n_dyadic >= 1");
  if (split && scheme.n_dyadic > 30) throw PreconditionError("simulate: n_dyadic too large");
  const std::size_t windows = split ? (std::size_t{1} << scheme.n_dyadic) : 1;
  const auto tg = resolve_time_grid(m, p, plan, grid, windows);
  const std::size_t per_window = tg.n_steps / windows;

  TrajectoryMeta meta;
  meta.scheme = scheme.name();
  meta.eps = p.eps;
  meta.gamma = p.gamma;
  meta.dt = tg.dt;
  meta.seed = stream.master_seed();
  meta.stream_index = stream.stream_index();
  meta.store_stride = tg.stride;
  Trajectory traj(grid, meta);
  traj.push(0.0, u0);

  Stepper st = make_stepper(m, p, plan, grid, tg.dt);
  const std::size_t n = grid.n_cells();
  std::vector<double> u = u0.data(), next(n), frozen, running(n, 0.0);
  if (split) frozen = split_initial_mollifier(grid, scheme.n_dyadic).convolve(u0).data();

  for (std::size_t step = 1; step <= tg.n_steps; ++step) {
    if (split) {
      for (std::size_t i = 0; i < n; ++i) running[i] += u[i];
      st.step(u, frozen, stream, next);
    } else {
      st.step(u, u, stream, next);
    }
    u.swap(next);
    const double t = step == tg.n_steps ? p.T : tg.time(step);
    check_step(u, step, t);
    if (split && step % per_window == 0) {
      // left-Riemann average of u over the window that just ended
      for (std::size_t i = 0; i < n; ++i) {
        frozen[i] = running[i] / static_cast<double>(per_window);
        running[i] = 0.0;
      }
    }
    if (step % tg.stride == 0) traj.push(t, GridField(grid, u));
  }
  return traj;
}

/// eps * sum_k w_k sum_i ((u_{i+1} - u_i)/dx)^2 dx with trapezoid weights in time.
inline double gradient_diagnostic(const Trajectory& traj, double eps) {
  const auto w = trapezoid_weights(traj.times());
  const double dx = traj.grid().dx();
  double total = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto& u = traj.frames()[k];
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double g = (u.at_wrapped(static_cast<std::ptrdiff_t>(i) + 1) - u[i]) / dx;
      s += g * g * dx;
    }
    total += w[k] * s;
  }
  return eps * total;
}

/// Runs `n` independent trajectories on substreams 0..n-1 of `master_seed`.
template <class Fn>
auto run_ensemble(std::size_t n, std::uint64_t master_seed, unsigned workers, Fn&& fn) {
  using R = decltype(fn(std::declval<RngStream&>(), std::size_t{0}));
  std::vector<R> out(n);
  parallel_for(n, workers, [&](std::size_t i) {
    RngStream s(master_seed, i);
    out[i] = fn(s, i);
  });
  return out;
}

}  // namespace sclaw::spde
