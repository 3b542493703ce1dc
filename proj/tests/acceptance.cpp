// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Each criterion also has a wall-clock budget measured on a single core.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "sclaw/entropy/hfun.hpp"
#include "sclaw/entropy/production.hpp"
#include "sclaw/entropy/profile.hpp"
#include "sclaw/hyperbolic/riemann.hpp"
#include "sclaw/hyperbolic/solvers.hpp"
#include "sclaw/rareevent/bernstein.hpp"
#include "sclaw/rareevent/tilt.hpp"
#include "sclaw/ratefun/ifun.hpp"
#include "sclaw/ratefun/rfun.hpp"
#include "sclaw/ratefun/young.hpp"
#include "sclaw/spde/simulate.hpp"
#include "support/paths.hpp"
#include "support/rfun_oracle.hpp"

using namespace sclaw;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

spde::NoisePlan triangle(const TorusGrid& g, double width) {
  return spde::NoisePlan{model::make_kernel(model::KernelShape::Triangle, width, g)};
}

double smoothstep(double a, double b, double x) {
  const double s = std::clamp((x - a) / (b - a), 0.0, 1.0);
  return s * s * (3.0 - 2.0 * s);
}

double plateau(double lo, double hi, double r, double x) {
  return smoothstep(lo - r, lo, x) * (1.0 - smoothstep(hi, hi + r, x));
}

double pairing(const std::vector<double>& u, const TorusGrid& g, const std::function<double(double)>& phi) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * phi(g.center(i));
  return s * g.dx();
}

struct Moments {
  double mean = 0, var = 0, se_mean = 0, se_var = 0;
};

Moments moments(const std::vector<double>& y) {
  const double n = static_cast<double>(y.size());
  Moments m;
  for (double v : y) m.mean += v;
  m.mean /= n;
  double m2 = 0, m4 = 0;
  for (double v : y) {
    const double d = v - m.mean;
    m2 += d * d, m4 += d * d * d * d;
  }
  m2 /= n, m4 /= n;
  m.var = m2 * n / (n - 1);
  m.se_mean = std::sqrt(m.var / n);
  m.se_var = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
  return m;
}

// ---------------------------------------------------------------------------------------

Outcome conservation() {
  const TorusGrid g(256);
  const auto m = model::tasep_model();
  const auto plan = triangle(g, 0.1);
  spde::SpdeParams p;
  p.eps = 0.1;
  p.gamma = 1.5;
  const std::size_t stride = 1600, steps = 63 * stride;  // 100800, a multiple of 2^6 windows
  p.store_stride = stride;
  p.T = static_cast<double>(steps) * spde::stability_dt(m, p, plan, g) * (1.0 - 1e-9);
  const auto u0 = GridField::sample(g, [](double x) { return 0.5 + 0.3 * std::sin(kTwoPi * x); });
  const double mass0 = u0.integral();
  double worst = 0.0;
  std::size_t stepped = 0;
  for (const auto scheme : {spde::Scheme::em(), spde::Scheme::split(6)}) {
    RngStream s(101, 0);
    const auto traj = spde::simulate(m, p, plan, u0, s, scheme);
    stepped = static_cast<std::size_t>(std::llround(p.T / traj.meta().dt));
    for (const auto& f : traj.frames()) worst = std::max(worst, std::abs(f.integral() - mass0) / mass0);
  }
  return {worst <= 1e-9 && stepped >= 100000,
          std::to_string(stepped) + " steps per scheme, max relative mass drift " + fmt(worst)};
}

Outcome range_preservation() {
  const TorusGrid g(256);
  const auto m = model::tasep_model();
  const auto plan = triangle(g, 0.5);
  spde::SpdeParams p;
  p.eps = 0.05;
  p.gamma = 1.5;
  p.T = 1.0;
  const auto u0 = GridField::sample(g, [](double x) { return 0.5 + 0.4 * std::sin(kTwoPi * x); });
  const std::size_t n = 200;
  const auto tg = spde::resolve_time_grid(m, p, plan, g);
  const auto inside = spde::run_ensemble(n, 202, default_workers(), [&](RngStream& s, std::size_t) {
    spde::Stepper st = spde::make_stepper(m, p, plan, g, tg.dt);
    std::vector<double> u = u0.data(), next(u.size());
    bool ok = true;
    for (std::size_t k = 0; k < tg.n_steps; ++k) {
      st.step(u, u, s, next);
      u.swap(next);
      const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
      ok = ok && *lo >= -0.01 && *hi <= 1.01;
    }
    return ok ? 1 : 0;
  });
  std::size_t good = 0;
  for (int v : inside) good += static_cast<std::size_t>(v);
  const double frac = static_cast<double>(good) / static_cast<double>(n);
  return {frac >= 0.99, std::to_string(good) + "/" + std::to_string(n) + " paths stay in [-0.01, 1.01] over " +
                            std::to_string(tg.n_steps) + " steps"};
}

Outcome kruzkov_convergence() {
  const auto m = model::tasep_model();
  const auto exact = hyperbolic::two_jump_solution(m, 0.2, 0.8);
  const double T = 0.4;
  std::vector<double> dist;
  std::string detail;
  for (double eps : {0.2, 0.1, 0.05}) {
    const TorusGrid g(static_cast<std::size_t>(std::lround(4.0 / eps)));
    const auto plan = triangle(g, eps);
    spde::SpdeParams p;
    p.eps = eps;
    p.gamma = 1.5;
    p.T = T;
    const auto tg0 = spde::resolve_time_grid(m, p, plan, g);
    p.store_stride = std::max<std::size_t>(1, tg0.n_steps / 80);
    const auto u0 = exact.cell_averages(g, 0.0);
    const auto d = spde::run_ensemble(100, 303, default_workers(), [&](RngStream& s, std::size_t) {
      const auto traj = spde::simulate(m, p, plan, u0, s);
      return spacetime_l1_distance(traj, exact.exact_trajectory(g, traj.times()));
    });
    double mean = 0;
    for (double v : d) mean += v;
    mean /= static_cast<double>(d.size());
    dist.push_back(mean);
    detail += "eps " + fmt(eps) + ": " + fmt(mean) + "  ";
  }
  const bool ok = dist[0] > dist[1] && dist[1] > dist[2] && dist[2] <= 0.05;
  return {ok, "mean space-time L1 " + detail};
}

Outcome entropy_production() {
  const auto m = model::tasep_model();
  const auto prof = entropy::standing_shock_pair(1.0, 0.8, 0.2);
  const auto traj = prof.to_trajectory(TorusGrid(1024), 200);
  auto chi = [](double t) { return plateau(0.1, 0.9, 0.05, t); };
  const model::SpaceTimeFunction phi{[=](double t, double x) { return chi(t) * plateau(0.4, 0.6, 0.1, x); }, {}, {}, 1.0};
  // plateau length in time: exactly 0.8 + 2 * 0.05 / 2 for symmetric smoothstep ramps
  const double length = 0.85;
  const double expected = 0.072 * length;
  const double got = entropy::entropy_production_weak(traj, model::quadratic_entropy(m), phi).value;
  const double rel = std::abs(got - expected) / expected;
  return {rel <= 0.03, "weak " + fmt(got, 8) + " vs chord defect " + fmt(expected, 8) + " (rel " + fmt(rel) + ")"};
}

// Closed-form integrand of the anti-entropic tasep shock: the density of the positive part
// of r divided by a^2, integrated in v over [0.2, 0.8] by Gauss-Legendre.
double h_integral_oracle() {
  // r(v) = v(1-v) - 0.16 on the chord, D / a^2 = 1 / (v(1-v)).
  auto integrand = [](double v) { return (v * (1 - v) - 0.16) / (v * (1 - v)); };
  static const double x[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640};
  static const double w[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                              0.2369268850561891};
  const int panels = 2000;
  double s = 0;
  for (int k = 0; k < panels; ++k) {
    const double a = 0.2 + 0.6 * k / panels, b = 0.2 + 0.6 * (k + 1) / panels;
    for (int q = 0; q < 5; ++q) s += 0.5 * (b - a) * w[q] * integrand(0.5 * (a + b) + 0.5 * (b - a) * x[q]);
  }
  return s;  // times T = 1
}

Outcome h_closed_form() {
  const auto m = model::tasep_model();
  const double h = entropy::h_functional(entropy::standing_shock_pair(1.0, 0.8, 0.2), m).value;
  const double closed = 0.6 - 0.32 * std::log(4.0), oracle = h_integral_oracle();
  const double mirror =
      entropy::h_functional(entropy::profile_from_riemann(hyperbolic::two_jump_solution(m, 0.2, 0.8), 0.4), m).value;
  const bool ok = std::abs(h - closed) <= 1e-6 && std::abs(h - oracle) <= 1e-6 && std::abs(mirror) <= 1e-12;
  return {ok, "H = " + fmt(h, 10) + ", closed form " + fmt(closed, 10) + ", quadrature " + fmt(oracle, 10) +
                  ", mirror " + fmt(mirror)};
}

Outcome r_oracle() {
  RngStream s(606, 0);
  double worst = 0;
  int cases = 0;
  for (const char* name : {"tasep", "burgers", "linear"}) {
    const auto m = model::preset_model(name);
    const int count = name[0] == 'l' ? 34 : 33;
    for (int k = 0; k < count; ++k, ++cases) {
      const double w = s.uniform();
      const double c = m.f_min() - 0.1 + (m.f_max() - m.f_min() + 0.2) * s.uniform();
      const double r = ratefun::r_fun(m, w, c).value;
      const double o = oracle::SimplexR(m, w).minimize(c, 10);
      const double d = (std::isinf(r) && std::isinf(o)) ? 0.0 : std::abs(r - o);
      worst = std::max(worst, d);
    }
  }
  const double conv = ratefun::r_fun(model::tasep_model(), 0.5, 0.0).value;
  return {worst <= 1e-3 && conv == 0.0,
          std::to_string(cases) + " cases, max |solver - brute force| " + fmt(worst) + ", R(0.5, 0) = " + fmt(conv)};
}

Outcome young_zero_sets() {
  const auto m = model::tasep_model();
  const TorusGrid g(64);
  std::vector<double> times;
  for (int k = 0; k <= 20; ++k) times.push_back(k / 64.0);
  const auto mu = ratefun::YoungMeasureField::constant(g, times, ratefun::DiscreteMeasure({{0.0, 0.5}, {1.0, 0.5}}), m);
  const double constant = ratefun::young_i(mu, GridField(g, 0.5)).value;

  const TorusGrid g512(512);
  const auto u = hyperbolic::solve_kruzkov(m, hyperbolic::two_jump_data(g512, 0.2, 0.8), 0.4);
  const auto kz = ratefun::young_i(ratefun::YoungMeasureField::dirac(u, m), u.front());

  // Duality on a path that is not a solution: reversed Burgers entropy solution.
  const auto b = model::burgers_model();
  const auto rev =
      paths::reversed(hyperbolic::solve_kruzkov(b, hyperbolic::two_jump_data(TorusGrid(128), 0.2, 0.8), 0.4));
  const auto sd = ratefun::slice_data(rev, b);
  const auto ell = ratefun::elliptic_functional(sd, rev.front());
  RngStream s(707, 0);
  double excess = -INFINITY;
  for (int k = 0; k < 50; ++k) {
    double c[4][3];
    for (auto& row : c)
      for (double& x : row) x = 2 * s.uniform() - 1;
    const double scale = std::pow(10.0, -2.0 + 2.0 * s.uniform());
    std::vector<GridField> phi;
    for (double t : rev.times())
      phi.push_back(GridField::sample(rev.grid(), [&](double x) {
        double v = 0;
        for (int j = 0; j < 4; ++j) v += c[j][0] * std::sin(kTwoPi * (j + 1) * x + c[j][1]) * std::cos((j + 1) * t + c[j][2]);
        return scale * v;
      }));
    excess = std::max(excess, ratefun::young_objective(sd, rev.front(), phi) - ell.value);
  }
  const bool ok = std::abs(constant) <= 1e-10 && kz.finite && kz.value <= 0.01 && ell.finite && excess <= 1e-6;
  return {ok, "constant measure " + fmt(constant) + ", Kruzkov Dirac " + fmt(kz.value) + ", max objective excess " +
                  fmt(excess) + " over 50 test functions"};
}

Outcome tilt_consistency() {
  const auto m = model::tasep_model();
  std::vector<double> dist;
  std::string detail;
  bool costs = true;
  for (double eps : {0.2, 0.1, 0.05}) {
    const TorusGrid g(static_cast<std::size_t>(std::lround(8.0 / eps)));
    const auto plan = triangle(g, eps);
    spde::SpdeParams p;
    p.eps = eps;
    p.gamma = 1.5;
    p.T = 0.1;
    const auto target = paths::sampled(g, p.T, 64, paths::travelling_sine(5.0, 0.45));
    const auto ctl = ratefun::control_from_target(target, m);
    const auto r = spde::run_ensemble(200, 808, default_workers(), [&](RngStream& s, std::size_t) {
      const auto run = rareevent::simulate_tilted(m, p, plan, ctl, target.front(), s);
      return std::pair<double, double>{rareevent::sup_l1_to(run.trajectory, target), run.log_rn_weight};
    });
    double d = 0, lw = 0;
    for (const auto& [a, b] : r) d += a, lw += b;
    d /= 200.0, lw /= 200.0;
    const double estimate = std::pow(eps, 2 * p.gamma) * (-lw);
    const double ratio = estimate / ctl.cost;
    costs = costs && std::abs(ratio - 1.0) <= 0.1;
    dist.push_back(d);
    detail += "eps " + fmt(eps) + ": dist " + fmt(d) + " cost ratio " + fmt(ratio) + "  ";
  }
  return {costs && dist[0] > dist[1] && dist[1] > dist[2], detail};
}

Outcome bernstein() {
  const auto paths = rareevent::brownian_summaries(100000, 1000, 1.0, 909, default_workers());
  const std::vector<std::pair<std::string, rareevent::ScalarFn>> shapes{
      {"F=1", [](double) { return 1.0; }}, {"F=0.5+x", [](double x) { return 0.5 + x; }}};
  bool ok = true;
  double min_margin = INFINITY;
  for (const auto& [name, F] : shapes)
    for (double z : {0.5, 1.0, 2.0}) {
      rareevent::check_bernstein_admissible(F, z);  // throws when F is not admissible
      const auto r = rareevent::bernstein_check(paths, F, z);
      ok = ok && r.holds();
      min_margin = std::min(min_margin, r.margin);
    }
  return {ok, "6 cases over 1e5 paths, smallest margin (bound + 3 se - frequency) " + fmt(min_margin)};
}

Outcome scheme_cross_validation() {
  const TorusGrid g(128);
  const auto m = model::tasep_model();
  const auto plan = triangle(g, 0.5);
  spde::SpdeParams p;
  p.eps = 0.1;
  p.gamma = 1.5;
  p.T = 0.25;
  p.store_stride = spde::resolve_time_grid(m, p, plan, g, 64).n_steps;
  const auto u0 = GridField::sample(g, [](double x) { return 0.5 + 0.3 * std::sin(kTwoPi * x); });
  const std::vector<std::function<double(double)>> obs{
      [](double x) { return std::sin(kTwoPi * x); }, [](double x) { return std::cos(kTwoPi * x); },
      [](double x) { return std::sin(2 * kTwoPi * x); }, [](double x) { return std::cos(2 * kTwoPi * x); },
      [](double x) { return plateau(0.3, 0.7, 0.1, x); }};
  const std::size_t n = 500;
  std::vector<std::vector<std::vector<double>>> ys;
  std::uint64_t seed = 1001;
  for (const auto scheme : {spde::Scheme::em(), spde::Scheme::split(6)}) {
    const auto finals = spde::run_ensemble(n, seed++, default_workers(), [&](RngStream& s, std::size_t) {
      return spde::simulate(m, p, plan, u0, s, scheme).back().data();
    });
    std::vector<std::vector<double>> y(obs.size(), std::vector<double>(n));
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t o = 0; o < obs.size(); ++o) y[o][k] = pairing(finals[k], g, obs[o]);
    ys.push_back(std::move(y));
  }
  double worst = 0;
  for (std::size_t o = 0; o < obs.size(); ++o) {
    const auto a = moments(ys[0][o]), b = moments(ys[1][o]);
    const double zm = std::abs(a.mean - b.mean) / std::hypot(a.se_mean, b.se_mean);
    const double zv = std::abs(a.var - b.var) / std::hypot(a.se_var, b.se_var);
    if (std::getenv("SCLAW_ACCEPTANCE_VERBOSE"))
      std::cerr << "  observable " << o << ": mean " << a.mean << " / " << b.mean << " (" << zm << " se), var " << a.var
                << " / " << b.var << " (" << zv << " se)\n";
    worst = std::max({worst, zm, zv});
  }
  return {worst <= 3.0, "5 observables, worst |em - split(6)| in standard errors " + fmt(worst)};
}

}  // namespace

int main(int argc, char** argv) {
  // Optional arguments select criteria by number; default is all of them.
  std::vector<int> only;
  for (int k = 1; k < argc; ++k) only.push_back(std::atoi(argv[k]));
  struct Criterion {
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all{
      {"1 mass conservation", 30, conservation},
      {"2 range preservation", 180, range_preservation},
      {"3 convergence to the Kruzkov solution", 300, kruzkov_convergence},
      {"4 entropy production vs jump formula", 10, entropy_production},
      {"5 H functional closed form", 1, h_closed_form},
      {"6 R solver vs brute force", 120, r_oracle},
      {"7 Young functional zero sets and duality", 60, young_zero_sets},
      {"8 tilted simulation consistency", 600, tilt_consistency},
      {"9 Bernstein bound", 60, bernstein},
      {"10 em vs split cross-validation", 300, scheme_cross_validation},
  };
  int failed = 0;
  for (std::size_t idx = 0; idx < all.size(); ++idx) {
    const auto& c = all[idx];
    if (!only.empty() && std::find(only.begin(), only.end(), static_cast<int>(idx + 1)) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::cout << (pass ? "PASS " : "FAIL ") << c.name << " [" << fmt(secs, 3) << " s / " << c.budget_s << " s"
              << (in_time ? "" : ", over budget") << "] " << o.detail << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << std::endl;
  return failed ? 1 : 0;
}
