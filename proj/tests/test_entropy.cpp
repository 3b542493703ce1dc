#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sclaw/core/rng.hpp"
#include "sclaw/entropy/hfun.hpp"
#include "sclaw/entropy/production.hpp"
#include "sclaw/entropy/profile.hpp"
#include "sclaw/entropy/rho.hpp"
#include "sclaw/entropy/splittable.hpp"
#include "sclaw/hyperbolic/riemann.hpp"
#include "sclaw/hyperbolic/solvers.hpp"

using namespace sclaw;
using namespace sclaw::entropy;
using model::EntropyPair;
using model::EntropySampler;
using model::SpaceTimeFunction;

namespace {

constexpr double kPi = std::numbers::pi;

// C^1 ramp from 0 at a to 1 at b.
double smoothstep(double a, double b, double x) {
  const double s = std::clamp((x - a) / (b - a), 0.0, 1.0);
  return s * s * (3.0 - 2.0 * s);
}

// 1 on [lo, hi], 0 outside [lo - r, hi + r], smooth ramps of width r.
double plateau(double lo, double hi, double r, double x) {
  return smoothstep(lo - r, lo, x) * (1.0 - smoothstep(hi, hi + r, x));
}

SpaceTimeFunction product(std::function<double(double)> chi, std::function<double(double)> psi, double T) {
  return {[=](double t, double x) { return chi(t) * psi(x); }, {}, {}, T};
}

double time_integral(const std::function<double(double)>& chi, double T) {
  return numerics::composite_gauss(chi, 0.0, T, 64, 8);
}

// eta = a exp(b v) + c sin(d v) + e v^2: a random C^2 entropy.
EntropyPair random_entropy(RngStream& s, const model::ModelCoefficients& m) {
  const double a = 2 * s.uniform() - 1, b = 3 * s.uniform() - 1.5, c = 2 * s.uniform() - 1, d = 1 + 5 * s.uniform(),
               e = 2 * s.uniform() - 1;
  return EntropyPair([=](double v) { return a * std::exp(b * v) + c * std::sin(d * v) + e * v * v; },
                     [=](double v) { return a * b * std::exp(b * v) + c * d * std::cos(d * v) + 2 * e * v; },
                     [=](double v) { return a * b * b * std::exp(b * v) - c * d * d * std::sin(d * v) + 2 * e; }, m);
}

model::ModelCoefficients s_flux() {
  // f = 3/2 u^2 - u^3: convex below 1/2, concave above.
  return model::polynomial_model("s", {0.0, 0.0, 1.5, -1.0}, {1.0}, {0.0, 1.0, -1.0});
}

}  // namespace

TEST(WeakProduction, ConstantTrajectoryIsZero) {
  const auto m = model::tasep_model();
  const TorusGrid g(64);
  const auto traj = hyperbolic::solve_viscous(m, 0.1, GridField(g, 0.3), 0.5, 0.0, 10);
  const auto phi = product([](double t) { return std::cos(t) * (0.5 - t); }, [](double x) { return 2 + std::sin(2 * kPi * x); }, 0.5);
  EXPECT_NEAR(entropy_production_weak(traj, model::quadratic_entropy(m), phi).value, 0.0, 1e-14);
}

TEST(WeakProduction, KruzkovIsDissipative) {
  const auto m = model::tasep_model();
  const TorusGrid g(512);
  const double T = 0.4;
  const auto traj = hyperbolic::solve_kruzkov(m, hyperbolic::two_jump_data(g, 0.2, 0.8), T);
  const auto phi = product([=](double t) { return 1.0 - t / T; }, [](double x) { return 1.0 + 0.5 * std::cos(2 * kPi * x); }, T);
  const auto r = entropy_production_weak(traj, model::quadratic_entropy(m), phi);
  EXPECT_FALSE(r.coarse_stride);
  EXPECT_LE(r.value, 0.005);
  EXPECT_LT(r.value, 0.0);  // the entropic shock dissipates strictly
}

TEST(WeakProduction, AntiEntropicShockMatchesChordDefect) {
  const auto m = model::tasep_model();
  const auto prof = standing_shock_pair(1.0, 0.8, 0.2);
  const auto traj = prof.to_trajectory(TorusGrid(1024), 200);
  auto chi = [](double t) { return plateau(0.1, 0.9, 0.05, t); };
  const auto phi = product(chi, [](double x) { return plateau(0.4, 0.6, 0.1, x); }, 1.0);
  const double expected = 0.072 * time_integral(chi, 1.0);
  const double got = entropy_production_weak(traj, model::quadratic_entropy(m), phi).value;
  EXPECT_NEAR(got, expected, 0.03 * expected);
}

TEST(WeakProduction, CoarseStrideFlagged) {
  const auto m = model::tasep_model();
  const TorusGrid g(64);
  const auto traj = hyperbolic::solve_kruzkov(m, GridField(g, 0.5), 0.5, 0.0, 50);
  const auto phi = product([](double t) { return 0.5 - t; }, [](double) { return 1.0; }, 0.5);
  const auto r = entropy_production_weak(traj, model::quadratic_entropy(m), phi);
  EXPECT_TRUE(r.coarse_stride);
  EXPECT_FALSE(r.warning.empty());
}

TEST(SampledProduction, FactorizedSamplerEqualsWeakForm) {
  const auto m = model::tasep_model();
  const TorusGrid g(256);
  const auto u0 = GridField::sample(g, [](double x) { return 0.5 + 0.3 * std::sin(2 * kPi * x); });
  const auto traj = hyperbolic::solve_kruzkov(m, u0, 0.3, 0.0, 2);
  const auto phi = product([](double t) { return (0.3 - t) * (1 + t); }, [](double x) { return std::exp(std::sin(2 * kPi * x)); }, 0.3);
  for (const auto& pair : {model::quadratic_entropy(m), model::kruzkov_entropy(0.4, m)}) {
    const double weak = entropy_production_weak(traj, pair, phi).value;
    const double sampled = sampled_production(traj, model::factorized_sampler(pair, phi, m)).value;
    EXPECT_NEAR(sampled, weak, 1e-8);
  }
}

TEST(SampledProduction, VelocityIndependentSamplerIsZero) {
  const auto m = model::burgers_model();
  const TorusGrid g(128);
  const auto u0 = GridField::sample(g, [](double x) { return 0.5 + 0.4 * std::sin(2 * kPi * x); });
  const auto traj = hyperbolic::solve_kruzkov(m, u0, 0.5);
  auto th = [](double, double t, double x) { return (0.5 - t) * (0.5 - t) * std::cos(2 * kPi * x + t); };
  EntropySampler s(th, [](double, double, double) { return 0.0; }, [](double, double, double) { return 0.0; }, 0.5, m);
  EXPECT_NEAR(sampled_production(traj, s).value, 0.0, 1e-10);
}

TEST(SampledProduction, SpaceModulatedSamplerLocalizesAtShock) {
  const auto m = model::tasep_model();
  const auto prof = standing_shock_pair(1.0, 0.8, 0.2);
  const auto traj = prof.to_trajectory(TorusGrid(1024), 100);
  auto chi = [](double t) { return plateau(0.15, 0.85, 0.1, t); };
  // psi vanishes at the entropic partner jump at x = 0.
  auto psi = [](double x) { return 0.7 * std::pow(std::sin(kPi * x), 2); };
  EntropySampler s([=](double v, double t, double x) { return v * v * chi(t) * psi(x); },
                   [=](double v, double t, double x) { return 2 * v * chi(t) * psi(x); },
                   [=](double, double t, double x) { return 2 * chi(t) * psi(x); }, 1.0, m);
  const double expected = 0.072 * time_integral(chi, 1.0) * psi(0.5);
  EXPECT_NEAR(sampled_production(traj, s).value, expected, 0.03 * expected);
}

TEST(Rho, SignConventionMatchesJumpOracle) {
  const auto tasep = model::tasep_model();
  const auto burgers = model::burgers_model();
  const auto s = s_flux();
  struct Case {
    model::ModelCoefficients m;
    PiecewiseSmoothProfile p;
  };
  // Tasep standing shock with time-dependent states u-(t) = 0.2 + 0.1 t, u+ = 1 - u-.
  Shock moving_states{[](double) { return 0.5; }, [](double) { return 0.0; },
                      [](double t) { return 0.2 + 0.1 * t; }, [](double t) { return 0.8 - 0.1 * t; }, 0.0, 1.0};
  const double sig_s = (s.f(0.9) - s.f(0.1)) / 0.8;
  const std::vector<Case> cases = {
      {tasep, standing_shock_pair(1.0, 0.8, 0.2)},
      {tasep, standing_shock_pair(1.0, 0.3, 0.7, 0.25)},
      {tasep, PiecewiseSmoothProfile(1.0, {}, {moving_states})},
      {burgers, piecewise_constant_profile(1.0, {model::Polynomial({0.0, 0.5}), model::Polynomial({0.5, 0.5})},
                                           {0.8, 0.2})},
      {s, PiecewiseSmoothProfile(1.0, {}, {polynomial_shock(model::Polynomial({0.3, sig_s}), 0.1, 0.9, 0.0, 0.5)})},
  };
  const auto phi = product([](double t) { return 1.0 + t * t; }, [](double x) { return 2.0 + std::sin(2 * kPi * x); }, 1.0);
  RngStream rng(2024, 0);
  for (const auto& c : cases) {
    const auto rho = rho_of_profile(c.p, c.m);
    for (int k = 0; k < 20; ++k) {
      const auto eta = random_entropy(rng, c.m);
      EXPECT_NEAR(rho.production(eta, phi), jump_production(c.p, eta, phi), 1e-8) << c.m.name() << " entropy " << k;
    }
  }
}

TEST(Rho, ShockDensityExamples) {
  const auto m = model::tasep_model();
  const auto ent = rho_of_profile(standing_shock_pair(1.0, 0.2, 0.8), m);
  const auto anti = rho_of_profile(standing_shock_pair(1.0, 0.8, 0.2), m);
  // Shock 1 of each pair sits at x = 0.5.
  for (int k = 0; k <= 20; ++k) {
    const double v = 0.2 + 0.6 * k / 20.0;
    EXPECT_NEAR(ent.shocks[1](v, 0.3), -(v * (1 - v) - 0.16), 1e-15);
    EXPECT_NEAR(anti.shocks[1](v, 0.3), v * (1 - v) - 0.16, 1e-15);
    EXPECT_LE(ent.shocks[1](v, 0.3), 1e-15);
  }
  EXPECT_EQ(ent.shocks[1](0.1, 0.3), 0.0);
}

TEST(Rho, SmoothProfileHasZeroMeasure) {
  const auto m = model::tasep_model();
  PiecewiseSmoothProfile smooth(1.0, [](double t, double x) { return 0.5 + 0.1 * std::sin(2 * kPi * (x - t)); }, {});
  const auto rho = rho_of_profile(smooth, m);
  EXPECT_TRUE(rho.shocks.empty());
  EXPECT_TRUE(rho.smooth_part_zero);
  const auto phi = product([](double t) { return 1 - t; }, [](double) { return 1.0; }, 1.0);
  EXPECT_EQ(rho.production(model::quadratic_entropy(m), phi), 0.0);
}

TEST(Rho, RankineHugoniotViolationRejected) {
  const auto m = model::tasep_model();
  const auto bad = piecewise_constant_profile(1.0, {model::Polynomial({0.0}), model::Polynomial({0.5})}, {0.2, 0.6});
  EXPECT_THROW(rho_of_profile(bad, m), PreconditionError);
  EXPECT_THROW(h_functional(bad, m), PreconditionError);
}

TEST(Rho, LinearEntropiesProduceNothing) {
  const auto m = model::burgers_model();
  const auto p = piecewise_constant_profile(1.0, {model::Polynomial({0.0, 0.5}), model::Polynomial({0.5, 0.5})}, {0.8, 0.2});
  const auto phi = product([](double t) { return std::exp(-t); }, [](double x) { return 1 + std::cos(2 * kPi * x); }, 1.0);
  const auto lin = model::linear_entropy(1.7, -0.3, m);
  EXPECT_EQ(rho_of_profile(p, m).production(lin, phi), 0.0);
  EXPECT_NEAR(jump_production(p, lin, phi), 0.0, 1e-14);
}

TEST(Rho, RasterizedProductionConvergesFirstOrder) {
  // Moving Burgers shocks: cell averages smear each jump over one cell, with an error
  // constant that depends on the sub-cell phase; averaging over shock offsets removes it.
  const auto m = model::burgers_model();
  const auto phi = product([](double t) { return 0.5 - t; }, [](double x) { return 1.5 + std::sin(2 * kPi * x + 0.3); }, 0.5);
  const auto eta = model::quadratic_entropy(m);
  auto err = [&](std::size_t n) {
    double s = 0.0;
    for (int k = 0; k < 8; ++k) {
      const double x0 = 0.03 + 0.0613 * k;
      const auto p = piecewise_constant_profile(
          0.5, {model::Polynomial({x0, 0.5}), model::Polynomial({x0 + 0.5, 0.5})}, {0.8, 0.2});
      const double exact = rho_of_profile(p, m).production(eta, phi);
      s += std::abs(entropy_production_weak(p.to_trajectory(TorusGrid(n), n), eta, phi).value - exact);
    }
    return s / 8;
  };
  const double e1 = err(128), e2 = err(256), e3 = err(512);
  for (double ratio : {e2 / e1, e3 / e2}) {
    EXPECT_GE(ratio, 0.35);
    EXPECT_LE(ratio, 0.65);
  }
}

TEST(HFunctional, AntiEntropicClosedForm) {
  const auto m = model::tasep_model();
  const auto r = h_functional(standing_shock_pair(1.0, 0.8, 0.2), m);
  const double closed = 0.6 - 0.32 * std::log(4.0);
  ASSERT_TRUE(r.finite);
  EXPECT_NEAR(r.value, closed, 1e-6);
  EXPECT_NEAR(r.value, 0.156386, 1e-6);
  ASSERT_EQ(r.per_shock.size(), 2u);
  EXPECT_EQ(r.per_shock[0], 0.0);  // the entropic partner at x = 0
}

TEST(HFunctional, EntropicMirrorIsZero) {
  const auto m = model::tasep_model();
  const auto prof = profile_from_riemann(hyperbolic::two_jump_solution(m, 0.2, 0.8), 0.4);
  ASSERT_EQ(prof.shocks().size(), 1u);
  const auto r = h_functional(prof, m);
  EXPECT_LE(std::abs(r.value), 1e-12);
}

TEST(HFunctional, EinsteinRatioOne) {
  // D = a^2: H reduces to the mass of rho+, int_0.2^0.8 (v(1-v) - 0.16) dv = 0.036, i.e. half
  // the eta = v^2 production 0.072 (which carries the weight eta'' = 2).
  const auto m = model::polynomial_model("einstein", {0.0, 1.0, -1.0}, {0.0, 1.0, -1.0}, {0.0, 1.0, -1.0});
  const double mass = (0.8 * 0.8 / 2 - 0.8 * 0.8 * 0.8 / 3 - 0.16 * 0.8) - (0.2 * 0.2 / 2 - 0.2 * 0.2 * 0.2 / 3 - 0.16 * 0.2);
  EXPECT_NEAR(mass, 0.036, 1e-15);
  EXPECT_NEAR(h_functional(standing_shock_pair(1.0, 0.8, 0.2), m).value, mass, 1e-9);
}

TEST(HFunctional, DegenerateNoiseGivesInfiniteSentinel) {
  const auto m = model::polynomial_model("deg", {0.0, 1.0, -1.0}, {1.0}, {0.25, -1.0, 1.0});  // a^2 = (v - 1/2)^2
  const auto r = h_functional(standing_shock_pair(1.0, 0.8, 0.2), m);
  EXPECT_FALSE(r.finite);
  EXPECT_TRUE(std::isinf(r.value));
  EXPECT_FALSE(r.diagnostic.empty());
}

TEST(HFunctional, NonNegativeOnRandomShocks) {
  const auto m = s_flux();
  RngStream rng(5, 5);
  for (int k = 0; k < 20; ++k) {
    const double a = rng.uniform(), b = rng.uniform();
    if (std::abs(a - b) < 1e-3) continue;
    const double sig = (m.f(b) - m.f(a)) / (b - a);
    PiecewiseSmoothProfile p(1.0, {}, {polynomial_shock(model::Polynomial({0.5, sig}), a, b, 0.0, 1.0)});
    const auto r = h_functional(p, m);
    EXPECT_GE(r.value, 0.0);
    const auto fan = hyperbolic::riemann_exact(m, {a, b, 0.0});
    if (fan.waves().size() == 1 && fan.waves()[0].kind == hyperbolic::WaveKind::Shock) {
      EXPECT_LE(r.value, 1e-12);
    }
  }
}

TEST(Splittable, KruzkovProfile) {
  const auto m = model::tasep_model();
  const auto rep = classify_splittable(profile_from_riemann(hyperbolic::two_jump_solution(m, 0.2, 0.8), 0.4), m);
  EXPECT_TRUE(rep.splittable());
  EXPECT_TRUE(rep.e_plus.empty());
  EXPECT_NEAR(rep.delta, 0.2, 1e-12);
}

TEST(Splittable, DisjointTimeSupports) {
  const auto m = model::tasep_model();
  auto value = [](double, double) { return 0.5; };
  const PiecewiseSmoothProfile p(1.0, value,
                                 {polynomial_shock(model::Polynomial({0.5}), 0.8, 0.2, 0.0, 0.4),
                                  polynomial_shock(model::Polynomial({0.5}), 0.2, 0.8, 0.6, 1.0)});
  const auto rep = classify_splittable(p, m);
  EXPECT_TRUE(rep.splittable()) << rep.to_text();
  EXPECT_EQ(rep.per_shock[0], ShockSign::Positive);
  EXPECT_EQ(rep.per_shock[1], ShockSign::Negative);
  EXPECT_NEAR(rep.delta, 0.2, 1e-12);

  const PiecewiseSmoothProfile overlap(1.0, value,
                                       {polynomial_shock(model::Polynomial({0.5}), 0.8, 0.2, 0.0, 0.7),
                                        polynomial_shock(model::Polynomial({0.5}), 0.2, 0.8, 0.3, 1.0)});
  EXPECT_FALSE(classify_splittable(overlap, m).cond_disjoint);
}

TEST(Splittable, TouchingZeroFailsBound) {
  const auto m = model::tasep_model();
  const auto rep = classify_splittable(standing_shock_pair(1.0, 0.0, 1.0), m);
  EXPECT_FALSE(rep.cond_bounded);
  EXPECT_FALSE(rep.splittable());
}

TEST(Splittable, MixedSignShock) {
  const auto m = s_flux();
  const double sig = (m.f(0.9) - m.f(0.1)) / 0.8;
  const PiecewiseSmoothProfile p(1.0, [](double, double) { return 0.5; },
                                 {polynomial_shock(model::Polynomial({0.2, sig}), 0.1, 0.9, 0.0, 1.0)});
  const auto rep = classify_splittable(p, m);
  EXPECT_EQ(rep.per_shock[0], ShockSign::Mixed);
  EXPECT_FALSE(rep.splittable());
  EXPECT_NE(rep.to_text().find("mixed"), std::string::npos);
}
