#include <gtest/gtest.h>

#include <cmath>

#include "sclaw/hyperbolic/flux.hpp"
#include "sclaw/hyperbolic/riemann.hpp"
#include "sclaw/hyperbolic/solvers.hpp"

using namespace sclaw;
using namespace sclaw::hyperbolic;

namespace {

// L1 distance to the sharp standing shock 0.2 | 0.8 at x = 0.5, over [0.25, 0.75].
double shock_window_l1(const GridField& u) {
  const auto& g = u.grid();
  double s = 0.0;
  for (std::size_t i = 0; i < g.n_cells(); ++i) {
    const double x = g.center(i);
    if (x < 0.25 || x > 0.75) continue;
    s += std::abs(u[i] - (x < 0.5 ? 0.2 : 0.8)) * g.dx();
  }
  return s;
}

double viscous_shock_error(double eps) {
  const auto m = model::tasep_model();
  const TorusGrid g(static_cast<std::size_t>(std::lround(8.0 / eps)));  // dx = eps / 8
  const auto traj = solve_viscous(m, eps, two_jump_data(g, 0.2, 0.8), 0.4, 0.0, 100);
  return shock_window_l1(traj.back());
}

// Position where the profile first crosses `level` between cell centres in [lo, hi].
double crossing(const GridField& u, double level, double lo, double hi) {
  const auto& g = u.grid();
  for (std::size_t i = 0; i + 1 < g.n_cells(); ++i) {
    const double x = g.center(i);
    if (x < lo || x > hi) continue;
    if ((u[i] - level) * (u[i + 1] - level) <= 0.0 && u[i] != u[i + 1])
      return x + g.dx() * (level - u[i]) / (u[i + 1] - u[i]);
  }
  return std::nan("");
}

}  // namespace

TEST(Riemann, EqualStatesGiveEmptyFan) {
  const auto fan = riemann_exact(model::tasep_model(), {0.3, 0.3, 0.5});
  EXPECT_TRUE(fan.empty());
  EXPECT_EQ(fan(0.7, 0.1), 0.3);
}

TEST(Riemann, ConcaveFluxUpJumpIsStandingShock) {
  const auto m = model::tasep_model();
  const auto fan = riemann_exact(m, {0.2, 0.8, 0.0});
  ASSERT_EQ(fan.waves().size(), 1u);
  const auto& w = fan.waves()[0];
  EXPECT_EQ(w.kind, WaveKind::Shock);
  EXPECT_NEAR(w.speed_lo, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(w.u_minus, 0.2);
  EXPECT_DOUBLE_EQ(w.u_plus, 0.8);
  EXPECT_TRUE(oleinik_ok(m, w));
  EXPECT_LE(rankine_hugoniot_defect(m, fan), 1e-12);
}

TEST(Riemann, ConcaveFluxDownJumpIsRarefaction) {
  const auto m = model::tasep_model();
  const auto fan = riemann_exact(m, {0.8, 0.2, 0.0});
  ASSERT_EQ(fan.waves().size(), 1u);
  const auto& w = fan.waves()[0];
  EXPECT_EQ(w.kind, WaveKind::Rarefaction);
  EXPECT_NEAR(w.speed_lo, -0.6, 1e-12);
  EXPECT_NEAR(w.speed_hi, 0.6, 1e-12);
  for (double xi : {-0.6, -0.3, 0.0, 0.25, 0.6}) EXPECT_NEAR(fan.at_xi(xi), (1.0 - xi) / 2.0, 1e-12);
  EXPECT_DOUBLE_EQ(fan.at_xi(-0.7), 0.8);
  EXPECT_DOUBLE_EQ(fan.at_xi(0.7), 0.2);
}

TEST(Riemann, NonConvexFluxGivesCompositeWave) {
  // f = u^3: convex on (0,1); a down jump 0.9 -> 0.1 needs the upper concave envelope,
  // which is a single chord, i.e. a shock with sigma = (f(0.1)-f(0.9))/(0.1-0.9).
  const auto m = model::polynomial_model("cubic", {0.0, 0.0, 0.0, 1.0}, {1.0}, {0.0, 1.0, -1.0});
  const auto fan = riemann_exact(m, {0.9, 0.1, 0.0});
  ASSERT_EQ(fan.waves().size(), 1u);
  EXPECT_EQ(fan.waves()[0].kind, WaveKind::Shock);
  EXPECT_NEAR(fan.waves()[0].speed_lo, (0.001 - 0.729) / (0.1 - 0.9), 1e-12);

  // f = u^2 (3/2 - u) has an inflection at 1/2; 0.1 -> 0.9 gives a rarefaction then a shock.
  const auto s = model::polynomial_model("s", {0.0, 0.0, 1.5, -1.0}, {1.0}, {0.0, 1.0, -1.0});
  const auto comp = riemann_exact(s, {0.1, 0.9, 0.0});
  ASSERT_EQ(comp.waves().size(), 2u);
  EXPECT_EQ(comp.waves()[0].kind, WaveKind::Rarefaction);
  EXPECT_EQ(comp.waves()[1].kind, WaveKind::Shock);
  // Tangency: the shock speed equals f' at the left state of the shock.
  EXPECT_NEAR(comp.waves()[1].speed_lo, s.df(comp.waves()[1].u_minus), 1e-3);
  double prev = -1e300;
  for (const auto& w : comp.waves()) {
    EXPECT_GE(w.speed_lo, prev - 1e-9);
    prev = w.speed_hi;
    EXPECT_TRUE(oleinik_ok(s, w, 1e-9));
  }
  EXPECT_LE(rankine_hugoniot_defect(s, comp), 1e-12);
  const auto text = comp.to_text();
  EXPECT_NE(text.find("riemann"), std::string::npos);
}

TEST(Riemann, RejectsOutOfRangeStates) {
  EXPECT_THROW(riemann_exact(model::tasep_model(), {-0.1, 0.5, 0.0}), PreconditionError);
}

TEST(Viscous, ConstantDataStaysConstant) {
  const TorusGrid g(64);
  const auto traj = solve_viscous(model::tasep_model(), 0.1, GridField(g, 0.37), 0.2);
  for (const auto& f : traj.frames())
    for (double v : f.values()) EXPECT_DOUBLE_EQ(v, 0.37);
}

TEST(Viscous, ShockLayerWithinFourEps) {
  EXPECT_LE(viscous_shock_error(0.05), 4 * 0.05);
}

TEST(Viscous, ShockLayerScalesWithEps) {
  const double e1 = viscous_shock_error(0.05), e2 = viscous_shock_error(0.025);
  const double ratio = e2 / e1;
  EXPECT_GE(ratio, 0.35);
  EXPECT_LE(ratio, 0.65);
}

TEST(Viscous, ConservesMass) {
  const TorusGrid g(128);
  const auto u0 = GridField::sample(g, [](double x) { return 0.5 + 0.3 * std::sin(6.283185307179586 * x); });
  const auto traj = solve_viscous(model::burgers_model(), 0.05, u0, 0.5, 0.0, 50);
  for (const auto& f : traj.frames()) EXPECT_NEAR(f.integral(), u0.integral(), 1e-13);
}

TEST(Kruzkov, CflViolationRejected) {
  const TorusGrid g(64);
  EXPECT_THROW(solve_kruzkov(model::tasep_model(), GridField(g, 0.5), 0.1, g.dx()), PreconditionError);
}

TEST(Kruzkov, StandingShockStaysWithinOneCell) {
  const auto m = model::tasep_model();
  const TorusGrid g(512);
  const auto traj = solve_kruzkov(m, two_jump_data(g, 0.2, 0.8), 0.4, 0.0, 10);
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const double x = crossing(traj.frames()[k], 0.5, 0.3, 0.7);
    EXPECT_LE(std::abs(x - 0.5), g.dx()) << "t=" << traj.times()[k];
  }
}

TEST(Kruzkov, RarefactionL1Error) {
  const auto m = model::tasep_model();
  const TorusGrid g(512);
  const double T = 0.4;
  const auto traj = solve_kruzkov(m, two_jump_data(g, 0.8, 0.2), T);
  const auto exact = two_jump_solution(m, 0.8, 0.2);
  ASSERT_LE(T, exact.valid_until());
  EXPECT_LT(l1_distance(traj.back(), exact.cell_averages(g, T)), 0.01);
}

TEST(Kruzkov, TotalVariationNonIncreasing) {
  const auto m = model::tasep_model();
  const TorusGrid g(256);
  const auto u0 = GridField::sample(g, [](double x) { return 0.5 + 0.4 * std::sin(12.566370614359172 * x); });
  const auto traj = solve_kruzkov(m, u0, 0.5, 0.0, 1);
  for (std::size_t k = 1; k < traj.size(); ++k)
    EXPECT_LE(total_variation(traj.frames()[k].values()), total_variation(traj.frames()[k - 1].values()) + 1e-12);
}

TEST(Kruzkov, DiscreteEntropyInequality) {
  const auto m = model::tasep_model();
  const TorusGrid g(128);
  const auto u0 = GridField::sample(g, [](double x) { return x < 0.3 ? 0.15 : (x < 0.7 ? 0.85 : 0.4); });
  const auto traj = solve_kruzkov(m, u0, 0.3, 0.0, 1);
  const double lambda = traj.meta().dt / g.dx();
  for (double k : {0.0, 0.2, 0.5, 0.61, 0.9})
    for (std::size_t n = 0; n + 1 < traj.size(); ++n)
      EXPECT_LE(kruzkov_cell_production(m, traj.frames()[n].values(), traj.frames()[n + 1].values(), k, lambda),
                1e-12);
}

TEST(Kruzkov, FirstOrderUnderRefinement) {
  const auto m = model::tasep_model();
  const double T = 0.4;
  const auto exact = two_jump_solution(m, 0.2, 0.8);
  auto err = [&](std::size_t n) {
    const TorusGrid g(n);
    return l1_distance(solve_kruzkov(m, two_jump_data(g, 0.2, 0.8), T).back(), exact.cell_averages(g, T));
  };
  const double ratio = err(512) / err(256);
  EXPECT_GE(ratio, 0.35);
  EXPECT_LE(ratio, 0.65);
}

TEST(ExactSolution, TwoJumpInteractionTime) {
  const auto exact = two_jump_solution(model::tasep_model(), 0.2, 0.8);
  EXPECT_NEAR(exact.valid_until(), 0.25 / 0.6, 1e-12);
  EXPECT_DOUBLE_EQ(exact(0.3, 0.4), 0.2);
  EXPECT_DOUBLE_EQ(exact(0.3, 0.6), 0.8);
  EXPECT_NEAR(exact(0.3, 0.0), 0.5, 1e-12);
}
