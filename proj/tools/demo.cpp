// Small tour of the library: one stochastic run, the local rate, and the jump-set functional
// of an anti-entropic standing shock. Prints to stdout only.

#include <iostream>

#include "sclaw/entropy/hfun.hpp"
#include "sclaw/entropy/profile.hpp"
#include "sclaw/model/kernel.hpp"
#include "sclaw/model/polynomial.hpp"
#include "sclaw/ratefun/rfun.hpp"
#include "sclaw/spde/simulate.hpp"

int main() {
  using namespace sclaw;
  const auto m = model::preset_model("tasep");
  const TorusGrid g(128);

  spde::SpdeParams p;
  p.eps = 0.05;
  p.gamma = 1.5;
  p.T = 0.2;
  const spde::NoisePlan plan{model::make_kernel(model::KernelShape::Triangle, 0.05, g)};
  const auto u0 = GridField::sample(g, [](double x) { return 0.5 + 0.3 * std::sin(6.283185307179586 * x); });
  RngStream stream(42, 0);
  const auto traj = spde::simulate(m, p, plan, u0, stream);
  std::cout << "simulated " << traj.size() << " frames, mass " << u0.integral() << " -> " << traj.back().integral()
            << ", range [" << traj.back().min() << ", " << traj.back().max() << "]\n";

  const auto r = ratefun::r_fun(m, 0.3, 0.1);
  std::cout << "R(0.3, 0.1) = " << r.value << " at " << r.argmin.to_string() << "\n";

  const auto shock = entropy::standing_shock_pair(1.0, 0.8, 0.2, 0.5);
  std::cout << entropy::h_functional(shock, m).to_text();
}
