#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <fftw3.h>

#include "sclaw/cli/config.hpp"
#include "sclaw/cli/plot.hpp"
#include "sclaw/core/log.hpp"
#include "sclaw/core/parallel.hpp"
#include "sclaw/core/trajectory_io.hpp"
#include "sclaw/entropy/hfun.hpp"
#include "sclaw/entropy/production.hpp"
#include "sclaw/entropy/splittable.hpp"
#include "sclaw/hyperbolic/flux.hpp"
#include "sclaw/hyperbolic/riemann.hpp"
#include "sclaw/hyperbolic/solvers.hpp"
#include "sclaw/model/validation.hpp"
#include "sclaw/rareevent/bernstein.hpp"
#include "sclaw/rareevent/montecarlo.hpp"
#include "sclaw/rareevent/tilt.hpp"
#include "sclaw/ratefun/ifun.hpp"
#include "sclaw/ratefun/rfun.hpp"
#include "sclaw/ratefun/young.hpp"

namespace sclaw::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Numbers in CSV files: shortest round-trip decimal, so reruns compare byte for byte.
inline std::string num(double v) {
  for (int prec : {15, 16, 17}) {
    std::ostringstream os;
    os << std::setprecision(prec) << v;
    if (prec == 17 || std::stod(os.str()) == v) return os.str();
  }
  return {};
}

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : cols_(header.size()) { add(header); }

  template <class... T>
  void row(const T&... v) {
    std::vector<std::string> r{cell(v)...};
    if (r.size() != cols_) throw StructuralError("csv row width mismatch");
    add(r);
  }

  const std::string& text() const noexcept { return text_; }

 private:
  static std::string cell(double v) { return num(v); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  template <class I>
    requires std::is_integral_v<I>
  static std::string cell(I v) {
    return std::to_string(v);
  }
  void add(const std::vector<std::string>& r) {
    for (std::size_t k = 0; k < r.size(); ++k) text_ += (k ? "," : "") + r[k];
    text_ += "\n";
  }
  std::size_t cols_;
  std::string text_;
};

/// Output directory plus the report that is echoed to stdout and saved as report.txt.
class RunContext {
 public:
  RunContext(const ExperimentConfig& cfg, std::ostream& out) : cfg_(cfg), out_(out), dir_(cfg.output) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec || !std::filesystem::is_directory(dir_))
      throw ConfigError("config field 'output': cannot create directory '" + cfg.output + "'");
  }

  const ExperimentConfig& cfg() const noexcept { return cfg_; }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void file(const std::string& name, const std::string& text) const { write_text_file(path(name), text); }
  void csv(const std::string& name, const Csv& c) const { file(name, c.text()); }
  void say(const std::string& s) {
    out_ << s;
    report_ += s;
  }
  void finish() const { file("report.txt", report_); }
  unsigned workers() const { return cfg_.workers ? cfg_.workers : default_workers(); }

 private:
  const ExperimentConfig& cfg_;
  std::ostream& out_;
  std::filesystem::path dir_;
  std::string report_;
};

// ----- building blocks from the config -----

inline model::ModelCoefficients build_model(const ModelSpec& s) {
  if (!s.preset.empty()) return model::preset_model(s.preset);
  return model::polynomial_model(s.name, s.f, s.D, s.a2);
}

inline TorusGrid grid_for(const ExperimentConfig& c, double eps) {
  if (c.grid.cells_per_eps > 0.0)
    return TorusGrid(std::max<std::size_t>(4, static_cast<std::size_t>(std::lround(c.grid.cells_per_eps / eps))));
  return TorusGrid(c.grid.n_cells);
}

inline spde::NoisePlan plan_for(const ExperimentConfig& c, const TorusGrid& g, double eps) {
  const double w = c.kernel.width > 0.0 ? c.kernel.width : c.kernel.width_eps * eps;
  const auto shape = model::parse_kernel_shape(c.kernel.shape);
  return spde::NoisePlan{model::make_kernel(shape, std::min(std::max(w, 2.0 * g.dx()), 1.0), g)};
}

inline spde::SpdeParams params_for(const ExperimentConfig& c, double eps) {
  spde::SpdeParams p;
  p.eps = eps;
  p.gamma = c.gamma;
  p.T = c.T;
  p.dt = c.dt;
  p.store_stride = c.store_stride;
  return p;
}

inline hyperbolic::PeriodicRiemannSolution riemann_of(const model::ModelCoefficients& m,
                                                      const std::vector<double>& positions,
                                                      const std::vector<double>& states) {
  return hyperbolic::PeriodicRiemannSolution(m, positions, states);
}

inline GridField initial_field(const ExperimentConfig& c, const model::ModelCoefficients& m, const TorusGrid& g) {
  const auto& in = c.initial;
  if (in.type == "constant") return GridField(g, in.value);
  if (in.type == "sine")
    return GridField::sample(
        g, [&](double x) { return in.mean + in.amplitude * std::sin(2.0 * std::numbers::pi * in.mode * x); });
  return riemann_of(m, in.positions, in.states).cell_averages(g, 0.0);
}

inline entropy::PiecewiseSmoothProfile build_profile(const ProfileSpec& s, const model::ModelCoefficients& m) {
  if (s.type == "standing_shock") return entropy::standing_shock_pair(s.T, s.u_left, s.u_right, s.x0);
  return entropy::profile_from_riemann(riemann_of(m, s.positions, s.states), s.T);
}

inline double smoothstep(double a, double b, double x) {
  const double s = std::clamp((x - a) / (b - a), 0.0, 1.0);
  return s * s * (3.0 - 2.0 * s);
}

inline double plateau(const PlateauSpec& p, double x) {
  return smoothstep(p.lo - p.ramp, p.lo, x) * (1.0 - smoothstep(p.hi, p.hi + p.ramp, x));
}

inline model::EntropyPair build_pair(const EntropySpec& s, const model::ModelCoefficients& m) {
  if (s.eta == "quadratic") return model::quadratic_entropy(m);
  if (s.eta == "kruzkov") return model::kruzkov_entropy(s.k, m);
  return model::linear_entropy(1.0, 0.0, m);
}

inline model::SpaceTimeFunction build_phi(const EntropySpec& s, double T) {
  const auto px = s.phi_x, pt = s.phi_t;
  return {[=](double t, double x) { return plateau(pt, t / T) * plateau(px, x); }, {}, {}, T};
}

inline Trajectory reversed(const Trajectory& t) {
  Trajectory r(t.grid(), t.meta());
  const double T = t.final_time();
  for (std::size_t k = t.size(); k-- > 0;) r.push(k + 1 == t.size() ? 0.0 : T - t.times()[k], t.frames()[k]);
  return r;
}

inline Trajectory sampled_target(const TargetSpec& s, const model::ModelCoefficients& m, const GridField& u0,
                                 double T) {
  const TorusGrid g = u0.grid();
  if (s.type == "travelling_sine") {
    TrajectoryMeta meta;
    meta.scheme = "target";
    Trajectory traj(g, meta);
    for (std::size_t k = 0; k <= s.n_intervals; ++k) {
      const double t = k == s.n_intervals ? T : T * static_cast<double>(k) / static_cast<double>(s.n_intervals);
      traj.push(t, GridField::sample(g, [&](double x) {
                  return s.mean + s.amplitude * std::sin(2.0 * std::numbers::pi * (x - s.speed * t));
                }));
    }
    return traj;
  }
  const auto kz = hyperbolic::solve_kruzkov(m, u0, T);
  return s.type == "kruzkov" ? kz : reversed(kz);
}

inline rareevent::ScalarFn build_shape(const ShapeSpec& s) {
  if (s.type == "affine") return [a = s.a, b = s.b](double x) { return a + b * x; };
  if (s.type == "log") return [a = s.a, b = s.b](double x) { return a + b * std::log1p(x); };
  return [a = s.a, b = s.b](double x) { return a * std::pow(x, b); };
}

inline std::string shape_name(const ShapeSpec& s) {
  if (s.type == "affine") return num(s.a) + "+" + num(s.b) + "x";
  if (s.type == "log") return num(s.a) + "+" + num(s.b) + "log(1+x)";
  return num(s.a) + "x^" + num(s.b);
}

inline json versions_json() {
  return json{{"sclaw", kVersion},
              {"compiler", __VERSION__},
              {"cplusplus", static_cast<long>(__cplusplus)},
              {"fftw", std::string(fftw_version)},
              {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

/// Full config, versions and seed layout; rerunning it with `run` regenerates every artifact.
inline std::string manifest_text(const ExperimentConfig& c) {
  json m;
  m["manifest_version"] = 1;
  m["command"] = c.command;
  m["config"] = to_json(c);
  m["versions"] = versions_json();
  m["seeds"] = json{{"master", c.seed},
                    {"substreams", "0.." + std::to_string(c.n_samples - 1) + " for every eps value"},
                    {"generator", "Philox4x32-10 counter (master seed as key, substream index in the counter)"}};
  return m.dump(2) + "\n";
}

/// A config file or a manifest written by a previous run.
inline ExperimentConfig load_config_or_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error&) {
    return parse_config(text);  // for the line/column diagnostic
  }
  if (j.is_object() && j.contains("manifest_version")) {
    if (!j.contains("config")) throw ConfigError("manifest without a 'config' section");
    return from_json(j.at("config"));
  }
  return from_json(j);
}

// ----- subcommands -----

namespace commands {

inline int validate(RunContext& ctx) {
  const auto& c = ctx.cfg();
  const auto m = build_model(c.model);
  bool ok = true;
  Csv csv({"eps", "h1", "h2", "h3", "h4", "a4_margin", "noise_l2", "kernel_w11"});
  for (double eps : c.eps) {
    const auto g = grid_for(c, eps);
    const auto r = model::validate_hypotheses(m, plan_for(c, g, eps).kernel, eps, c.gamma);
    ctx.say("model " + m.name() + ", eps " + num(eps) + ", N " + std::to_string(g.n_cells()) + "\n" + r.to_text());
    csv.row(eps, int(r.h1_ok), int(r.h2_ok), int(r.h3_ok), int(r.h4_ok), r.a4_margin, r.noise_l2, r.kernel_w11);
    ok = ok && r.passed();
  }
  ctx.csv("validate.csv", csv);
  return ok ? 0 : 3;
}

inline Series profile_series(const std::string& label, const GridField& u) {
  Series s{label, {}, {}};
  for (std::size_t i = 0; i < u.size(); ++i) s.x.push_back(u.grid().center(i)), s.y.push_back(u[i]);
  return s;
}

inline int simulate(RunContext& ctx) {
  const auto& c = ctx.cfg();
  const auto m = build_model(c.model);
  const auto scheme = spde::parse_scheme(c.scheme);
  Csv runs({"eps", "sample", "mass_drift", "min", "max", "in_range"});
  Csv agg({"eps", "n_cells", "dt", "n_samples", "max_mass_drift", "min", "max", "fraction_in_range"});
  std::vector<Series> plots;
  for (double eps : c.eps) {
    const auto g = grid_for(c, eps);
    const auto plan = plan_for(c, g, eps);
    const auto p = params_for(c, eps);
    const auto u0 = initial_field(c, m, g);
    const double mass0 = u0.integral();
    struct Out {
      double drift, lo, hi, dt;
      std::vector<double> last;
    };
    auto outs = spde::run_ensemble(c.n_samples, c.seed, ctx.workers(), [&](RngStream& s, std::size_t k) {
      const auto traj = spde::simulate(m, p, plan, u0, s, scheme);
      double lo = 1e300, hi = -1e300;
      for (const auto& f : traj.frames()) lo = std::min(lo, f.min()), hi = std::max(hi, f.max());
      if (c.save_trajectories)
        io::save_trajectory(ctx.path("traj_eps" + num(eps) + "_s" + std::to_string(k) + ".sclw"), traj);
      const double drift = std::abs(traj.back().integral() - mass0) / std::max(std::abs(mass0), 1e-300);
      return Out{drift, lo, hi, traj.meta().dt, std::vector<double>(traj.back().values().begin(), traj.back().values().end())};
    });
    double worst = 0, lo = 1e300, hi = -1e300;
    std::size_t inside = 0;
    for (std::size_t k = 0; k < outs.size(); ++k) {
      const auto& o = outs[k];
      const bool in = o.lo >= -0.01 && o.hi <= 1.01;
      inside += in;
      worst = std::max(worst, o.drift), lo = std::min(lo, o.lo), hi = std::max(hi, o.hi);
      runs.row(eps, k, o.drift, o.lo, o.hi, int(in));
    }
    const double frac = static_cast<double>(inside) / static_cast<double>(outs.size());
    agg.row(eps, g.n_cells(), outs[0].dt, c.n_samples, worst, lo, hi, frac);
    ctx.say("eps " + num(eps) + ": " + std::to_string(c.n_samples) + " paths, max mass drift " + num(worst) +
            ", range [" + num(lo) + ", " + num(hi) + "], in [-0.01, 1.01]: " + num(frac) + "\n");
    plots.push_back(profile_series("eps=" + num(eps), GridField(g, outs[0].last)));
  }
  ctx.csv("runs.csv", runs);
  ctx.csv("aggregate.csv", agg);
  ctx.file("final_profiles.svg", svg_line_plot("u(T, x), sample 0", "x", "u", plots));
  return 0;
}

inline void emit_trajectory(RunContext& ctx, const std::string& stem, const Trajectory& traj) {
  io::save_trajectory(ctx.path(stem + ".sclw"), traj);
  Csv fin({"x", "u0", "uT"});
  for (std::size_t i = 0; i < traj.grid().n_cells(); ++i)
    fin.row(traj.grid().center(i), traj.front()[i], traj.back()[i]);
  ctx.csv(stem + "_final.csv", fin);
}

inline int viscous(RunContext& ctx) {
  const auto& c = ctx.cfg();
  const auto m = build_model(c.model);
  Csv agg({"eps", "n_cells", "mass_drift", "total_variation_T"});
  std::vector<Series> plots;
  for (double eps : c.eps) {
    const auto g = grid_for(c, eps);
    const auto u0 = initial_field(c, m, g);
    const auto traj = hyperbolic::solve_viscous(m, eps, u0, c.T, c.dt, c.store_stride);
    emit_trajectory(ctx, "viscous_eps" + num(eps), traj);
    const double drift = std::abs(traj.back().integral() - u0.integral());
    agg.row(eps, g.n_cells(), drift, hyperbolic::total_variation(traj.back().values()));
    ctx.say("viscous eps " + num(eps) + ": mass drift " + num(drift) + "\n");
    plots.push_back(profile_series("eps=" + num(eps), traj.back()));
  }
  ctx.csv("aggregate.csv", agg);
  ctx.file("final_profiles.svg", svg_line_plot("viscous solution at T", "x", "u", plots));
  return 0;
}

inline int kruzkov(RunContext& ctx) {
  const auto& c = ctx.cfg();
  const auto m = build_model(c.model);
  const auto g = TorusGrid(c.grid.n_cells);
  const auto u0 = initial_field(c, m, g);
  const auto traj = hyperbolic::solve_kruzkov(m, u0, c.T, c.dt, c.store_stride);
  emit_trajectory(ctx, "kruzkov", traj);
  Csv agg({"n_cells", "steps_stored", "mass_drift", "total_variation_0", "total_variation_T"});
  const double drift = std::abs(traj.back().integral() - u0.integral());
  agg.row(g.n_cells(), traj.size(), drift, hyperbolic::total_variation(u0.values()),
          hyperbolic::total_variation(traj.back().values()));
  ctx.csv("aggregate.csv", agg);
  ctx.say("kruzkov N " + std::to_string(g.n_cells()) + ": mass drift " + num(drift) + ", TV " +
          num(hyperbolic::total_variation(u0.values())) + " -> " + num(hyperbolic::total_variation(traj.back().values())) +
          "\n");
  ctx.file("final_profile.svg",
           svg_line_plot("Kruzkov solution", "x", "u", {profile_series("t=0", u0), profile_series("t=T", traj.back())}));
  return 0;
}

inline int riemann(RunContext& ctx) {
  const auto& c = ctx.cfg();
  const auto m = build_model(c.model);
  const auto sol = riemann_of(m, c.initial.positions, c.initial.states);
  if (c.T > sol.valid_until() * (1 + 1e-12))
    throw PreconditionError("riemann: T=" + num(c.T) + " exceeds the fan interaction time " + num(sol.valid_until()));
  const auto g = TorusGrid(c.grid.n_cells);
  const auto exact = sol.cell_averages(g, c.T);
  const auto num_sol = hyperbolic::solve_kruzkov(m, sol.cell_averages(g, 0.0), c.T).back();
  Csv prof({"x", "exact", "kruzkov_numerical"});
  for (std::size_t i = 0; i < g.n_cells(); ++i) prof.row(g.center(i), exact[i], num_sol[i]);
  ctx.csv("riemann.csv", prof);
  Csv waves({"jump", "kind", "u_minus", "u_plus", "speed_lo", "speed_hi"});
  for (std::size_t k = 0; k < sol.fans().size(); ++k)
    for (const auto& w : sol.fans()[k].waves())
      waves.row(k, w.kind == hyperbolic::WaveKind::Shock ? "shock" : "rarefaction", w.u_minus, w.u_plus, w.speed_lo,
                w.speed_hi);
  ctx.csv("waves.csv", waves);
  const double d = l1_distance(exact, num_sol);
  Csv agg({"n_cells", "T", "l1_exact_vs_numerical", "valid_until"});
  agg.row(g.n_cells(), c.T, d, sol.valid_until());
  ctx.csv("aggregate.csv", agg);
  for (const auto& f : sol.fans()) ctx.say(f.to_text());
  ctx.say("L1(exact, numerical Kruzkov) at T=" + num(c.T) + ": " + num(d) + "\n");
  ctx.file("riemann.svg", svg_line_plot("Riemann solution at T", "x", "u",
                                        {profile_series("exact", exact), profile_series("EO scheme", num_sol)}));
  return 0;
}

inline int entropy_cmd(RunContext& ctx) {
  const auto& c = ctx.cfg();
  const auto m = build_model(c.model);
  const auto prof = build_profile(c.profile, m);
  const auto pair = build_pair(c.entropy, m);
  const auto phi = build_phi(c.entropy, prof.horizon());
  const double jump = entropy::jump_production(prof, pair, phi);
  const auto g = TorusGrid(c.grid.n_cells);
  const auto traj = prof.to_trajectory(g, c.profile.n_intervals);
  const auto weak = entropy::entropy_production_weak(traj, pair, phi);
  Csv agg({"n_cells", "eta", "jump_formula", "weak_form", "relative_difference"});
  const double rel = std::abs(weak.value - jump) / std::max(std::abs(jump), 1e-300);
  agg.row(g.n_cells(), c.entropy.eta, jump, weak.value, rel);
  ctx.csv("aggregate.csv", agg);
  std::ostringstream os;
  os << std::setprecision(10) << "entropy production (" << c.entropy.eta << "): jump formula " << jump
     << ", weak form on N=" << g.n_cells() << " " << weak.value << ", relative difference " << rel << "\n";
  ctx.say(os.str());
  return 0;
}

inline int hfun(RunContext& ctx) {
  const auto& c = ctx.cfg();
  const auto m = build_model(c.model);
  const auto prof = build_profile(c.profile, m);
  const auto h = entropy::h_functional(prof, m);
  const auto split = entropy::classify_splittable(prof, m);
  ctx.say(h.to_text());
  ctx.say(split.to_text());
  Csv agg({"H", "finite", "splittable"});
  agg.row(h.value, int(h.finite), int(split.splittable()));
  ctx.csv("aggregate.csv", agg);
  return h.finite ? 0 : 3;
}

inline int rfun(RunContext& ctx) {
  const auto& c = ctx.cfg();
  const auto m = build_model(c.model);
  ratefun::RFunSolver solve(m);
  Csv out({"w", "c", "R", "argmin"});
  for (const auto& p : c.rfun.points) {
    const auto r = solve(p[0], p[1]);
    out.row(p[0], p[1], r.value, r.argmin.to_string());
    ctx.say("R(w=" + num(p[0]) + ", c=" + num(p[1]) + ") = " + num(r.value) + "  argmin " + r.argmin.to_string() + "\n");
  }
  ctx.csv("aggregate.csv", out);
  return 0;
}

inline int ifun(RunContext& ctx) {
  const auto& c = ctx.cfg();
  const auto m = build_model(c.model);
  const auto g = TorusGrid(c.grid.n_cells);
  const auto target = sampled_target(c.target, m, initial_field(c, m, g), c.T);
  const auto I = ratefun::i_functional(target, m);
  const auto J = ratefun::young_i(ratefun::YoungMeasureField::dirac(target, m), target.front());
  Csv agg({"target", "I", "young_I_of_dirac"});
  agg.row(c.target.type, I.value, J.value);
  ctx.csv("aggregate.csv", agg);
  ctx.say("I(" + c.target.type + ") " + I.to_text() + "Young I(dirac) " + J.to_text());
  return 0;
}

inline int youngi(RunContext& ctx) {
  const auto& c = ctx.cfg();
  const auto m = build_model(c.model);
  const auto g = TorusGrid(c.grid.n_cells);
  ratefun::FunctionalResult r;
  if (c.young.type == "constant") {
    std::vector<ratefun::Atom> atoms;
    for (const auto& a : c.young.atoms) atoms.push_back({a[0], a[1]});
    const ratefun::DiscreteMeasure mu(atoms);
    std::vector<double> times;
    for (std::size_t k = 0; k <= c.young.n_intervals; ++k)
      times.push_back(k == c.young.n_intervals ? c.T : c.T * static_cast<double>(k) / c.young.n_intervals);
    r = ratefun::young_i(ratefun::YoungMeasureField::constant(g, times, mu, m), GridField(g, mu.mean()));
  } else {
    const auto u = hyperbolic::solve_kruzkov(m, initial_field(c, m, g), c.T);
    r = ratefun::young_i(ratefun::YoungMeasureField::dirac(u, m), u.front());
  }
  Csv agg({"young", "value", "finite", "bad_slice"});
  agg.row(c.young.type, r.value, int(r.finite), static_cast<long>(r.bad_slice));
  ctx.csv("aggregate.csv", agg);
  Csv slices({"slice", "weight", "value"});
  for (std::size_t k = 0; k < r.per_slice.size(); ++k) slices.row(k, r.weights[k], r.per_slice[k]);
  ctx.csv("slices.csv", slices);
  ctx.say("Young-measure functional (" + c.young.type + "): " + r.to_text());
  return 0;
}

inline int control(RunContext& ctx) {
  const auto& c = ctx.cfg();
  const auto m = build_model(c.model);
  const auto g = TorusGrid(c.grid.n_cells);
  const auto target = sampled_target(c.target, m, initial_field(c, m, g), c.T);
  const auto ctl = ratefun::control_from_target(target, m);
  Csv psi({"t", "x", "psi"});
  for (std::size_t k = 0; k < ctl.psi.size(); ++k)
    for (std::size_t i = 0; i < g.n_cells(); ++i) psi.row(ctl.times[k], g.center(i), ctl.psi[k][i]);
  ctx.csv("psi.csv", psi);
  Csv agg({"target", "cost"});
  agg.row(c.target.type, ctl.cost);
  ctx.csv("aggregate.csv", agg);
  ctx.say("control cost 1/2 <<a(v)^2 grad psi, grad psi>> = " + num(ctl.cost) + "\n");
  return std::isfinite(ctl.cost) ? 0 : 3;
}

inline double cost_scale(const ExperimentConfig& c, double eps) {
  return c.cost_scaling == "ldp" ? std::pow(eps, 2 * c.gamma) : std::pow(eps, 2 * c.gamma - 1);
}

inline int tilt(RunContext& ctx) {
  const auto& c = ctx.cfg();
  const auto m = build_model(c.model);
  Csv runs({"eps", "sample", "seed", "stream", "log_weight", "cost_estimate", "sup_l1_to_target"});
  Csv agg({"eps", "n_cells", "n_samples", "mean_sup_l1", "entropy_estimate", "control_cost_reference", "ratio"});
  Series dist{"mean sup L1 to target", {}, {}}, ent{"scaled -mean log weight", {}, {}}, ref{"control cost", {}, {}};
  for (double eps : c.eps) {
    const auto g = grid_for(c, eps);
    const auto plan = plan_for(c, g, eps);
    const auto p = params_for(c, eps);
    const auto target = sampled_target(c.target, m, initial_field(c, m, g), c.T);
    const auto ctl = ratefun::control_from_target(target, m);
    if (!std::isfinite(ctl.cost)) throw PreconditionError("tilt: target has infinite control cost");
    auto out = spde::run_ensemble(c.n_samples, c.seed, ctx.workers(), [&](RngStream& s, std::size_t) {
      const auto r = rareevent::simulate_tilted(m, p, plan, ctl, target.front(), s);
      return std::array<double, 3>{r.log_rn_weight, r.cost_estimate, rareevent::sup_l1_to(r.trajectory, target)};
    });
    double d = 0, lw = 0;
    for (std::size_t k = 0; k < out.size(); ++k) {
      runs.row(eps, k, c.seed, k, out[k][0], out[k][1], out[k][2]);
      d += out[k][2], lw += out[k][0];
    }
    d /= static_cast<double>(out.size()), lw /= static_cast<double>(out.size());
    const double e = cost_scale(c, eps) * (-lw);
    const double reference = c.cost_scaling == "ldp" ? ctl.cost : ctl.cost / eps;
    agg.row(eps, g.n_cells(), c.n_samples, d, e, reference, e / reference);
    ctx.say("eps " + num(eps) + ": mean sup L1 " + num(d) + ", entropy estimate " + num(e) + ", control cost " +
            num(reference) + " (ratio " + num(e / reference) + ")\n");
    dist.x.push_back(eps), dist.y.push_back(d);
    ent.x.push_back(eps), ent.y.push_back(e);
    ref.x.push_back(eps), ref.y.push_back(reference);
  }
  ctx.csv("runs.csv", runs);
  ctx.csv("aggregate.csv", agg);
  ctx.file("distance_vs_eps.svg", svg_line_plot("tilted runs: distance to target", "eps", "mean sup_t L1", {dist}, true));
  ctx.file("cost_vs_eps.svg", svg_line_plot("entropy estimate vs control cost", "eps", "cost", {ent, ref}, true));
  return 0;
}

inline rareevent::EventPredicate build_event(const ExperimentConfig& c, const model::ModelCoefficients& m,
                                             const GridField& u0) {
  const double thr = c.event.threshold;
  if (c.event.type == "always") return [](const Trajectory&) { return true; };
  if (c.event.type == "sup_l1_initial")
    return [u0, thr](const Trajectory& t) {
      double s = 0;
      for (const auto& f : t.frames()) s = std::max(s, l1_distance(f, u0));
      return s > thr;
    };
  if (c.initial.type == "riemann") {
    auto sol = std::make_shared<hyperbolic::PeriodicRiemannSolution>(riemann_of(m, c.initial.positions, c.initial.states));
    if (c.T > sol->valid_until() * (1 + 1e-12))
      throw PreconditionError("mc: T exceeds the fan interaction time of the Riemann data");
    return [sol, thr](const Trajectory& t) { return sup_l1_distance(t, sol->exact_trajectory(t.grid(), t.times())) > thr; };
  }
  auto kz = std::make_shared<Trajectory>(hyperbolic::solve_kruzkov(m, u0, c.T));
  return [kz, thr](const Trajectory& t) { return rareevent::sup_l1_to(t, *kz) > thr; };
}

inline int mc(RunContext& ctx) {
  const auto& c = ctx.cfg();
  const auto m = build_model(c.model);
  const auto scheme = spde::parse_scheme(c.scheme);
  Csv runs({"eps", "sample", "outcome"});
  Csv agg({"eps", "n_cells", "n_samples", "hits", "predicate_errors", "simulation_errors", "estimate", "wilson_lo",
           "wilson_hi"});
  Series est{"estimate", {}, {}}, lo{"wilson lo", {}, {}}, hi{"wilson hi", {}, {}};
  std::vector<double> probs;
  for (double eps : c.eps) {
    const auto g = grid_for(c, eps);
    const auto u0 = initial_field(c, m, g);
    std::vector<int> outcomes;
    const auto e = rareevent::mc_probability(build_event(c, m, u0), m, params_for(c, eps), plan_for(c, g, eps), u0,
                                             c.n_samples, c.seed, scheme, ctx.workers(), &outcomes);
    for (std::size_t k = 0; k < outcomes.size(); ++k) runs.row(eps, k, outcomes[k]);
    agg.row(eps, g.n_cells(), e.n_samples, e.hits, e.predicate_errors, e.simulation_errors, e.estimate, e.lo, e.hi);
    ctx.say("eps " + num(eps) + ": P = " + num(e.estimate) + " [" + num(e.lo) + ", " + num(e.hi) + "] from " +
            std::to_string(e.valid()) + " valid samples\n");
    est.x.push_back(eps), est.y.push_back(e.estimate);
    lo.x.push_back(eps), lo.y.push_back(e.lo);
    hi.x.push_back(eps), hi.y.push_back(e.hi);
    probs.push_back(e.estimate);
  }
  if (c.eps.size() >= 2) {
    const double shift = c.cost_scaling == "ldp" ? 0.0 : 1.0;
    ctx.say(rareevent::ldp_fit(c.eps, probs, c.gamma, shift).to_text());
  }
  ctx.csv("runs.csv", runs);
  ctx.csv("aggregate.csv", agg);
  ctx.file("probability_vs_eps.svg", svg_line_plot("event probability", "eps", "P", {est, lo, hi}, true));
  return 0;
}

inline int bernstein(RunContext& ctx) {
  const auto& b = ctx.cfg().bernstein;
  const auto paths =
      rareevent::brownian_summaries(b.n_paths, b.steps, b.horizon, ctx.cfg().seed, ctx.workers(), b.realized_qv);
  Csv agg({"F", "zeta", "n", "hits", "frequency", "std_error", "bound", "margin", "holds"});
  bool all = true;
  for (const auto& s : b.shapes) {
    const auto F = build_shape(s);
    for (double z : b.zeta) {
      const auto r = rareevent::bernstein_check(paths, F, z);
      agg.row(shape_name(s), z, r.n, r.hits, r.frequency, r.std_error, r.bound, r.margin, int(r.holds()));
      ctx.say("F = " + shape_name(s) + ": " + r.to_text());
      all = all && r.holds();
    }
  }
  ctx.csv("aggregate.csv", agg);
  return all ? 0 : 3;
}

}  // namespace commands

/// Runs c.command with artifacts in c.output and the report on `out`. The manifest is
/// written first so a failed run still documents its input.
inline int run_command(const ExperimentConfig& c, std::ostream& out) {
  if (c.command.empty()) throw ConfigError("config field 'command': no subcommand given");
  RunContext ctx(c, out);
  ctx.file("manifest.json", manifest_text(c));
  int rc = 0;
  const auto& k = c.command;
  if (k == "validate") rc = commands::validate(ctx);
  else if (k == "simulate") rc = commands::simulate(ctx);
  else if (k == "viscous") rc = commands::viscous(ctx);
  else if (k == "kruzkov") rc = commands::kruzkov(ctx);
  else if (k == "riemann") rc = commands::riemann(ctx);
  else if (k == "entropy") rc = commands::entropy_cmd(ctx);
  else if (k == "hfun") rc = commands::hfun(ctx);
  else if (k == "rfun") rc = commands::rfun(ctx);
  else if (k == "ifun") rc = commands::ifun(ctx);
  else if (k == "youngi") rc = commands::youngi(ctx);
  else if (k == "control") rc = commands::control(ctx);
  else if (k == "tilt") rc = commands::tilt(ctx);
  else if (k == "mc") rc = commands::mc(ctx);
  else if (k == "bernstein") rc = commands::bernstein(ctx);
  else throw ConfigError("config field 'command': unknown subcommand '" + k + "'");
  ctx.finish();
  return rc;
}

}  // namespace sclaw::cli
