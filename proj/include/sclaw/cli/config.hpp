#pragma once

// Experiment configuration: a JSON document with one section per concern. Every field has
// a default, unknown keys are rejected, and to_json emits the fully expanded form, so
// parse(serialize(c)) reproduces c and serialize is a fixed point after one round.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sclaw/core/errors.hpp"

namespace sclaw::cli {

using json = nlohmann::ordered_json;

struct ModelSpec {
  std::string preset = "tasep";  // empty: use the polynomials
  std::string name = "custom";
  std::vector<double> f, D, a2;
};

struct GridSpec {
  std::size_t n_cells = 256;
  double cells_per_eps = 0.0;  // > 0: n_cells = round(cells_per_eps / eps) for each eps
};

struct KernelSpec {
  std::string shape = "triangle";
  double width = 0.0;      // > 0: absolute width
  double width_eps = 1.0;  // otherwise width = width_eps * eps
};

struct InitialSpec {
  std::string type = "sine";  // constant | sine | riemann
  double value = 0.5;
  double mean = 0.5, amplitude = 0.3;
  int mode = 1;
  std::vector<double> positions{0.0, 0.5}, states{0.2, 0.8};
};

struct ProfileSpec {
  std::string type = "standing_shock";  // standing_shock | riemann
  double T = 1.0;
  double u_left = 0.8, u_right = 0.2, x0 = 0.5;
  std::vector<double> positions{0.0, 0.5}, states{0.2, 0.8};
  std::size_t n_intervals = 64;  // rasterization in time for the weak production
};

struct YoungSpec {
  std::string type = "constant";  // constant | kruzkov
  std::vector<std::vector<double>> atoms{{0.0, 0.5}, {1.0, 0.5}};
  std::size_t n_intervals = 32;
};

struct TargetSpec {
  std::string type = "travelling_sine";  // travelling_sine | kruzkov | reversed_kruzkov
  double speed = 5.0, amplitude = 0.45, mean = 0.5;
  std::size_t n_intervals = 64;
};

struct EventSpec {
  std::string type = "sup_l1_kruzkov";  // sup_l1_kruzkov | sup_l1_initial | always
  double threshold = 0.3;
};

struct PlateauSpec {
  double lo = 0.4, hi = 0.6, ramp = 0.1;
};

struct EntropySpec {
  std::string eta = "quadratic";  // quadratic | kruzkov | linear
  double k = 0.5;
  PlateauSpec phi_x{0.4, 0.6, 0.1};
  PlateauSpec phi_t{0.1, 0.9, 0.05};  // fractions of the horizon
};

struct ShapeSpec {
  std::string type = "affine";  // affine: a + b x | log: a + b log(1 + x) | power: a x^b
  double a = 1.0, b = 0.0;
};

struct BernsteinSpec {
  std::size_t n_paths = 100000;
  std::size_t steps = 1000;
  double horizon = 1.0;
  bool realized_qv = false;
  std::vector<double> zeta{0.5, 1.0, 2.0};
  std::vector<ShapeSpec> shapes{{"affine", 1.0, 0.0}, {"affine", 1.0, 1.0}};
};

struct RfunSpec {
  std::vector<std::vector<double>> points{{0.5, 0.0}, {0.3, 0.1}};
};

struct ExperimentConfig {
  std::string command;
  ModelSpec model;
  GridSpec grid;
  std::vector<double> eps{0.1};
  double gamma = 1.5;
  KernelSpec kernel;
  std::string scheme = "em";
  double T = 0.25;
  double dt = 0.0;  // 0: stability bound ("auto")
  std::size_t store_stride = 1;
  std::uint64_t seed = 1;
  std::size_t n_samples = 16;
  unsigned workers = 0;  // 0: available parallelism; never affects results
  std::string output = "out";
  bool save_trajectories = false;
  std::string cost_scaling = "ldp";  // ldp: eps^{2 gamma}; second_order: eps^{2 gamma - 1}
  InitialSpec initial;
  ProfileSpec profile;
  YoungSpec young;
  TargetSpec target;
  EventSpec event;
  EntropySpec entropy;
  BernsteinSpec bernstein;
  RfunSpec rfun;
};

static_assert(std::is_same_v<std::uint64_t, std::size_t>, "seed is read as a size_t");

namespace detail {

// Walks one JSON object, remembering its path for diagnostics and the keys consumed.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("expected an object");
  }

  [[noreturn]] void fail(const std::string& what, const std::string& key = "") const {
    throw ConfigError("config field '" + (key.empty() ? path_ : join(key)) + "': " + what);
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  template <class T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    read(j_.at(key), out, key);
  }

  template <class Fn>
  void section(const std::string& key, Fn&& fn) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    Reader sub(j_.at(key), join(key));
    fn(sub);
    sub.finish();
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail("unknown key", it.key());
  }

  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void read(const json& v, double& out, const std::string& key) const {
    if (!v.is_number()) fail("expected a number", key);
    out = v.get<double>();
    if (!std::isfinite(out)) fail("must be finite", key);
  }
  void read(const json& v, bool& out, const std::string& key) const {
    if (!v.is_boolean()) fail("expected true or false", key);
    out = v.get<bool>();
  }
  void read(const json& v, std::string& out, const std::string& key) const {
    if (!v.is_string()) fail("expected a string", key);
    out = v.get<std::string>();
  }
  void read(const json& v, int& out, const std::string& key) const {
    if (!v.is_number_integer()) fail("expected an integer", key);
    out = v.get<int>();
  }
  void read(const json& v, unsigned& out, const std::string& key) const {
    if (!v.is_number_unsigned()) fail("expected a non-negative integer", key);
    out = v.get<unsigned>();
  }
  void read(const json& v, std::size_t& out, const std::string& key) const {
    if (!v.is_number_unsigned()) fail("expected a non-negative integer", key);
    out = v.get<std::size_t>();
  }
  void read(const json& v, ShapeSpec& out, const std::string& key) const {
    Reader s(v, join(key));
    s.get("type", out.type);
    s.get("a", out.a);
    s.get("b", out.b);
    s.finish();
  }
  template <class T>
  void read(const json& v, std::vector<T>& out, const std::string& key) const {
    if (!v.is_array()) fail("expected a list", key);
    out.clear();
    for (std::size_t k = 0; k < v.size(); ++k) {
      T x{};
      read(v[k], x, key + "[" + std::to_string(k) + "]");
      out.push_back(std::move(x));
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError("config field '" + field + "': " + what);
}

inline json plateau_json(const PlateauSpec& p) { return json{{"lo", p.lo}, {"hi", p.hi}, {"ramp", p.ramp}}; }

inline void read_plateau(Reader& r, PlateauSpec& p) {
  r.get("lo", p.lo);
  r.get("hi", p.hi);
  r.get("ramp", p.ramp);
}

}  // namespace detail

inline const std::set<std::string>& known_commands() {
  static const std::set<std::string> c{"simulate", "viscous", "kruzkov", "riemann", "entropy", "hfun",      "rfun",
                                       "ifun",     "youngi",  "control", "tilt",    "mc",      "bernstein", "validate"};
  return c;
}

/// Checks ranges and enumerations that the type checks cannot see.
inline void validate_config(const ExperimentConfig& c) {
  using detail::require;
  require(c.command.empty() || known_commands().count(c.command), "command", "unknown subcommand '" + c.command + "'");
  if (!c.model.preset.empty())
    require(c.model.preset == "tasep" || c.model.preset == "burgers" || c.model.preset == "linear", "model.preset",
            "unknown preset '" + c.model.preset + "' (expected tasep, burgers or linear)");
  else
    require(!c.model.f.empty() && !c.model.D.empty() && !c.model.a2.empty(), "model",
            "without a preset, f, D and a2 coefficient lists are all required");
  require(c.grid.n_cells >= 4, "grid.n_cells", "need at least 4 cells");
  require(c.grid.cells_per_eps >= 0.0, "grid.cells_per_eps", "must be non-negative");
  require(!c.eps.empty(), "eps", "need at least one value");
  for (double e : c.eps) require(e > 0.0, "eps", "values must be positive");
  require(c.gamma > 0.5, "gamma", "must exceed 1/2");
  require(c.kernel.shape == "triangle" || c.kernel.shape == "gaussian" || c.kernel.shape == "uniform", "kernel.shape",
          "expected triangle, gaussian or uniform");
  require(c.kernel.width >= 0.0 && c.kernel.width_eps > 0.0, "kernel", "widths must be positive");
  require(c.scheme == "em" || c.scheme.rfind("split(", 0) == 0, "scheme", "expected em or split(n)");
  require(c.T > 0.0, "T", "must be positive");
  require(c.dt >= 0.0, "dt", "must be \"auto\" or a positive number");
  require(c.store_stride >= 1, "store_stride", "must be at least 1");
  require(c.n_samples >= 1, "n_samples", "must be at least 1");
  require(!c.output.empty(), "output", "must not be empty");
  require(c.cost_scaling == "ldp" || c.cost_scaling == "second_order", "cost_scaling", "expected ldp or second_order");
  const auto& in = c.initial;
  require(in.type == "constant" || in.type == "sine" || in.type == "riemann", "initial.type",
          "expected constant, sine or riemann");
  require(in.positions.size() == in.states.size() && !in.states.empty(), "initial", "positions and states must match");
  const auto& pr = c.profile;
  require(pr.type == "standing_shock" || pr.type == "riemann", "profile.type", "expected standing_shock or riemann");
  require(pr.T > 0.0, "profile.T", "must be positive");
  require(pr.positions.size() == pr.states.size() && !pr.states.empty(), "profile", "positions and states must match");
  require(c.young.type == "constant" || c.young.type == "kruzkov", "young.type", "expected constant or kruzkov");
  for (const auto& a : c.young.atoms) require(a.size() == 2, "young.atoms", "each atom is [position, weight]");
  require(c.young.n_intervals >= 1, "young.n_intervals", "must be at least 1");
  require(c.target.type == "travelling_sine" || c.target.type == "kruzkov" || c.target.type == "reversed_kruzkov",
          "target.type", "expected travelling_sine, kruzkov or reversed_kruzkov");
  require(c.target.n_intervals >= 1, "target.n_intervals", "must be at least 1");
  require(c.event.type == "sup_l1_kruzkov" || c.event.type == "sup_l1_initial" || c.event.type == "always",
          "event.type", "expected sup_l1_kruzkov, sup_l1_initial or always");
  require(c.entropy.eta == "quadratic" || c.entropy.eta == "kruzkov" || c.entropy.eta == "linear", "entropy.eta",
          "expected quadratic, kruzkov or linear");
  for (const auto& s : c.bernstein.shapes)
    require(s.type == "affine" || s.type == "log" || s.type == "power", "bernstein.shapes",
            "expected affine, log or power");
  require(c.bernstein.n_paths >= 1 && c.bernstein.steps >= 1 && c.bernstein.horizon > 0.0, "bernstein",
          "n_paths, steps and horizon must be positive");
  for (const auto& p : c.rfun.points) require(p.size() == 2, "rfun.points", "each point is [w, c]");
}

inline ExperimentConfig from_json(const json& j) {
  ExperimentConfig c;
  detail::Reader r(j, "");
  r.get("command", c.command);
  r.section("model", [&](detail::Reader& s) {
    s.get("preset", c.model.preset);
    s.get("name", c.model.name);
    s.get("f", c.model.f);
    s.get("D", c.model.D);
    s.get("a2", c.model.a2);
  });
  r.section("grid", [&](detail::Reader& s) {
    s.get("n_cells", c.grid.n_cells);
    s.get("cells_per_eps", c.grid.cells_per_eps);
  });
  if (r.has("eps") && j.at("eps").is_number()) {
    double e = 0.0;
    r.get("eps", e);
    c.eps = {e};
  } else {
    r.get("eps", c.eps);
  }
  r.get("gamma", c.gamma);
  r.section("kernel", [&](detail::Reader& s) {
    s.get("shape", c.kernel.shape);
    s.get("width", c.kernel.width);
    s.get("width_eps", c.kernel.width_eps);
  });
  r.get("scheme", c.scheme);
  r.get("T", c.T);
  if (r.has("dt") && j.at("dt").is_string()) {
    std::string s;
    r.get("dt", s);
    if (s != "auto") r.fail("expected \"auto\" or a positive number", "dt");
    c.dt = 0.0;
  } else {
    r.get("dt", c.dt);
    if (r.has("dt") && !(c.dt > 0.0)) r.fail("expected \"auto\" or a positive number", "dt");
  }
  r.get("store_stride", c.store_stride);
  r.get("seed", c.seed);
  r.get("n_samples", c.n_samples);
  r.get("workers", c.workers);
  r.get("output", c.output);
  r.get("save_trajectories", c.save_trajectories);
  r.get("cost_scaling", c.cost_scaling);
  r.section("initial", [&](detail::Reader& s) {
    s.get("type", c.initial.type);
    s.get("value", c.initial.value);
    s.get("mean", c.initial.mean);
    s.get("amplitude", c.initial.amplitude);
    s.get("mode", c.initial.mode);
    s.get("positions", c.initial.positions);
    s.get("states", c.initial.states);
  });
  r.section("profile", [&](detail::Reader& s) {
    s.get("type", c.profile.type);
    s.get("T", c.profile.T);
    s.get("u_left", c.profile.u_left);
    s.get("u_right", c.profile.u_right);
    s.get("x0", c.profile.x0);
    s.get("positions", c.profile.positions);
    s.get("states", c.profile.states);
    s.get("n_intervals", c.profile.n_intervals);
  });
  r.section("young", [&](detail::Reader& s) {
    s.get("type", c.young.type);
    s.get("atoms", c.young.atoms);
    s.get("n_intervals", c.young.n_intervals);
  });
  r.section("target", [&](detail::Reader& s) {
    s.get("type", c.target.type);
    s.get("speed", c.target.speed);
    s.get("amplitude", c.target.amplitude);
    s.get("mean", c.target.mean);
    s.get("n_intervals", c.target.n_intervals);
  });
  r.section("event", [&](detail::Reader& s) {
    s.get("type", c.event.type);
    s.get("threshold", c.event.threshold);
  });
  r.section("entropy", [&](detail::Reader& s) {
    s.get("eta", c.entropy.eta);
    s.get("k", c.entropy.k);
    s.section("phi_x", [&](detail::Reader& p) { detail::read_plateau(p, c.entropy.phi_x); });
    s.section("phi_t", [&](detail::Reader& p) { detail::read_plateau(p, c.entropy.phi_t); });
  });
  r.section("bernstein", [&](detail::Reader& s) {
    s.get("n_paths", c.bernstein.n_paths);
    s.get("steps", c.bernstein.steps);
    s.get("horizon", c.bernstein.horizon);
    s.get("realized_qv", c.bernstein.realized_qv);
    s.get("zeta", c.bernstein.zeta);
    s.get("shapes", c.bernstein.shapes);
  });
  r.section("rfun", [&](detail::Reader& s) { s.get("points", c.rfun.points); });
  r.finish();
  validate_config(c);
  return c;
}

inline json to_json(const ExperimentConfig& c) {
  json shapes = json::array();
  for (const auto& s : c.bernstein.shapes) shapes.push_back(json{{"type", s.type}, {"a", s.a}, {"b", s.b}});
  json j;
  j["command"] = c.command;
  j["model"] = json{{"preset", c.model.preset}, {"name", c.model.name}, {"f", c.model.f}, {"D", c.model.D}, {"a2", c.model.a2}};
  j["grid"] = json{{"n_cells", c.grid.n_cells}, {"cells_per_eps", c.grid.cells_per_eps}};
  j["eps"] = c.eps;
  j["gamma"] = c.gamma;
  j["kernel"] = json{{"shape", c.kernel.shape}, {"width", c.kernel.width}, {"width_eps", c.kernel.width_eps}};
  j["scheme"] = c.scheme;
  j["T"] = c.T;
  if (c.dt > 0.0)
    j["dt"] = c.dt;
  else
    j["dt"] = "auto";
  j["store_stride"] = c.store_stride;
  j["seed"] = c.seed;
  j["n_samples"] = c.n_samples;
  j["workers"] = c.workers;
  j["output"] = c.output;
  j["save_trajectories"] = c.save_trajectories;
  j["cost_scaling"] = c.cost_scaling;
  j["initial"] = json{{"type", c.initial.type},           {"value", c.initial.value},
                      {"mean", c.initial.mean},           {"amplitude", c.initial.amplitude},
                      {"mode", c.initial.mode},           {"positions", c.initial.positions},
                      {"states", c.initial.states}};
  j["profile"] = json{{"type", c.profile.type},   {"T", c.profile.T},
                      {"u_left", c.profile.u_left}, {"u_right", c.profile.u_right},
                      {"x0", c.profile.x0},       {"positions", c.profile.positions},
                      {"states", c.profile.states}, {"n_intervals", c.profile.n_intervals}};
  j["young"] = json{{"type", c.young.type}, {"atoms", c.young.atoms}, {"n_intervals", c.young.n_intervals}};
  j["target"] = json{{"type", c.target.type},
                     {"speed", c.target.speed},
                     {"amplitude", c.target.amplitude},
                     {"mean", c.target.mean},
                     {"n_intervals", c.target.n_intervals}};
  j["event"] = json{{"type", c.event.type}, {"threshold", c.event.threshold}};
  j["entropy"] = json{{"eta", c.entropy.eta},
                      {"k", c.entropy.k},
                      {"phi_x", detail::plateau_json(c.entropy.phi_x)},
                      {"phi_t", detail::plateau_json(c.entropy.phi_t)}};
  j["bernstein"] = json{{"n_paths", c.bernstein.n_paths}, {"steps", c.bernstein.steps},
                        {"horizon", c.bernstein.horizon}, {"realized_qv", c.bernstein.realized_qv},
                        {"zeta", c.bernstein.zeta},       {"shapes", shapes}};
  j["rfun"] = json{{"points", c.rfun.points}};
  return j;
}

inline std::string serialize(const ExperimentConfig& c) { return to_json(c).dump(2) + "\n"; }

/// Parses JSON text; syntax errors report line and column, field errors the field path.
inline ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n')
        ++line, col = 1;
      else
        ++col;
    }
    throw ConfigError("config syntax error at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                      e.what());
  }
  return from_json(j);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace sclaw::cli
