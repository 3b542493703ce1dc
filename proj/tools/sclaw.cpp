// Command-line front end. Exit codes: 0 success, 1 usage error, 2 configuration error,
// 3 numerical failure (or a check reported by the command, e.g. failed hypotheses).

#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "sclaw/cli/commands.hpp"

namespace {

struct Overrides {
  std::string config, output, model, scheme;
  std::vector<double> eps;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_samples, n_cells;
  std::optional<unsigned> workers;
  std::optional<double> T, gamma;
  bool save = false, verbose = false, quiet = false, print_config = false;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("-c,--config", o.config, "JSON config file")->check(CLI::ExistingFile);
  sub->add_option("-o,--output", o.output, "output directory");
  sub->add_option("--workers", o.workers, "worker threads (0: one per core)");
  sub->add_option("--seed", o.seed, "master seed");
  sub->add_option("--eps", o.eps, "noise strengths")->delimiter(',');
  sub->add_option("--n-samples", o.n_samples, "Monte Carlo samples per eps");
  sub->add_option("--n-cells", o.n_cells, "grid cells");
  sub->add_option("--model", o.model, "model preset (tasep, burgers, linear)");
  sub->add_option("--scheme", o.scheme, "time stepper (em, split)");
  sub->add_option("-T,--horizon", o.T, "final time");
  sub->add_option("--gamma", o.gamma, "noise scaling exponent");
  sub->add_flag("--save-trajectories", o.save, "write binary trajectories (simulate)");
  sub->add_flag("--print-config", o.print_config, "print the expanded config and exit");
}

sclaw::cli::ExperimentConfig build(const std::string& command, const Overrides& o) {
  using namespace sclaw::cli;
  ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : load_config_or_manifest(o.config);
  if (!c.command.empty() && c.command != command)
    throw sclaw::ConfigError("config field 'command': file is for '" + c.command + "', invoked as '" + command + "'");
  c.command = command;
  if (!o.output.empty()) c.output = o.output;
  if (!o.model.empty()) c.model = ModelSpec{o.model, "custom", {}, {}, {}};
  if (!o.scheme.empty()) c.scheme = o.scheme;
  if (!o.eps.empty()) c.eps = o.eps;
  if (o.seed) c.seed = *o.seed;
  if (o.n_samples) c.n_samples = *o.n_samples;
  if (o.n_cells) c.grid.n_cells = *o.n_cells;
  if (o.workers) c.workers = *o.workers;
  if (o.T) c.T = *o.T;
  if (o.gamma) c.gamma = *o.gamma;
  if (o.save) c.save_trajectories = true;
  validate_config(c);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sclaw: small-noise stochastic conservation laws"};
  app.require_subcommand(1);
  app.set_version_flag("--version", sclaw::cli::kVersion);
  Overrides o;
  app.add_flag("-v,--verbose", o.verbose, "log progress to stderr");
  app.add_flag("-q,--quiet", o.quiet, "suppress warnings");

  const std::vector<std::pair<std::string, std::string>> subs{
      {"validate", "check the model hypotheses for each eps"},
      {"simulate", "Monte Carlo ensemble of the stochastic equation"},
      {"viscous", "deterministic viscous solution"},
      {"kruzkov", "entropy solution of the inviscid law"},
      {"riemann", "exact periodic Riemann solution against the numerical one"},
      {"entropy", "entropy production of a piecewise smooth profile"},
      {"hfun", "the jump-set functional H and splittability"},
      {"rfun", "the local rate R(w, c)"},
      {"ifun", "the rate functional of a sampled path"},
      {"youngi", "the rate functional of a Young measure field"},
      {"control", "optimal control of a target path and its cost"},
      {"tilt", "tilted simulation towards a target"},
      {"mc", "Monte Carlo probability of a deviation event"},
      {"bernstein", "Bernstein inequality check on Brownian paths"}};
  std::string chosen;
  for (const auto& [name, help] : subs) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub, o);
    sub->callback([&chosen, name = name] { chosen = name; });
  }
  std::string run_file;
  auto* run = app.add_subcommand("run", "rerun a config or manifest file");
  run->add_option("file", run_file, "config or manifest.json")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output", o.output, "output directory");
  run->add_option("--workers", o.workers, "worker threads (0: one per core)");
  run->callback([&chosen] { chosen = "run"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  if (o.verbose) sclaw::set_log_level(sclaw::LogLevel::Info);
  if (o.quiet) sclaw::set_log_level(sclaw::LogLevel::Quiet);

  try {
    sclaw::cli::ExperimentConfig cfg;
    if (chosen == "run") {
      cfg = sclaw::cli::load_config_or_manifest(run_file);
      if (!o.output.empty()) cfg.output = o.output;
      if (o.workers) cfg.workers = *o.workers;
      if (cfg.command.empty()) throw sclaw::ConfigError("config field 'command': required by 'run'");
      sclaw::cli::validate_config(cfg);
    } else {
      cfg = build(chosen, o);
      if (o.print_config) {
        std::cout << sclaw::cli::serialize(cfg);
        return 0;
      }
    }
    return sclaw::cli::run_command(cfg, std::cout);
  } catch (const sclaw::ConfigError& e) {
    std::cerr << "sclaw: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "sclaw: " << e.what() << "\n";
    return 3;
  }
}
