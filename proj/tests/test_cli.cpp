#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sclaw/cli/commands.hpp"

using namespace sclaw;
using namespace sclaw::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
};

Result run_cli(const std::string& args) {
  const std::string cmd = std::string(SCLAW_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, {}};
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int st = pclose(pipe);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("sclaw_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Config, DefaultsRoundTrip) {
  const auto a = serialize(parse_config("{}"));
  EXPECT_EQ(serialize(parse_config(a)), a);
}

TEST(Config, EveryFieldSurvivesRoundTrip) {
  const std::string text = R"json({
    "command": "tilt", "model": {"preset": "", "name": "q", "f": [0, 1, -1], "D": [1], "a2": [0, 1, -1]},
    "grid": {"n_cells": 100, "cells_per_eps": 8}, "eps": [0.2, 0.1], "gamma": 1.25,
    "kernel": {"shape": "gaussian", "width": 0.3}, "scheme": "split(4)", "T": 0.5, "dt": 0.001, "store_stride": 3,
    "seed": 99, "n_samples": 7, "workers": 2, "output": "x/y", "save_trajectories": true,
    "cost_scaling": "second_order",
    "initial": {"type": "riemann", "positions": [0.1, 0.6], "states": [0.3, 0.7]},
    "target": {"type": "kruzkov"}, "event": {"type": "always", "threshold": 0.1},
    "entropy": {"eta": "kruzkov", "k": 0.4},
    "bernstein": {"n_paths": 10, "steps": 5, "zeta": [1], "shapes": [{"type": "log", "a": 1, "b": 2}]},
    "rfun": {"points": [[0.5, 0.0], [0.3, 0.1]]}
  })json";
  const auto c = parse_config(text);
  EXPECT_EQ(c.model.name, "q");
  EXPECT_EQ(c.grid.cells_per_eps, 8.0);
  EXPECT_EQ(c.eps.size(), 2u);
  EXPECT_EQ(c.store_stride, 3u);
  EXPECT_EQ(c.bernstein.shapes.at(0).type, "log");
  EXPECT_EQ(c.rfun.points.at(1).at(1), 0.1);
  const auto s = serialize(c);
  EXPECT_EQ(serialize(parse_config(s)), s);
}

TEST(Config, ScalarEpsAccepted) { EXPECT_EQ(parse_config(R"({"eps": 0.05})").eps, std::vector<double>{0.05}); }

TEST(Config, DiagnosticsNameTheField) {
  EXPECT_NE(config_error(R"({"grid": {"n_cels": 3}})").find("grid.n_cels"), std::string::npos);
  EXPECT_NE(config_error(R"({"gamma": "big"})").find("gamma"), std::string::npos);
  EXPECT_NE(config_error(R"({"eps": [0.1, -1]})").find("eps"), std::string::npos);
  EXPECT_NE(config_error(R"({"model": {"preset": "kpz"}})").find("model.preset"), std::string::npos);
  EXPECT_NE(config_error(R"({"command": "fly"})").find("command"), std::string::npos);
  EXPECT_NE(config_error("{\n  \"T\": 1,\n  oops\n}").find("line 3"), std::string::npos);
}

TEST(Cli, ValidateTasepSucceeds) {
  const auto d = scratch("validate");
  const auto r = run_cli("validate --model tasep -o " + d.string());
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("verdict pass"), std::string::npos) << r.out;
  EXPECT_TRUE(fs::exists(d / "validate.csv"));
  EXPECT_TRUE(fs::exists(d / "manifest.json"));
}

TEST(Cli, BundledShockConfigPrintsH) {
  const auto d = scratch("hfun");
  const auto r = run_cli("run " + std::string(SCLAW_SOURCE_DIR) + "/tools/configs/anti_entropic_shock.json -o " + d.string());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto at = r.out.find("H = ");
  ASSERT_NE(at, std::string::npos) << r.out;
  EXPECT_NEAR(std::stod(r.out.substr(at + 4)), 0.156386, 1e-6);
}

TEST(Cli, ManifestRerunIsByteIdentical) {
  const auto a = scratch("mc_a"), b = scratch("mc_b");
  const auto r1 = run_cli("mc --eps 0.3,0.2 --n-samples 8 --n-cells 64 -T 0.1 --seed 5 --workers 1 -o " + a.string());
  ASSERT_EQ(r1.code, 0) << r1.out;
  const auto r2 = run_cli("run " + (a / "manifest.json").string() + " --workers 2 -o " + b.string());
  ASSERT_EQ(r2.code, 0) << r2.out;
  EXPECT_EQ(slurp(a / "aggregate.csv"), slurp(b / "aggregate.csv"));
  EXPECT_EQ(slurp(a / "runs.csv"), slurp(b / "runs.csv"));
  const auto man = slurp(a / "manifest.json");
  EXPECT_NE(man.find("\"versions\""), std::string::npos);
  EXPECT_NE(man.find("\"seeds\""), std::string::npos);
}

TEST(Cli, ExitCodes) {
  const auto d = scratch("codes");
  EXPECT_EQ(run_cli("").code, 1);
  EXPECT_EQ(run_cli("simulate --no-such-flag").code, 1);
  EXPECT_EQ(run_cli("--version").code, 0);

  const auto bad = d / "bad.json";
  std::ofstream(bad) << R"({"grid": {"cells": 4}})";
  const auto r = run_cli("simulate -c " + bad.string() + " -o " + d.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("grid.cells"), std::string::npos) << r.out;
  EXPECT_EQ(run_cli("simulate --model kpz -o " + d.string()).code, 2);

  // Burgers fan interaction comes before T = 5 for these data: a numerical precondition.
  EXPECT_EQ(run_cli("riemann --model burgers -T 5 -o " + d.string()).code, 3);
}

TEST(Cli, PrintConfigExpandsDefaults) {
  const auto r = run_cli("tilt --eps 0.2 --print-config");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto c = parse_config(r.out);
  EXPECT_EQ(c.command, "tilt");
  EXPECT_EQ(c.eps, std::vector<double>{0.2});
}

TEST(Csv, NumbersRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) EXPECT_EQ(std::stod(num(v)), v);
  EXPECT_EQ(num(0.1), "0.1");
  Csv c({"a", "b"});
  c.row(1, 0.5);
  EXPECT_EQ(c.text(), "a,b\n1,0.5\n");
  EXPECT_THROW(c.row(1), StructuralError);
}

TEST(Plot, SvgIsWellFormedAndSkipsNonFinite) {
  const auto s = svg_line_plot("t", "x", "y", {{"a", {1, 2, 3}, {1, NAN, 2}}}, true);
  EXPECT_EQ(s.rfind("<svg", 0), 0u);
  EXPECT_NE(s.find("</svg>"), std::string::npos);
  EXPECT_EQ(s.find("nan"), std::string::npos);
}
