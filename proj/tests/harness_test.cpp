#include "enn/harness.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

namespace enn {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("enn_harness_test_" + name);
  fs::remove_all(p);
  return p;
}

TEST(Presets, AllNamesBuildAndValidate) {
  ASSERT_EQ(preset_names().size(), 7u);
  for (const std::string& name : preset_names()) {
    const ProblemSpec p = make_preset(name);
    EXPECT_NO_THROW(p.validate()) << name;
    EXPECT_DOUBLE_EQ(p.d_star, 1e-3 * (p.b - p.a));
    EXPECT_DOUBLE_EQ(p.tau, p.horizon / 100.0);
  }
  EXPECT_THROW(make_preset("heat"), ConfigError);
}

TEST(Presets, ReferenceKinds) {
  EXPECT_EQ(make_preset("burgers-sine").reference, ReferenceKind::kWeno);
  EXPECT_EQ(make_preset("burgers-exp").reference, ReferenceKind::kWeno);
  EXPECT_EQ(make_preset("adv-disc-sine").reference, ReferenceKind::kExact);
  EXPECT_TRUE(make_preset("adv-disc-sine").flux.is_linear());
  EXPECT_FALSE(make_preset("burgers-rarefaction").flux.is_linear());
}

TEST(Config, ParsesAllKeys) {
  const Overrides o = parse_config(R"({
    "preset": "burgers-sine", "flux": "burgers", "epsilon": 0.002, "d_star": 0.004,
    "tau": 0.01, "t_max": 0.3, "snapshot_times": [0.1, 0.3], "reference": "weno",
    "max_knots": 150, "weno": {"cells": 500, "dt": 0.0004}, "conservative_merge": false})");
  EXPECT_EQ(*o.preset, "burgers-sine");
  EXPECT_EQ(*o.flux, "burgers");
  EXPECT_DOUBLE_EQ(*o.epsilon, 0.002);
  EXPECT_DOUBLE_EQ(*o.d_star, 0.004);
  EXPECT_DOUBLE_EQ(*o.tau, 0.01);
  EXPECT_DOUBLE_EQ(*o.t_max, 0.3);
  EXPECT_EQ(o.snapshot_times->size(), 2u);
  EXPECT_EQ(*o.reference, ReferenceKind::kWeno);
  EXPECT_EQ(*o.max_knots, 150);
  EXPECT_EQ(*o.weno_cells, 500);
  EXPECT_DOUBLE_EQ(*o.weno_dt, 0.0004);
  EXPECT_FALSE(*o.conservative_merge);
}

TEST(Config, RejectsMalformedDocuments) {
  EXPECT_THROW(parse_config("{"), ConfigError);
  EXPECT_THROW(parse_config("[1, 2]"), ConfigError);
  EXPECT_THROW(parse_config(R"({"epsilonn": 0.1})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"weno": {"cfl": 0.4}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"epsilon": "small"})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"reference": "spectral"})"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/enn.json"), ConfigError);
}

TEST(Config, LaterOverridesWin) {
  Overrides file = parse_config(R"({"epsilon": 0.01, "tau": 0.02})");
  Overrides flags;
  flags.epsilon = 0.05;
  file.merge_from(flags);
  EXPECT_DOUBLE_EQ(*file.epsilon, 0.05);
  EXPECT_DOUBLE_EQ(*file.tau, 0.02);
}

TEST(Config, AppliesOverridesToPreset) {
  Overrides o;
  o.t_max = 0.3;
  o.epsilon = 0.02;
  const ProblemSpec p = apply_overrides(make_preset("burgers-rarefaction"), o);
  EXPECT_DOUBLE_EQ(p.horizon, 0.3);
  EXPECT_DOUBLE_EQ(p.tau, 0.003);
  EXPECT_DOUBLE_EQ(p.epsilon, 0.02);
  EXPECT_DOUBLE_EQ(p.output_times.back(), 0.3);
  for (double t : p.output_times) EXPECT_LE(t, 0.3);
}

TEST(Config, RejectsInconsistentOverrides) {
  Overrides flux;
  flux.flux = "linear";
  EXPECT_THROW(apply_overrides(make_preset("burgers-sine"), flux), ConfigError);
  flux.flux = "heat";
  EXPECT_THROW(apply_overrides(make_preset("burgers-sine"), flux), ConfigError);
  Overrides eps;
  eps.epsilon = -1.0;
  EXPECT_THROW(apply_overrides(make_preset("adv-disc-sine"), eps), ConfigError);
  Overrides ref;
  ref.reference = ReferenceKind::kExact;
  EXPECT_THROW(apply_overrides(make_preset("burgers-exp"), ref), ConfigError);
  Overrides late;
  late.snapshot_times = std::vector<double>{0.1, 7.0};
  EXPECT_THROW(apply_overrides(make_preset("adv-disc-sine"), late), ConfigError);
}

TEST(TimeList, ParsesCommaSeparatedValues) {
  const std::vector<double> t = parse_time_list("0,0.25, 0.5");
  ASSERT_EQ(t.size(), 3u);
  EXPECT_DOUBLE_EQ(t[1], 0.25);
  EXPECT_DOUBLE_EQ(t[2], 0.5);
  EXPECT_THROW(parse_time_list(""), ConfigError);
  EXPECT_THROW(parse_time_list("0.1,abc"), ConfigError);
  EXPECT_THROW(parse_time_list("0.1x"), ConfigError);
}

TEST(Compare, IdenticalFunctionsGiveZero) {
  const FreeKnotSpline s({0.0, 0.3, 1.0}, {1.0, 2.0, 0.5});
  ReferenceSolution ref;
  ref.times = {0.5};
  ref.values = {s.as_function()};
  ref.breaks = {{}};
  const ErrorTable t = compare({{0.5, s}}, ref, 1e-9);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_LE(t.rows[0].relative, 1e-15);
  EXPECT_LE(t.rows[0].absolute, 1e-15);
  EXPECT_EQ(t.rows[0].breakpoints, 1u);
  EXPECT_THROW(compare({{0.7, s}}, ref, 1e-3), ConfigError);
}

TEST(Tables, CsvLayout) {
  ErrorTable e;
  e.rows.push_back({0.5, 0.25, 0.125, 7});
  EXPECT_EQ(e.to_csv(),
            "t,relative_l2,absolute_l2,breakpoints\n"
            "5.0000000000e-01,2.5000000000e-01,1.2500000000e-01,7\n");
  CostTable c;
  c.rows.push_back({"ENN", 41, 165});
  EXPECT_EQ(c.to_csv(), "method,mesh_points,time_steps\nENN,41,165\n");
}

TEST(Plot, ZeroFunctionIsFlatAndWellFormed) {
  const FreeKnotSpline zero = FreeKnotSpline::Linear(0.0, 1.0, 0.0, 0.0);
  const std::string svg = render_plot(zero, nullptr, "zero");
  EXPECT_EQ(svg.rfind("<svg", 0) == 0 || svg.rfind("<?xml", 0) == 0, true);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_EQ(count(svg, "<polyline"), 1u);
  std::smatch m;
  const std::string poly = svg.substr(svg.find("<polyline"));
  ASSERT_TRUE(std::regex_search(poly, m, std::regex(R"(points=\"([^\"]*)\")")));
  std::stringstream pts(m[1].str());
  std::string pair;
  std::set<std::string> ys;
  while (pts >> pair) ys.insert(pair.substr(pair.find(',') + 1));
  EXPECT_EQ(ys.size(), 1u);
}

TEST(Plot, OneTickPerKnotAndDeterministic) {
  std::vector<double> x;
  std::vector<double> u;
  for (int i = 0; i < 25; ++i) {
    x.push_back(i / 24.0);
    u.push_back(std::sin(i * 0.7));
  }
  const FreeKnotSpline s(x, u);
  const ScalarFunction ref = [](double v) { return std::sin(v); };
  const std::string svg = render_plot(s, &ref, "t=0.5");
  EXPECT_EQ(count(svg, "class=\"tick\""), 25u);
  EXPECT_EQ(count(svg, "class=\"reference\""), 1u);
  EXPECT_EQ(svg, render_plot(s, &ref, "t=0.5"));
}

TEST(RunProblem, RarefactionTablesAreConsistent) {
  const RunArtifacts run = run_problem(make_preset("burgers-rarefaction"));
  ASSERT_EQ(run.snapshots.size(), run.spec.output_times.size());
  ASSERT_EQ(run.errors.rows.size(), run.snapshots.size());
  for (std::size_t i = 2; i < run.errors.rows.size(); ++i) {
    EXPECT_LT(run.errors.rows[i].relative, run.errors.rows[i - 1].relative);
  }
  ASSERT_EQ(run.cost.rows.size(), 1u);
  EXPECT_EQ(run.cost.rows[0].method, "ENN");
  EXPECT_EQ(run.cost.rows[0].time_steps, run.trace.step_count());
  EXPECT_EQ(run.cost.rows[0].mesh_points, run.trace.max_breakpoints() + 2);
}

TEST(RunProblem, UnreachableToleranceRaisesFitError) {
  Overrides o;
  o.epsilon = 1e-6;
  o.max_knots = 4;
  const ProblemSpec p = apply_overrides(make_preset("adv-disc-sine"), o);
  EXPECT_THROW(run_problem(p), FitNotConverged);
}

TEST(Artifacts, WritesExpectedFilesReproducibly) {
  const fs::path first = scratch_dir("a");
  const fs::path second = scratch_dir("b");
  run_preset("adv-disc-sine", {}, first);
  run_preset("adv-disc-sine", {}, second);
  for (const char* f : {"errors.csv", "cost.csv", "trace.log"}) {
    ASSERT_TRUE(fs::exists(first / f)) << f;
    EXPECT_EQ(slurp(first / f), slurp(second / f)) << f;
  }
  std::size_t snaps = 0;
  for (const auto& entry : fs::directory_iterator(first / "snapshots")) {
    const fs::path name = entry.path().filename();
    EXPECT_EQ(slurp(entry.path()), slurp(second / "snapshots" / name));
    const fs::path plot = first / "plots" / name.stem().concat(".svg");
    EXPECT_TRUE(fs::exists(plot)) << plot;
    ++snaps;
  }
  EXPECT_EQ(snaps, 3u);
  const std::string log = slurp(first / "trace.log");
  EXPECT_NE(log.find("step=1 "), std::string::npos);
  fs::remove_all(first);
  fs::remove_all(second);
}

TEST(Artifacts, EventLinesUseDocumentedFormat) {
  const fs::path dir = scratch_dir("events");
  run_preset("burgers-riemann-shock", {}, dir);
  const std::string log = slurp(dir / "trace.log");
  const std::regex line(R"(t=[0-9.e+-]+ event=(shock-formed|truncated|merged|cfv|fallback-root|shock-dropped) l=-?[0-9]+ tau=[0-9.e+-]+)");
  EXPECT_TRUE(std::regex_search(log, line));
  EXPECT_NE(log.find("event=cfv"), std::string::npos);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace enn
