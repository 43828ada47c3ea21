#include "enn/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "enn/transport.hpp"

namespace enn {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> uniform_times(double horizon, int count) {
  std::vector<double> t;
  for (int i = 0; i <= count; ++i) t.push_back(horizon * i / count);
  return t;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10e", v);
  return buf;
}

}  // namespace

std::string to_string(ReferenceKind kind) {
  return kind == ReferenceKind::kExact ? "exact" : "weno";
}

ReferenceKind parse_reference_kind(const std::string& text) {
  if (text == "exact") return ReferenceKind::kExact;
  if (text == "weno") return ReferenceKind::kWeno;
  throw ConfigError("reference must be 'exact' or 'weno', got '" + text + "'");
}

void ProblemSpec::validate() const {
  if (!(a < b)) throw ConfigError("domain must satisfy a < b");
  if (!(horizon > 0.0)) throw ConfigError("horizon T must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
  if (!(d_star > 0.0)) throw ConfigError("d* must be positive");
  if (!(tau > 0.0)) throw ConfigError("tau must be positive");
  if (max_knots < 2) throw ConfigError("max_knots must be at least 2");
  if (!initial) throw ConfigError("initial data missing");
  if (output_times.empty()) throw ConfigError("no output times");
  for (double t : output_times) {
    if (t < 0.0 || t > horizon * (1.0 + 1e-12)) {
      throw ConfigError("output time outside [0, T]");
    }
  }
  if (reference == ReferenceKind::kExact && !ExactSolution::has_preset(name)) {
    throw ConfigError("preset '" + name + "' has no exact solution; use --reference weno");
  }
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "adv-disc-sine",         "adv-pw-smooth",       "adv-pw-constant",
      "burgers-riemann-shock", "burgers-rarefaction", "burgers-sine",
      "burgers-exp"};
  return names;
}

ProblemSpec make_preset(const std::string& name) {
  ProblemSpec p;
  p.name = name;
  if (name == "adv-disc-sine") {
    p.flux = FluxModel::Linear(1.0);
    p.a = -1.0;
    p.b = 1.0;
    p.horizon = 0.5;
    p.initial = [](double x) {
      if (x > -0.9 && x < -0.6) return std::sin(kPi * (x + 0.9)) / 0.3;
      if (x > -0.2 && x < 0.1) return -1.0;
      return 0.0;
    };
    p.initial_jumps = {-0.6, -0.2, 0.1};
    p.boundary = [](double) { return 0.0; };
    p.epsilon = 3e-2;
    p.output_times = {0.0, 0.25, 0.5};
  } else if (name == "adv-pw-smooth") {
    p.flux = FluxModel::Linear(1.0);
    p.a = 0.0;
    p.b = 1.0;
    p.horizon = 1.0;
    p.initial = [](double x) { return std::cos(x); };
    p.boundary = [](double t) { return std::sin(t); };
    p.epsilon = 3e-3;
    p.output_times = uniform_times(1.0, 4);
  } else if (name == "adv-pw-constant") {
    p.flux = FluxModel::Linear(1.0);
    p.a = -1.0;
    p.b = 1.0;
    p.horizon = 0.5;
    p.initial = [](double x) { return x <= 0.0 ? 1.0 : 0.0; };
    p.initial_jumps = {0.0};
    p.boundary = [](double) { return 1.0; };
    p.epsilon = 3e-2;
    p.output_times = {0.0, 0.25, 0.5};
  } else if (name == "burgers-riemann-shock") {
    p.flux = FluxModel::Burgers();
    p.a = -1.0;
    p.b = 1.0;
    p.horizon = 0.5;
    p.initial = [](double x) { return x < 0.0 ? 1.0 : 0.0; };
    p.initial_jumps = {0.0};
    p.epsilon = 3e-2;
    p.output_times = uniform_times(0.5, 5);
  } else if (name == "burgers-rarefaction") {
    p.flux = FluxModel::Burgers();
    p.a = -1.0;
    p.b = 1.0;
    p.horizon = 0.5;
    p.initial = [](double x) { return x < 0.0 ? -1.0 : 1.0; };
    p.initial_jumps = {0.0};
    p.epsilon = 3e-2;
    p.output_times = uniform_times(0.5, 5);
  } else if (name == "burgers-sine") {
    p.flux = FluxModel::Burgers();
    p.a = 0.0;
    p.b = 1.0;
    p.horizon = 0.5;
    p.initial = [](double x) { return std::sin(2.0 * kPi * x); };
    p.epsilon = 1e-3;
    p.output_times = uniform_times(0.5, 5);
    p.reference = ReferenceKind::kWeno;
    p.weno.cells = 1000;
    p.weno.dt = 2e-4;
    p.weno.boundary = WenoBoundary::kPeriodic;
  } else if (name == "burgers-exp") {
    p.flux = FluxModel::Burgers();
    p.a = -1.0;
    p.b = 1.0;
    p.horizon = 1.0;
    p.initial = [](double x) { return std::exp(-16.0 * x * x); };
    p.epsilon = 1e-3;
    p.output_times = uniform_times(1.0, 5);
    p.reference = ReferenceKind::kWeno;
    p.weno.cells = 2000;
    p.weno.dt = 2e-4;
    p.weno.boundary = WenoBoundary::kOutflow;
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  p.d_star = 1e-3 * (p.b - p.a);
  p.tau = p.horizon / 100.0;
  p.weno.a = p.a;
  p.weno.b = p.b;
  if (p.reference == ReferenceKind::kExact) {
    p.weno.cells = static_cast<int>(std::lround(1000 * (p.b - p.a)));
    p.weno.dt = 2e-4;
    p.weno.boundary = WenoBoundary::kOutflow;
  }
  return p;
}

void Overrides::merge_from(const Overrides& o) {
  if (o.preset) preset = o.preset;
  if (o.flux) flux = o.flux;
  if (o.epsilon) epsilon = o.epsilon;
  if (o.d_star) d_star = o.d_star;
  if (o.tau) tau = o.tau;
  if (o.t_max) t_max = o.t_max;
  if (o.snapshot_times) snapshot_times = o.snapshot_times;
  if (o.reference) reference = o.reference;
  if (o.max_knots) max_knots = o.max_knots;
  if (o.weno_cells) weno_cells = o.weno_cells;
  if (o.weno_dt) weno_dt = o.weno_dt;
  if (o.conservative_merge) conservative_merge = o.conservative_merge;
}

Overrides parse_config(const std::string& text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  static const std::vector<std::string> known = {
      "preset", "flux", "epsilon", "d_star", "tau", "t_max", "snapshot_times",
      "reference", "max_knots", "weno", "conservative_merge"};
  for (const auto& [key, _] : doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  Overrides o;
  try {
    if (doc.contains("preset")) o.preset = doc["preset"].get<std::string>();
    if (doc.contains("flux")) o.flux = doc["flux"].get<std::string>();
    if (doc.contains("epsilon")) o.epsilon = doc["epsilon"].get<double>();
    if (doc.contains("d_star")) o.d_star = doc["d_star"].get<double>();
    if (doc.contains("tau")) o.tau = doc["tau"].get<double>();
    if (doc.contains("t_max")) o.t_max = doc["t_max"].get<double>();
    if (doc.contains("snapshot_times")) {
      o.snapshot_times = doc["snapshot_times"].get<std::vector<double>>();
    }
    if (doc.contains("reference")) {
      o.reference = parse_reference_kind(doc["reference"].get<std::string>());
    }
    if (doc.contains("max_knots")) o.max_knots = doc["max_knots"].get<int>();
    if (doc.contains("conservative_merge")) {
      o.conservative_merge = doc["conservative_merge"].get<bool>();
    }
    if (doc.contains("weno")) {
      const json& w = doc["weno"];
      if (!w.is_object()) throw ConfigError("config: 'weno' must be an object");
      for (const auto& [key, _] : w.items()) {
        if (key != "cells" && key != "dt") throw ConfigError("config: unknown key 'weno." + key + "'");
      }
      if (w.contains("cells")) o.weno_cells = w["cells"].get<int>();
      if (w.contains("dt")) o.weno_dt = w["dt"].get<double>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return o;
}

Overrides load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::vector<double> parse_time_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("bad time value '" + item + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos) {
      throw ConfigError("bad time value '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty time list");
  return out;
}

ProblemSpec apply_overrides(ProblemSpec spec, const Overrides& o) {
  if (o.flux) {
    const std::string want = *o.flux;
    if (want != "linear" && want != "burgers") {
      throw ConfigError("flux must be 'linear' or 'burgers', got '" + want + "'");
    }
    if (want != spec.flux.name()) {
      throw ConfigError("preset '" + spec.name + "' uses the " + spec.flux.name() + " flux");
    }
  }
  if (o.epsilon) spec.epsilon = *o.epsilon;
  if (o.d_star) spec.d_star = *o.d_star;
  if (o.t_max) {
    spec.horizon = *o.t_max;
    if (!o.snapshot_times) {
      std::vector<double> kept;
      for (double t : spec.output_times) {
        if (t < spec.horizon) kept.push_back(t);
      }
      kept.push_back(spec.horizon);
      spec.output_times = kept;
    }
    if (!o.tau) spec.tau = spec.horizon / 100.0;
  }
  if (o.tau) spec.tau = *o.tau;
  if (o.snapshot_times) {
    spec.output_times = *o.snapshot_times;
    std::sort(spec.output_times.begin(), spec.output_times.end());
  }
  if (o.reference) spec.reference = *o.reference;
  if (o.max_knots) spec.max_knots = *o.max_knots;
  if (o.weno_cells) spec.weno.cells = *o.weno_cells;
  if (o.weno_dt) spec.weno.dt = *o.weno_dt;
  if (o.conservative_merge) spec.conservative_merge = *o.conservative_merge;
  spec.validate();
  return spec;
}

ReferenceSolution build_reference(const ProblemSpec& spec) {
  ReferenceSolution ref;
  ref.kind = spec.reference;
  ref.times = spec.output_times;
  std::sort(ref.times.begin(), ref.times.end());
  if (spec.reference == ReferenceKind::kExact) {
    const ExactSolution exact = ExactSolution::preset(spec.name);
    for (double t : ref.times) {
      ref.values.push_back(exact.at(t));
      ref.breaks.push_back(exact.breaks(t));
    }
    return ref;
  }
  WenoResult w = weno_solve(spec.initial, spec.weno, spec.flux, ref.times);
  ref.weno_steps = w.steps;
  ref.weno_cells = spec.weno.cells;
  for (std::size_t i = 0; i < w.snapshots.size(); ++i) {
    ref.values.push_back(w.interpolant(i));
    ref.breaks.push_back(w.centers);
  }
  return ref;
}

std::string ErrorTable::to_csv() const {
  std::string out = "t,relative_l2,absolute_l2,breakpoints\n";
  for (const auto& r : rows) {
    out += format_double(r.t) + "," + format_double(r.relative) + "," +
           format_double(r.absolute) + "," + std::to_string(r.breakpoints) + "\n";
  }
  return out;
}

ErrorTable compare(const std::vector<Snapshot>& snapshots, const ReferenceSolution& ref,
                   double tolerance) {
  ErrorTable table;
  for (const auto& snap : snapshots) {
    std::size_t best = ref.times.size();
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ref.times.size(); ++i) {
      const double g = std::abs(ref.times[i] - snap.t);
      if (g < gap) {
        gap = g;
        best = i;
      }
    }
    if (best == ref.times.size() || gap > tolerance) {
      throw ConfigError("compare: no reference within tolerance of t=" + std::to_string(snap.t));
    }
    QuadratureOptions quad;
    quad.breaks = ref.breaks[best];
    const LpError e = lp_error(snap.spline, ref.values[best], 2.0, quad);
    table.rows.push_back({snap.t, e.value, e.absolute, snap.spline.interior_count()});
  }
  return table;
}

std::string CostTable::to_csv() const {
  std::string out = "method,mesh_points,time_steps\n";
  for (const auto& r : rows) {
    out += r.method + "," + std::to_string(r.mesh_points) + "," + std::to_string(r.time_steps) + "\n";
  }
  return out;
}

RunArtifacts run_problem(const ProblemSpec& spec) {
  spec.validate();
  RunArtifacts run;
  run.spec = spec;

  FitConfig fc;
  fc.epsilon = spec.epsilon;
  fc.max_knots = spec.max_knots;
  fc.jumps = spec.initial_jumps;
  run.initial_fit = fit(spec.initial, spec.a, spec.b, fc);
  if (!run.initial_fit.converged) {
    throw FitNotConverged("initial data fit did not reach epsilon", run.initial_fit);
  }

  std::vector<double> times = spec.output_times;
  std::sort(times.begin(), times.end());
  if (spec.flux.is_linear()) {
    LinearSetup setup;
    setup.initial = run.initial_fit.spline;
    setup.flux = spec.flux;
    setup.tau = spec.tau;
    if (spec.boundary) {
      FitConfig gc;
      gc.epsilon = spec.epsilon;
      gc.max_knots = spec.max_knots;
      run.boundary_fit = fit_boundary(*spec.boundary, spec.horizon, gc);
      if (!run.boundary_fit->converged) {
        throw FitNotConverged("boundary data fit did not reach epsilon", *run.boundary_fit);
      }
      setup.boundary = run.boundary_fit->spline;
    }
    RunResult r = run_linear(setup, times);
    run.snapshots = std::move(r.snapshots);
    run.trace = std::move(r.trace);
  } else {
    BurgersConfig cfg;
    cfg.d_star = spec.d_star;
    cfg.tau = spec.tau;
    cfg.conservative_merge = spec.conservative_merge;
    BurgersRunResult r = run_burgers(run.initial_fit.spline, times, cfg);
    run.snapshots = std::move(r.snapshots);
    run.trace = std::move(r.trace);
    run.audits = std::move(r.audits);
  }

  run.reference = build_reference(spec);
  run.errors = compare(run.snapshots, run.reference, 0.5 * spec.tau);
  run.cost.rows.push_back({"ENN", run.trace.max_breakpoints() + 2, run.trace.step_count()});
  if (run.reference.kind == ReferenceKind::kWeno) {
    run.cost.rows.push_back({"WENO", static_cast<std::size_t>(run.reference.weno_cells),
                             static_cast<std::size_t>(run.reference.weno_steps)});
  }
  return run;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string trace_text(const RunArtifacts& run) {
  std::string out;
  char line[200];
  std::snprintf(line, sizeof(line), "preset=%s flux=%s epsilon=%.6g d_star=%.6g tau=%.6g\n",
                run.spec.name.c_str(), run.spec.flux.name().c_str(), run.spec.epsilon,
                run.spec.d_star, run.spec.tau);
  out += line;
  std::snprintf(line, sizeof(line), "fit error=%.10e breakpoints=%zu\n", run.initial_fit.error,
                run.initial_fit.spline.interior_count());
  out += line;
  if (run.boundary_fit) {
    std::snprintf(line, sizeof(line), "boundary fit error=%.10e breakpoints=%zu\n",
                  run.boundary_fit->error, run.boundary_fit->spline.interior_count());
    out += line;
  }
  for (std::size_t k = 0; k < run.trace.steps.size(); ++k) {
    const StepRecord& s = run.trace.steps[k];
    std::snprintf(line, sizeof(line), "step=%zu t=%.10g tau=%.10g n=%zu\n", k + 1, s.t, s.tau,
                  s.breakpoints);
    out += line;
    for (const StepEvent& e : s.events) {
      std::snprintf(line, sizeof(line), "t=%.10g event=%s l=%d tau=%.10g\n", s.t,
                    to_string(e.kind).c_str(), e.index, e.tau);
      out += line;
    }
  }
  return out;
}

std::string snapshot_stem(std::size_t index, double t) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "t%03zu_%.4f", index, t);
  return buf;
}

}  // namespace

void write_artifacts(const RunArtifacts& run, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir / "snapshots");
  fs::create_directories(out_dir / "plots");
  for (std::size_t i = 0; i < run.snapshots.size(); ++i) {
    const Snapshot& s = run.snapshots[i];
    const std::string stem = snapshot_stem(i, s.t);
    write_text(out_dir / "snapshots" / (stem + ".json"), to_json(s.spline, s.t));
    const ScalarFunction* ref = nullptr;
    for (std::size_t j = 0; j < run.reference.times.size(); ++j) {
      if (std::abs(run.reference.times[j] - s.t) <= 0.5 * run.spec.tau) {
        ref = &run.reference.values[j];
      }
    }
    emit_plot(s, ref, out_dir / "plots" / (stem + ".svg"));
  }
  write_text(out_dir / "errors.csv", run.errors.to_csv());
  write_text(out_dir / "cost.csv", run.cost.to_csv());
  write_text(out_dir / "trace.log", trace_text(run));
}

RunArtifacts run_preset(const std::string& name, const Overrides& overrides,
                        const std::filesystem::path& out_dir) {
  const ProblemSpec spec = apply_overrides(make_preset(name), overrides);
  RunArtifacts run = run_problem(spec);
  write_artifacts(run, out_dir);
  return run;
}

}  // namespace enn
