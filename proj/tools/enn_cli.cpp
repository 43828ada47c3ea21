#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "enn/harness.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kFitNotConverged = 3;
constexpr int kSolverFailure = 4;

struct CommonFlags {
  std::string config;
  std::string preset;
  std::string flux;
  std::optional<double> epsilon;
  std::optional<double> d_star;
  std::optional<double> tau;
  std::optional<double> t_max;
  std::string times;
  std::string reference;
  std::optional<int> max_knots;
  bool literal_merge = false;
  std::string out_dir = "enn_out";
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "JSON configuration file");
  app->add_option("--preset", f.preset, "Problem preset")
      ->check(CLI::IsMember(enn::preset_names()));
  app->add_option("--flux", f.flux, "linear | burgers (must match the preset)");
  app->add_option("--epsilon", f.epsilon, "Relative L2 fit tolerance");
  app->add_option("--dstar", f.d_star, "Shock pair width d*");
  app->add_option("--tau", f.tau, "Nominal time step");
  app->add_option("--tmax", f.t_max, "Final time T");
  app->add_option("--snapshot-times", f.times, "Comma separated output times");
  app->add_option("--reference", f.reference, "exact | weno");
  app->add_option("--max-knots", f.max_knots, "Knot budget of the fitter");
  app->add_flag("--literal-merge", f.literal_merge,
                "Keep merged shock pairs at the crossed-characteristic position");
  app->add_option("--out-dir", f.out_dir, "Output directory");
}

enn::ProblemSpec resolve(const CommonFlags& f) {
  enn::Overrides o;
  if (!f.config.empty()) o = enn::load_config(f.config);
  enn::Overrides cli;
  if (!f.preset.empty()) cli.preset = f.preset;
  if (!f.flux.empty()) cli.flux = f.flux;
  cli.epsilon = f.epsilon;
  cli.d_star = f.d_star;
  cli.tau = f.tau;
  cli.t_max = f.t_max;
  if (!f.times.empty()) cli.snapshot_times = enn::parse_time_list(f.times);
  if (!f.reference.empty()) cli.reference = enn::parse_reference_kind(f.reference);
  cli.max_knots = f.max_knots;
  if (f.literal_merge) cli.conservative_merge = false;
  o.merge_from(cli);
  if (!o.preset) throw enn::ConfigError("no preset given (use --preset or the config file)");
  return enn::apply_overrides(enn::make_preset(*o.preset), o);
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

int cmd_fit(const CommonFlags& f) {
  const enn::ProblemSpec spec = resolve(f);
  enn::FitConfig cfg;
  cfg.epsilon = spec.epsilon;
  cfg.max_knots = spec.max_knots;
  cfg.jumps = spec.initial_jumps;
  const enn::FitResult r = enn::fit(spec.initial, spec.a, spec.b, cfg);
  std::filesystem::create_directories(f.out_dir);
  write_file(std::filesystem::path(f.out_dir) / "fit_initial.json", enn::to_json(r.spline, 0.0));
  std::printf("initial: error=%.6e breakpoints=%zu converged=%s\n", r.error,
              r.spline.interior_count(), r.converged ? "yes" : "no");
  bool ok = r.converged;
  if (spec.boundary && spec.flux.is_linear()) {
    enn::FitConfig gc;
    gc.epsilon = spec.epsilon;
    gc.max_knots = spec.max_knots;
    const enn::FitResult g = enn::fit_boundary(*spec.boundary, spec.horizon, gc);
    write_file(std::filesystem::path(f.out_dir) / "fit_boundary.json", enn::to_json(g.spline, 0.0));
    std::printf("boundary: error=%.6e breakpoints=%zu converged=%s\n", g.error,
                g.spline.interior_count(), g.converged ? "yes" : "no");
    ok = ok && g.converged;
  }
  return ok ? 0 : kFitNotConverged;
}

int cmd_run(const CommonFlags& f) {
  const enn::ProblemSpec spec = resolve(f);
  enn::RunArtifacts run = enn::run_problem(spec);
  enn::write_artifacts(run, f.out_dir);
  std::printf("%-8s %-14s %s\n", "t", "relative L2", "n_k");
  for (const auto& row : run.errors.rows) {
    std::printf("%-8.4f %-14.6e %zu\n", row.t, row.relative, row.breakpoints);
  }
  for (const auto& c : run.cost.rows) {
    std::printf("%s: mesh points %zu, time steps %zu\n", c.method.c_str(), c.mesh_points,
                c.time_steps);
  }
  return 0;
}

int cmd_reference(const CommonFlags& f) {
  const enn::ProblemSpec spec = resolve(f);
  const enn::ReferenceSolution ref = enn::build_reference(spec);
  std::filesystem::create_directories(f.out_dir);
  const int cells = spec.weno.cells;
  const double dx = (spec.b - spec.a) / cells;
  for (std::size_t i = 0; i < ref.times.size(); ++i) {
    std::string csv = "x_center,u\n";
    char line[96];
    for (int c = 0; c < cells; ++c) {
      const double x = spec.a + (c + 0.5) * dx;
      std::snprintf(line, sizeof(line), "%.17g,%.17g\n", x, ref.values[i](x));
      csv += line;
    }
    char name[64];
    std::snprintf(name, sizeof(name), "reference_t%03zu_%.4f.csv", i, ref.times[i]);
    write_file(std::filesystem::path(f.out_dir) / name, csv);
  }
  std::printf("%s reference: %zu times, %d cells", enn::to_string(ref.kind).c_str(),
              ref.times.size(), cells);
  if (ref.kind == enn::ReferenceKind::kWeno) std::printf(", %ld steps", ref.weno_steps);
  std::printf("\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evolving-network solver for 1D scalar conservation laws"};
  app.require_subcommand(1);
  CommonFlags fit_flags, run_flags, ref_flags;
  CLI::App* fit = app.add_subcommand("fit", "Fit the initial and inflow data of a preset");
  CLI::App* run = app.add_subcommand("run", "Fit, solve and compare against the reference");
  CLI::App* reference = app.add_subcommand("reference", "Write the reference solution on a grid");
  add_common(fit, fit_flags);
  add_common(run, run_flags);
  add_common(reference, ref_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*fit) return cmd_fit(fit_flags);
    if (*run) return cmd_run(run_flags);
    return cmd_reference(ref_flags);
  } catch (const enn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const enn::FitNotConverged& e) {
    std::cerr << "fit not converged: " << e.what() << " (error " << e.result().error << ")\n";
    return kFitNotConverged;
  } catch (const enn::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolverFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
