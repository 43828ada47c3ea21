#ifndef ENN_HARNESS_HPP_
#define ENN_HARNESS_HPP_

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "enn/burgers.hpp"
#include "enn/data_fit.hpp"
#include "enn/flux.hpp"
#include "enn/reference.hpp"
#include "enn/spline.hpp"
#include "enn/trace.hpp"

namespace enn {

enum class ReferenceKind { kExact, kWeno };

std::string to_string(ReferenceKind kind);
ReferenceKind parse_reference_kind(const std::string& text);

struct ProblemSpec {
  std::string name;
  FluxModel flux = FluxModel::Linear(1.0);
  double a = 0.0;
  double b = 1.0;
  double horizon = 1.0;  // T
  ScalarFunction initial;
  std::vector<double> initial_jumps;
  /// Inflow data g(t); linear flux only.
  std::optional<ScalarFunction> boundary;
  double epsilon = 1e-3;
  double d_star = 1e-3;
  double tau = 1e-2;
  int max_knots = 200;
  std::vector<double> output_times;
  ReferenceKind reference = ReferenceKind::kExact;
  WenoConfig weno;
  bool conservative_merge = true;

  /// Throws ConfigError when the fields are inconsistent.
  void validate() const;
};

const std::vector<std::string>& preset_names();

/// Defaults: d* = 1e-3 (b - a), tau = T / 100. Throws ConfigError.
ProblemSpec make_preset(const std::string& name);

/// Values that replace preset defaults; unset fields keep the preset value.
struct Overrides {
  std::optional<std::string> preset;
  std::optional<std::string> flux;  // must agree with the preset
  std::optional<double> epsilon;
  std::optional<double> d_star;
  std::optional<double> tau;
  std::optional<double> t_max;
  std::optional<std::vector<double>> snapshot_times;
  std::optional<ReferenceKind> reference;
  std::optional<int> max_knots;
  std::optional<int> weno_cells;
  std::optional<double> weno_dt;
  std::optional<bool> conservative_merge;

  /// Fields set in `other` win.
  void merge_from(const Overrides& other);
};

/// Parses a JSON configuration document:
/// {"preset": .., "flux": .., "epsilon": .., "d_star": .., "tau": ..,
///  "t_max": .., "snapshot_times": [..], "reference": "exact"|"weno",
///  "max_knots": .., "weno": {"cells": .., "dt": ..},
///  "conservative_merge": true|false}
Overrides parse_config(const std::string& text);
Overrides load_config(const std::filesystem::path& path);

ProblemSpec apply_overrides(ProblemSpec spec, const Overrides& o);

/// Comma separated list of times, e.g. "0,0.25,0.5".
std::vector<double> parse_time_list(const std::string& text);

class FitNotConverged : public std::runtime_error {
 public:
  FitNotConverged(const std::string& what, FitResult result)
      : std::runtime_error(what), result_(std::move(result)) {}
  const FitResult& result() const { return result_; }

 private:
  FitResult result_;
};

/// Reference solution at a given time, with optional quadrature breaks.
struct ReferenceSolution {
  ReferenceKind kind = ReferenceKind::kExact;
  std::vector<double> times;
  std::vector<ScalarFunction> values;
  std::vector<std::vector<double>> breaks;
  long weno_steps = 0;
  int weno_cells = 0;
};

ReferenceSolution build_reference(const ProblemSpec& spec);

struct ErrorRow {
  double t = 0.0;
  double relative = 0.0;
  double absolute = 0.0;
  std::size_t breakpoints = 0;
};

struct ErrorTable {
  std::vector<ErrorRow> rows;
  std::string to_csv() const;
};

/// Relative L2 error of each snapshot against the reference at the nearest
/// reference time. Throws ConfigError when no reference time lies within
/// `tolerance` of a snapshot.
ErrorTable compare(const std::vector<Snapshot>& snapshots, const ReferenceSolution& ref,
                   double tolerance);

struct CostRow {
  std::string method;
  std::size_t mesh_points = 0;
  std::size_t time_steps = 0;
};

struct CostTable {
  std::vector<CostRow> rows;
  std::string to_csv() const;
};

struct RunArtifacts {
  ProblemSpec spec;
  FitResult initial_fit;
  std::optional<FitResult> boundary_fit;
  std::vector<Snapshot> snapshots;
  RunTrace trace;
  std::vector<CfvAudit> audits;
  ReferenceSolution reference;
  ErrorTable errors;
  CostTable cost;
};

/// Fit, solve and compare without touching the file system. Throws
/// FitNotConverged, SolverError or ConfigError.
RunArtifacts run_problem(const ProblemSpec& spec);

/// snapshots/*.json, errors.csv, cost.csv, trace.log, plots/*.svg.
void write_artifacts(const RunArtifacts& run, const std::filesystem::path& out_dir);

RunArtifacts run_preset(const std::string& name, const Overrides& overrides,
                        const std::filesystem::path& out_dir);

// SVG plot of a snapshot with an optional reference curve and a tick below
// the axis for every interior breakpoint.
std::string render_plot(const FreeKnotSpline& s, const ScalarFunction* reference,
                        const std::string& title);
void emit_plot(const Snapshot& snapshot, const ScalarFunction* reference,
               const std::filesystem::path& path);

}  // namespace enn

#endif  // ENN_HARNESS_HPP_
