#ifndef ENN_BURGERS_HPP_
#define ENN_BURGERS_HPP_

#include <optional>
#include <stdexcept>
#include <vector>

#include "enn/spline.hpp"
#include "enn/trace.hpp"

namespace enn {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The quadratic for the shock-pair position has real roots, none of them
/// inside the crossed-characteristic bracket (or no real roots at all).
class BracketViolation : public SolverError {
 public:
  BracketViolation(std::vector<double> roots, double lo, double hi)
      : SolverError("cfv_step: no root inside the shock-region bracket"),
        roots_(std::move(roots)), lo_(lo), hi_(hi) {}
  const std::vector<double>& roots() const { return roots_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  std::vector<double> roots_;
  double lo_;
  double hi_;
};

/// 1 + tau * m vanishes for an outer slope m; the step must shrink.
class SingularSlope : public SolverError {
 public:
  using SolverError::SolverError;
};

/// A breakpoint pair (b_l, b_{l+1}) that carries a shock.
struct ShockRecord {
  std::size_t left = 0;
  double b_left = 0.0;
  double b_right = 0.0;
  double width = 0.0;     // d_l
  double midpoint = 0.0;  // s_l
  double jump = 0.0;      // J_l = u_l - u_{l+1}
  double mean = 0.0;      // (u_l + u_{l+1}) / 2
  double u_left = 0.0;
  double u_right = 0.0;
};

ShockRecord make_shock_record(const FreeKnotSpline& s, std::size_t l);

/// Time for the characteristics of b_l and b_{l+1} to meet, d_l / J_l
/// (infinite when the pair is not compressive).
double crossing_time(const FreeKnotSpline& s, std::size_t l);

struct ShockDetection {
  std::vector<ShockRecord> shocks;
  /// Truncated step (d_l - d*) / J_l when the earliest crossing pair is
  /// wider than d*.
  std::optional<double> truncation;
  /// Offset of the earliest crossing from the window start.
  std::optional<double> first_crossing;
};

/// Finds the pair(s) whose characteristics cross first, provided that
/// crossing falls inside (t_prev, t_next).
ShockDetection detect_shocks(const FreeKnotSpline& s, double t_prev,
                             double t_next, double d_star);

/// Crossed-characteristic trapezoid of a shock pair over one step of size tau.
struct ShockRegionGeometry {
  double tau = 0.0;
  double b_prev[4] = {};  // b_{l-1}, b_l, b_{l+1}, b_{l+2} at t_{k-1}
  double u_prev[4] = {};
  double tilde_left = 0.0;       // b~_l^{(k)} = b_{l+1} + tau u_{l+1}
  double tilde_right = 0.0;      // b~_{l+1}^{(k)} = b_l + tau u_l
  double foot_left = 0.0;        // b~_l^{(k-1)}
  double foot_right = 0.0;       // b~_{l+1}^{(k-1)}
  double slope_left = 0.0;       // m_l^{(k-1)}
  double slope_right = 0.0;      // m_{l+2}^{(k-1)}
  double slope_left_new = 0.0;   // m_l^{(k)}
  double slope_right_new = 0.0;  // m_{l+2}^{(k)}
  double traced_left = 0.0;      // u~_l
  double traced_right = 0.0;     // u~_{l+1}
};

/// Requires 1 <= l and l + 2 < s.size(). Throws SingularSlope.
ShockRegionGeometry shock_region(const FreeKnotSpline& s, std::size_t l, double tau);

struct CfvResult {
  double b_left = 0.0;  // b_l^{(k)}; b_{l+1}^{(k)} = b_left + d_l
  double u_left = 0.0;
  double u_right = 0.0;
  double residual = 0.0;  // |F - r| recomputed at the chosen root
  std::vector<double> roots;
};

/// Characteristic finite-volume update of a shock pair: solves F = r for
/// b_l^{(k)} and returns the new pair and nodal values.
CfvResult cfv_step(const ShockRegionGeometry& geom, const ShockRecord& rec);

/// Nodal values and residual F - r of the trapezoidal conservation balance
/// for a trial position of b_l^{(k)}.
struct CfvBalance {
  double u_left = 0.0;
  double u_right = 0.0;
  double residual = 0.0;
};
CfvBalance cfv_balance(const ShockRegionGeometry& geom, const ShockRecord& rec,
                       double b_left);

enum class Route { kCfv, kMerge };

struct StepOutcome {
  double tau = 0.0;
  Route route = Route::kCfv;
  double t_star = 0.0;
  double t_min = 0.0;  // min(t_{l-1,l+1}, t_{l,l+2}), infinite if none
  std::vector<StepEvent> events;
};

/// Neighbour crossing times t_{i,l+1} and t_{l,j} (infinite if never).
double left_neighbor_time(const FreeKnotSpline& s, std::size_t i, std::size_t l);
double right_neighbor_time(const FreeKnotSpline& s, std::size_t l, std::size_t j);

/// Step-size control for an active shock. Uses tau_nominal when it keeps
/// the crossed characteristics inside the neighbours (2t* <= tau < t_min);
/// otherwise half-way between t_min and 2t* (CFV) or exactly 2t* (merge).
StepOutcome control_time_step(const FreeKnotSpline& s, const ShockRecord& rec,
                              double tau_nominal);

struct MergeResult {
  double b_left = 0.0;
  double u_left = 0.0;
  double u_right = 0.0;
  std::size_t first = 0;  // knots first..l collapse into the left point
  std::size_t last = 0;   // knots l+1..last collapse into the right point
  double foot_left = 0.0;
  double foot_right = 0.0;
};

/// Collapses every breakpoint whose characteristic reaches the shock within
/// 2t* into the shock pair. `lo`/`hi` bound the knot indices that may be
/// absorbed (defaults: the whole interior).
MergeResult merge_into_shock(const FreeKnotSpline& s, const ShockRecord& rec,
                             std::optional<std::size_t> lo = std::nullopt,
                             std::optional<std::size_t> hi = std::nullopt);

struct BurgersState {
  FreeKnotSpline spline;
  /// shock[i] marks (b_i, b_{i+1}) as an active shock pair; one flag per
  /// knot, the last always false.
  std::vector<bool> shock;
  double t = 0.0;
  int step = 0;
};

BurgersState make_burgers_state(const FreeKnotSpline& initial);

/// Inputs and outputs of one CFV update, kept so that the conservation
/// balance can be re-checked independently.
struct CfvAudit {
  double tau = 0.0;
  double b_prev[4] = {};
  double u_prev[4] = {};
  double b_left = 0.0;
  double u_left = 0.0;
  double u_right = 0.0;
};

struct BurgersConfig {
  double d_star = 1e-3;
  double tau = 1e-2;
  int max_halvings = 20;
  /// Shift a merged pair so that the integral of u over the merged span
  /// matches the characteristic fluxes through its kept neighbours. When
  /// false the pair stays at b~_l^{(k)}.
  bool conservative_merge = true;
};

struct BurgersStep {
  BurgersState state;
  StepRecord record;
  std::vector<CfvAudit> audits;
};

/// One step of the method, never past t_limit.
BurgersStep advance_burgers(const BurgersState& state, double t_limit,
                            const BurgersConfig& cfg);

struct BurgersRunResult {
  std::vector<Snapshot> snapshots;
  RunTrace trace;
  std::vector<CfvAudit> audits;
};

BurgersRunResult run_burgers(const FreeKnotSpline& initial,
                             const std::vector<double>& times,
                             const BurgersConfig& cfg);

}  // namespace enn

#endif  // ENN_BURGERS_HPP_
