#ifndef ENN_DATA_FIT_HPP_
#define ENN_DATA_FIT_HPP_

#include <vector>

#include "enn/spline.hpp"

namespace enn {

struct FitConfig {
  /// Target relative L2 error (absolute when the target has zero norm).
  double epsilon = 1e-3;
  int max_knots = 200;
  /// Golden-section iterations used to place a new knot and to relocate
  /// knots afterwards.
  int inner_solver_iters = 60;
  /// Coordinate-descent relocation sweeps run after the error target is met
  /// or the knot budget is exhausted.
  int relocation_passes = 2;
  /// Initial number of uniform cells.
  int initial_cells = 1;
  /// Known discontinuities of the target. Each becomes a steep ramp between
  /// two fixed knots at x -/+ w/2 with w = ramp_width * (b - a).
  std::vector<double> jumps;
  double ramp_width = 1e-4;
};

struct FitResult {
  FreeKnotSpline spline;
  double error = 0.0;  // relative L2 (absolute when target norm is zero)
  double target_norm = 0.0;
  bool converged = false;
  int insertions = 0;
  /// Relative error after the initial solve and after each insertion.
  std::vector<double> history;
};

/// Least-squares free-knot fit of `target` on [a, b] with both end values
/// pinned to the target (one-sided limits at end-point jumps). Knots are
/// added greedily in the cell with the largest local error until the
/// relative L2 error drops to cfg.epsilon or cfg.max_knots is reached.
FitResult fit(const ScalarFunction& target, double a, double b,
              const FitConfig& cfg);

/// Same as fit() over the time interval [0, horizon] for inflow data g(t).
FitResult fit_boundary(const ScalarFunction& g, double horizon,
                       const FitConfig& cfg);

/// Best L2 nodal values for a fixed knot set with the end values pinned.
FreeKnotSpline least_squares_values(const ScalarFunction& target,
                                    std::vector<double> knots, double ua,
                                    double ub,
                                    const QuadratureOptions& quad = {});

}  // namespace enn

#endif  // ENN_DATA_FIT_HPP_
