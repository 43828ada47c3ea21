#ifndef ENN_TRANSPORT_HPP_
#define ENN_TRANSPORT_HPP_

#include <optional>
#include <vector>

#include "enn/flux.hpp"
#include "enn/spline.hpp"
#include "enn/trace.hpp"

namespace enn {

/// A point (position, emission time, carried value) moving along its
/// characteristic line.
struct CharTriple {
  double position = 0.0;
  double time = 0.0;
  double value = 0.0;
};

struct CharPoint {
  double position = 0.0;
  double value = 0.0;
};

/// Moves a triple to time t: x = x_hat + (t - t_bar) f'(v_hat), v = v_hat.
CharPoint characteristic_step(const CharTriple& triple, double t,
                              const FluxModel& flux);

/// A boundary breakpoint (t_hat_j, g_j) waiting to enter the domain.
struct BoundaryPoint {
  double time = 0.0;
  double value = 0.0;
};

struct LinearEnnState {
  FreeKnotSpline spline;  // approximation at time t
  double t = 0.0;
  int step = 0;
  std::vector<BoundaryPoint> pending;  // sorted by time, not yet injected
  /// Set when the initial end value and g(0) disagree at the inflow corner:
  /// the first step shifts both by delta.
  bool corner_shift = false;
};

/// Inflow corner shift used when u0 and g disagree at the inflow end point,
/// as a fraction of the domain length.
inline constexpr double kCornerShift = 1e-6;

/// Initial state from the fitted initial data and (optional) inflow data
/// fitted over [0, T].
LinearEnnState make_linear_state(const FreeKnotSpline& initial,
                                 const std::optional<FreeKnotSpline>& boundary,
                                 const FluxModel& flux);

struct AdvanceStats {
  std::size_t propagated = 0;
};

/// One step of the linear method to time t_k: propagate breakpoints and the
/// boundary breakpoints emitted in (t, t_k), merge, clip to [a, b] and set
/// the end values. `boundary` supplies g_N(t_k) at the inflow end point.
LinearEnnState advance_linear(const LinearEnnState& state, double t_k,
                              const std::optional<FreeKnotSpline>& boundary,
                              const FluxModel& flux,
                              AdvanceStats* stats = nullptr);

struct LinearSetup {
  FreeKnotSpline initial;
  std::optional<FreeKnotSpline> boundary;  // g_N over [0, T]
  FluxModel flux = FluxModel::Linear(1.0);
  /// Nominal step; <= 0 means one step per output interval.
  double tau = 0.0;
};

struct RunResult {
  std::vector<Snapshot> snapshots;
  RunTrace trace;
};

/// Runs to each output time (sorted, >= 0), recording one snapshot per time.
RunResult run_linear(const LinearSetup& setup, const std::vector<double>& times);

/// Mirror image x -> a + b - x of a spline.
FreeKnotSpline reflect(const FreeKnotSpline& s);

}  // namespace enn

#endif  // ENN_TRANSPORT_HPP_
