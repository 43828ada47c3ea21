#ifndef ENN_TRACE_HPP_
#define ENN_TRACE_HPP_

#include <string>
#include <vector>

#include "enn/spline.hpp"

namespace enn {

enum class EventKind { kShockFormed, kTruncated, kMerged, kCfv, kFallbackRoot, kShockDropped };

std::string to_string(EventKind kind);

struct StepEvent {
  EventKind kind;
  int index = -1;  // left knot index of the shock pair at the start of the step
  double tau = 0.0;
  int absorbed = 0;  // knots removed by a merge
};

struct StepRecord {
  double t = 0.0;    // time reached by the step
  double tau = 0.0;  // accepted step size
  std::size_t breakpoints = 0;  // interior breaking points n_k after the step
  std::size_t propagated = 0;   // points pushed along characteristics
  std::vector<StepEvent> events;
};

struct Snapshot {
  double t = 0.0;
  FreeKnotSpline spline;
};

struct RunTrace {
  std::size_t initial_breakpoints = 0;
  std::vector<StepRecord> steps;

  std::size_t step_count() const { return steps.size(); }
  std::size_t max_breakpoints() const;
  /// Roughly three flops per propagated point.
  std::size_t operation_count() const;
  /// One `t=<..> event=<..> l=<..> tau=<..>` line per event.
  std::string event_log() const;
};

}  // namespace enn

#endif  // ENN_TRACE_HPP_
