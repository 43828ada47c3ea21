#include "enn/trace.hpp"

#include <algorithm>
#include <cstdio>

namespace enn {

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kShockFormed: return "shock-formed";
    case EventKind::kTruncated: return "truncated";
    case EventKind::kMerged: return "merged";
    case EventKind::kCfv: return "cfv";
    case EventKind::kFallbackRoot: return "fallback-root";
    case EventKind::kShockDropped: return "shock-dropped";
  }
  return "unknown";
}

std::size_t RunTrace::max_breakpoints() const {
  std::size_t n = initial_breakpoints;
  for (const auto& s : steps) n = std::max(n, s.breakpoints);
  return n;
}

std::size_t RunTrace::operation_count() const {
  std::size_t n = 0;
  for (const auto& s : steps) n += 3 * s.propagated;
  return n;
}

std::string RunTrace::event_log() const {
  std::string out;
  char line[160];
  for (const auto& s : steps) {
    for (const auto& e : s.events) {
      std::snprintf(line, sizeof(line), "t=%.10g event=%s l=%d tau=%.10g\n", s.t,
                    to_string(e.kind).c_str(), e.index, e.tau);
      out += line;
    }
  }
  return out;
}

}  // namespace enn
