#include "enn/transport.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace enn {

CharPoint characteristic_step(const CharTriple& triple, double t,
                              const FluxModel& flux) {
  if (t < triple.time) {
    throw std::invalid_argument("characteristic_step: target time precedes emission");
  }
  return {triple.position + (t - triple.time) * flux.speed(triple.value),
          triple.value};
}

FreeKnotSpline reflect(const FreeKnotSpline& s) {
  const double sum = s.a() + s.b();
  std::vector<double> x(s.size());
  std::vector<double> u(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::size_t j = s.size() - 1 - i;
    x[i] = sum - s.knots()[j];
    u[i] = s.values()[j];
  }
  x.front() = s.a();
  x.back() = s.b();
  return FreeKnotSpline(std::move(x), std::move(u));
}

LinearEnnState make_linear_state(const FreeKnotSpline& initial,
                                 const std::optional<FreeKnotSpline>& boundary,
                                 const FluxModel& flux) {
  if (!flux.is_linear()) {
    throw std::invalid_argument("make_linear_state: flux must be linear");
  }
  LinearEnnState state;
  state.spline = initial;
  if (boundary && flux.alpha() != 0.0) {
    const auto& g = *boundary;
    for (std::size_t j = 1; j + 1 < g.size(); ++j) {
      state.pending.push_back({g.knots()[j], g.values()[j]});
    }
    const double inflow_value =
        flux.alpha() > 0.0 ? initial.values().front() : initial.values().back();
    const double g0 = g.values().front();
    state.corner_shift = std::abs(inflow_value - g0) > 1e-12 * (1.0 + std::abs(g0));
  }
  return state;
}

namespace {

// Left-to-right inflow version; callers reflect for alpha < 0.
LinearEnnState advance_rightward(const LinearEnnState& state, double t_k,
                                 const std::optional<FreeKnotSpline>& boundary,
                                 double alpha, AdvanceStats* stats) {
  const FreeKnotSpline& s = state.spline;
  const double a = s.a();
  const double b = s.b();
  const double t0 = state.t;
  const double delta = kCornerShift * (b - a);
  const FluxModel flux = FluxModel::Linear(alpha);

  auto g_at = [&](double t) {
    return boundary ? boundary->clamped(t) : s.values().front();
  };

  std::vector<CharPoint> pts;
  pts.reserve(s.size() + state.pending.size() + 3);
  pts.push_back({a, g_at(t_k)});

  // Boundary breakpoints emitted in (t_{k-1}, t_k); the latest enters last,
  // so it sits closest to the inflow end.
  std::vector<BoundaryPoint> remaining;
  std::vector<CharPoint> injected;
  std::vector<BoundaryPoint> emitted = state.pending;
  if (state.corner_shift && state.step == 0) {
    emitted.push_back({t0 + delta, g_at(t0)});
  }
  std::sort(emitted.begin(), emitted.end(),
            [](const BoundaryPoint& l, const BoundaryPoint& r) { return l.time < r.time; });
  for (const auto& p : emitted) {
    if (p.time > t0 && p.time < t_k) {
      injected.push_back(characteristic_step({a, p.time, p.value}, t_k, flux));
    } else if (p.time >= t_k) {
      remaining.push_back(p);
    }
  }
  std::reverse(injected.begin(), injected.end());
  pts.insert(pts.end(), injected.begin(), injected.end());

  for (std::size_t i = 0; i < s.size(); ++i) {
    double x = s.knots()[i];
    if (i == 0 && state.corner_shift && state.step == 0) x += delta;
    pts.push_back(characteristic_step({x, t0, s.values()[i]}, t_k, flux));
  }
  if (stats) stats->propagated += s.size() + injected.size();

  // Clip at the outflow end b, interpolating across it when straddled.
  std::vector<double> x;
  std::vector<double> u;
  x.reserve(pts.size());
  u.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].position < b) {
      x.push_back(pts[i].position);
      u.push_back(pts[i].value);
      continue;
    }
    if (pts[i].position == b || i == 0) {
      x.push_back(b);
      u.push_back(pts[i].value);
    } else {
      const CharPoint& l = pts[i - 1];
      const CharPoint& r = pts[i];
      const double w = (b - l.position) / (r.position - l.position);
      x.push_back(b);
      u.push_back((1.0 - w) * l.value + w * r.value);
    }
    break;
  }
  if (x.back() < b) {
    // Nothing reached b: cannot happen for alpha > 0 since the old end point
    // moved right of its start.
    x.push_back(b);
    u.push_back(u.back());
  }

  LinearEnnState next;
  next.spline = FreeKnotSpline(std::move(x), std::move(u));
  next.t = t_k;
  next.step = state.step + 1;
  next.pending = std::move(remaining);
  next.corner_shift = state.corner_shift;
  return next;
}

}  // namespace

LinearEnnState advance_linear(const LinearEnnState& state, double t_k,
                              const std::optional<FreeKnotSpline>& boundary,
                              const FluxModel& flux, AdvanceStats* stats) {
  if (!flux.is_linear()) {
    throw std::invalid_argument("advance_linear: flux must be linear");
  }
  if (!(t_k > state.t)) {
    throw std::invalid_argument("advance_linear: t_k must exceed current time");
  }
  const double alpha = flux.alpha();
  if (alpha == 0.0) {
    LinearEnnState next = state;
    next.t = t_k;
    ++next.step;
    return next;
  }
  if (alpha > 0.0) return advance_rightward(state, t_k, boundary, alpha, stats);

  LinearEnnState mirrored = state;
  mirrored.spline = reflect(state.spline);
  LinearEnnState next = advance_rightward(mirrored, t_k, boundary, -alpha, stats);
  next.spline = reflect(next.spline);
  return next;
}

RunResult run_linear(const LinearSetup& setup, const std::vector<double>& times) {
  RunResult result;
  LinearEnnState state = make_linear_state(setup.initial, setup.boundary, setup.flux);
  result.trace.initial_breakpoints = state.spline.interior_count();
  std::vector<double> sorted = times;
  std::sort(sorted.begin(), sorted.end());
  for (double target : sorted) {
    if (target < state.t) throw std::invalid_argument("run_linear: negative time");
    if (target > state.t) {
      const double span = target - state.t;
      const int n = setup.tau > 0.0
                        ? std::max(1, static_cast<int>(std::ceil(span / setup.tau - 1e-9)))
                        : 1;
      const double t_start = state.t;
      for (int i = 1; i <= n; ++i) {
        const double t_next = i == n ? target : t_start + span * i / n;
        AdvanceStats stats;
        const double tau = t_next - state.t;
        state = advance_linear(state, t_next, setup.boundary, setup.flux, &stats);
        result.trace.steps.push_back(
            {state.t, tau, state.spline.interior_count(), stats.propagated, {}});
      }
    }
    result.snapshots.push_back({state.t, state.spline});
  }
  return result;
}

}  // namespace enn
