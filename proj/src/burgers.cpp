#include "enn/burgers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace enn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool compressive(const FreeKnotSpline& s, std::size_t i) {
  return s.values()[i] > s.values()[i + 1];
}

}  // namespace

ShockRecord make_shock_record(const FreeKnotSpline& s, std::size_t l) {
  if (l + 1 >= s.size()) throw std::out_of_range("make_shock_record: bad index");
  ShockRecord r;
  r.left = l;
  r.b_left = s.knots()[l];
  r.b_right = s.knots()[l + 1];
  r.width = r.b_right - r.b_left;
  r.midpoint = 0.5 * (r.b_left + r.b_right);
  r.u_left = s.values()[l];
  r.u_right = s.values()[l + 1];
  r.jump = r.u_left - r.u_right;
  r.mean = 0.5 * (r.u_left + r.u_right);
  return r;
}

double crossing_time(const FreeKnotSpline& s, std::size_t l) {
  if (!compressive(s, l)) return kInf;
  return s.width(l) / (s.values()[l] - s.values()[l + 1]);
}

ShockDetection detect_shocks(const FreeKnotSpline& s, double t_prev,
                             double t_next, double d_star) {
  if (!(d_star > 0.0)) throw std::invalid_argument("detect_shocks: d* must be positive");
  ShockDetection out;
  double earliest = kInf;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    earliest = std::min(earliest, crossing_time(s, i));
  }
  if (!std::isfinite(earliest)) return out;
  out.first_crossing = earliest;
  if (earliest >= t_next - t_prev) return out;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const double tc = crossing_time(s, i);
    if (tc > earliest * (1.0 + 1e-12)) continue;
    ShockRecord r = make_shock_record(s, i);
    if (r.width > d_star) {
      const double cut = (r.width - d_star) / r.jump;
      out.truncation = out.truncation ? std::min(*out.truncation, cut) : cut;
    }
    out.shocks.push_back(r);
  }
  return out;
}

ShockRegionGeometry shock_region(const FreeKnotSpline& s, std::size_t l, double tau) {
  if (l < 1 || l + 2 >= s.size()) {
    throw std::out_of_range("shock_region: shock pair needs a neighbour on each side");
  }
  ShockRegionGeometry g;
  g.tau = tau;
  for (int k = 0; k < 4; ++k) {
    g.b_prev[k] = s.knots()[l - 1 + k];
    g.u_prev[k] = s.values()[l - 1 + k];
  }
  const double bl = g.b_prev[1];
  const double br = g.b_prev[2];
  const double ul = g.u_prev[1];
  const double ur = g.u_prev[2];
  g.tilde_left = br + tau * ur;
  g.tilde_right = bl + tau * ul;
  g.slope_left = (ul - g.u_prev[0]) / (bl - g.b_prev[0]);
  g.slope_right = (g.u_prev[3] - ur) / (g.b_prev[3] - br);
  const double den_left = 1.0 + tau * g.slope_left;
  const double den_right = 1.0 + tau * g.slope_right;
  if (std::abs(den_left) < 1e-12 || std::abs(den_right) < 1e-12) {
    throw SingularSlope("shock_region: 1 + tau*m vanishes");
  }
  g.foot_left = (g.tilde_left + tau * (g.slope_left * bl - ul)) / den_left;
  g.foot_right = (g.tilde_right + tau * (g.slope_right * br - ur)) / den_right;
  g.traced_left = ul - g.slope_left * (bl - g.foot_left);
  g.traced_right = ur + g.slope_right * (g.foot_right - br);
  g.slope_left_new = g.slope_left / den_left;
  g.slope_right_new = g.slope_right / den_right;
  return g;
}

namespace {

// 2r of the trapezoidal balance.
double twice_rhs(const ShockRegionGeometry& g, const ShockRecord& rec) {
  const double tau = g.tau;
  const double tl = g.traced_left;
  const double tr = g.traced_right;
  return tau * rec.jump * rec.mean - 0.5 * tau * (tr * tr - tl * tl) +
         tau * (rec.u_left * tr - rec.u_right * tl) - rec.width * (tl + tr);
}

}  // namespace

CfvBalance cfv_balance(const ShockRegionGeometry& g, const ShockRecord& rec,
                       double b_left) {
  const double d = rec.width;
  CfvBalance out;
  out.u_left = g.traced_left + g.slope_left_new * (b_left - g.tilde_left);
  out.u_right = g.traced_right - g.slope_right_new * (g.tilde_right - b_left - d);
  const double twice_f = (b_left - g.tilde_left) * (g.traced_left + out.u_left) +
                         d * (out.u_left + out.u_right) +
                         (g.tilde_right - b_left - d) * (out.u_right + g.traced_right);
  out.residual = 0.5 * (twice_f - twice_rhs(g, rec));
  return out;
}

CfvResult cfv_step(const ShockRegionGeometry& g, const ShockRecord& rec) {
  if (!(rec.jump > 0.0)) throw std::invalid_argument("cfv_step: shock must be compressive");
  const double d = rec.width;
  const double tj = g.tau * rec.jump;
  const double ml = g.slope_left_new;
  const double mr = g.slope_right_new;
  const double tl = g.traced_left;
  const double tr = g.traced_right;

  // alpha y^2 + beta y + zeta = 0 with y = b_l^{(k)} - b~_l^{(k)}.
  const double alpha = ml - mr;
  const double beta = 2.0 * (tl - tr) + d * (ml + mr) + 2.0 * mr * (tj - 2.0 * d);
  const double zeta = d * (tl + tr) + (tj - 2.0 * d) * (2.0 * tr - mr * (tj - d)) -
                      twice_rhs(g, rec);

  std::vector<double> roots;
  const double scale = std::abs(beta) + std::abs(alpha) * (std::abs(tj) + d) + 1e-300;
  if (std::abs(alpha) * (std::abs(tj) + d) <= 1e-14 * scale) {
    if (beta == 0.0) throw BracketViolation({}, 0.0, 0.0);
    roots.push_back(-zeta / beta);
  } else {
    double disc = beta * beta - 4.0 * alpha * zeta;
    if (disc < 0.0) {
      if (disc > -1e-14 * beta * beta) {
        disc = 0.0;
      } else {
        throw BracketViolation({}, g.tilde_left, g.tilde_right);
      }
    }
    const double q = -0.5 * (beta + std::copysign(std::sqrt(disc), beta));
    roots.push_back(q / alpha);
    if (q != 0.0) roots.push_back(zeta / q);
  }
  for (double& y : roots) y += g.tilde_left;

  double chosen = roots.front();
  if (roots.size() == 2) {
    const double lo = std::min(g.tilde_left, g.tilde_right);
    const double hi = std::max(g.tilde_left, g.tilde_right);
    const double tol = 1e-10 * (hi - lo + d);
    std::vector<double> inside;
    for (double r : roots) {
      if (r >= lo - tol && r <= hi + tol) inside.push_back(r);
    }
    if (inside.empty()) throw BracketViolation(roots, lo, hi);
    chosen = inside.front();
    if (inside.size() == 2 &&
        std::abs(cfv_balance(g, rec, inside[1]).residual) <
            std::abs(cfv_balance(g, rec, inside[0]).residual)) {
      chosen = inside[1];
    }
  }
  const CfvBalance bal = cfv_balance(g, rec, chosen);
  return {chosen, bal.u_left, bal.u_right, std::abs(bal.residual), roots};
}

double left_neighbor_time(const FreeKnotSpline& s, std::size_t i, std::size_t l) {
  const double ui = s.values()[i];
  const double ur = s.values()[l + 1];
  if (!(ui > ur)) return kInf;
  return (s.knots()[l + 1] - s.knots()[i]) / (ui - ur);
}

double right_neighbor_time(const FreeKnotSpline& s, std::size_t l, std::size_t j) {
  const double uj = s.values()[j];
  const double ul = s.values()[l];
  if (!(ul > uj)) return kInf;
  return (s.knots()[j] - s.knots()[l]) / (ul - uj);
}

StepOutcome control_time_step(const FreeKnotSpline& s, const ShockRecord& rec,
                              double tau_nominal) {
  const std::size_t l = rec.left;
  StepOutcome out;
  out.t_star = rec.width / rec.jump;
  out.t_min = kInf;
  if (l >= 1) out.t_min = std::min(out.t_min, left_neighbor_time(s, l - 1, l));
  if (l + 2 < s.size()) out.t_min = std::min(out.t_min, right_neighbor_time(s, l, l + 2));
  const double two_star = 2.0 * out.t_star;
  if (out.t_min <= two_star) {
    out.route = Route::kMerge;
    out.tau = two_star;
  } else if (tau_nominal >= two_star && tau_nominal < out.t_min) {
    out.route = Route::kCfv;
    out.tau = tau_nominal;
  } else {
    out.route = Route::kCfv;
    out.tau = std::isfinite(out.t_min) ? 0.5 * (out.t_min + two_star) : tau_nominal;
  }
  return out;
}

namespace {

// Foot x of the characteristic through `target` after time tau, searched in
// `cell` first and then in the remaining cells by distance.
double find_foot(const FreeKnotSpline& s, double target, double tau,
                 std::size_t cell) {
  const std::size_t cells = s.size() - 1;
  const double tol = 1e-12 * (s.b() - s.a());
  auto solve = [&](std::size_t c, double* x) {
    const double x0 = s.knots()[c];
    const double x1 = s.knots()[c + 1];
    const double m = s.slope(c);
    const double den = 1.0 + tau * m;
    if (std::abs(den) < 1e-14) return false;
    *x = (target - tau * (s.values()[c] - m * x0)) / den;
    return *x >= x0 - tol && *x <= x1 + tol;
  };
  double x = 0.0;
  if (solve(cell, &x)) return std::clamp(x, s.knots()[cell], s.knots()[cell + 1]);
  for (std::size_t off = 1; off < cells; ++off) {
    for (std::size_t c : {cell - off, cell + off}) {
      if (c < cells && solve(c, &x)) return std::clamp(x, s.knots()[c], s.knots()[c + 1]);
    }
  }
  throw SolverError("merge_into_shock: back-traced foot not found");
}

}  // namespace

MergeResult merge_into_shock(const FreeKnotSpline& s, const ShockRecord& rec,
                             std::optional<std::size_t> lo,
                             std::optional<std::size_t> hi) {
  const std::size_t l = rec.left;
  const std::size_t first_allowed = std::max<std::size_t>(1, lo.value_or(1));
  const std::size_t last_allowed = std::min(s.size() - 2, hi.value_or(s.size() - 2));
  if (l < 1 || l + 2 >= s.size()) {
    throw std::out_of_range("merge_into_shock: shock pair needs neighbours");
  }
  const double tau = 2.0 * rec.width / rec.jump;
  const double limit = tau * (1.0 + 1e-12);

  MergeResult m;
  m.first = l;
  for (std::size_t i = l; i-- > first_allowed;) {
    if (left_neighbor_time(s, i, l) <= limit) m.first = i;
  }
  m.last = l + 1;
  for (std::size_t j = l + 2; j <= last_allowed; ++j) {
    if (right_neighbor_time(s, l, j) <= limit) m.last = j;
  }
  m.b_left = s.knots()[l + 1] + tau * s.values()[l + 1];
  const double b_right = m.b_left + rec.width;
  m.foot_left = find_foot(s, m.b_left, tau, m.first - 1);
  m.foot_right = find_foot(s, b_right, tau, m.last);
  m.u_left = s.clamped(m.foot_left);
  m.u_right = s.clamped(m.foot_right);
  return m;
}

BurgersState make_burgers_state(const FreeKnotSpline& initial) {
  BurgersState st;
  st.spline = initial;
  st.shock.assign(initial.size(), false);
  return st;
}

namespace {

struct Knot {
  double x;
  double u;
  bool shock;  // left point of an active shock pair
};

struct ShockPlan {
  ShockRecord rec;
  StepOutcome control;
  bool merge = false;
  MergeResult merged;
};

struct StepPlan {
  FreeKnotSpline spline;
  std::vector<bool> shock;
  std::vector<ShockPlan> shocks;
  std::vector<double> truncation;  // per pair, infinite if none
  std::vector<bool> absorbed;
  double tau = 0.0;
  bool reaches_limit = false;
  std::vector<StepEvent> events;
};

bool touches_shock(const std::vector<bool>& shock, std::size_t i) {
  return shock[i] || (i >= 1 && shock[i - 1]) || (i + 1 < shock.size() && shock[i + 1]);
}

// Shock-pair bookkeeping that does not depend on the step size.
void normalize_shocks(std::vector<Knot>& k, double d_star, std::vector<StepEvent>& events) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t l = 0; l + 1 < k.size(); ++l) {
      if (!k[l].shock) continue;
      const bool at_boundary = l == 0 || l + 2 >= k.size();
      if (at_boundary || !(k[l].u > k[l + 1].u)) {
        k[l].shock = false;
        events.push_back({EventKind::kShockDropped, static_cast<int>(l), 0.0});
        changed = true;
        continue;
      }
      // Overlapping regions: keep the outermost pair of the two shocks.
      if (l + 1 < k.size() && k[l + 1].shock) {
        k.erase(k.begin() + static_cast<std::ptrdiff_t>(l) + 1);
        events.push_back({EventKind::kMerged, static_cast<int>(l), 0.0, 1});
        changed = true;
      } else if (l + 2 < k.size() && k[l + 2].shock) {
        k[l + 2].shock = false;
        k.erase(k.begin() + static_cast<std::ptrdiff_t>(l) + 1,
                k.begin() + static_cast<std::ptrdiff_t>(l) + 3);
        events.push_back({EventKind::kMerged, static_cast<int>(l), 0.0, 2});
        changed = true;
      }
    }
  }
  std::vector<bool> flags(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) flags[i] = k[i].shock;
  for (std::size_t i = 1; i + 2 < k.size(); ++i) {
    if (touches_shock(flags, i) || touches_shock(flags, i + 1)) continue;
    if (k[i].u > k[i + 1].u && k[i + 1].x - k[i].x <= d_star * (1.0 + 1e-12)) {
      k[i].shock = flags[i] = true;
      events.push_back({EventKind::kShockFormed, static_cast<int>(i), 0.0});
    }
  }
}

// Moves a merged pair so that the integral over the span between the kept
// neighbours' characteristics changes by tau (u_R^2 - u_L^2) / 2, the flux
// through two characteristic lines. Neighbours the pair overtakes join the
// merged groups; end values are re-traced at each trial position.
MergeResult balance_merge(const FreeKnotSpline& s, const ShockRecord& rec, MergeResult m,
                          double tau, std::size_t lo, std::size_t hi) {
  const double d = rec.width;
  const double start = m.b_left;
  for (int it = 0; it < 100; ++it) {
    const std::size_t il = m.first - 1;
    const std::size_t ir = m.last + 1;
    const double ul = s.values()[il];
    const double ur = s.values()[ir];
    const double xl = s.knots()[il] + tau * ul;
    const double xr = s.knots()[ir] + tau * ur;
    const double target =
        s.integrate(s.knots()[il], s.knots()[ir]) + 0.5 * tau * (ur * ur - ul * ul);
    // Trapezoids over (xl, b), (b, b + d), (b + d, xr) are affine in b.
    const double slope = 0.5 * ((ul + m.u_left) - (m.u_right + ur));
    const double base = -0.5 * xl * (ul + m.u_left) + 0.5 * d * (m.u_left + m.u_right) +
                        0.5 * (xr - d) * (m.u_right + ur);
    if (!(slope > 1e-14)) return m;
    const double b = (target - base) / slope;
    bool grown = false;
    if (b <= xl && m.first > lo) {
      --m.first;
      grown = true;
    }
    if (b + d >= xr && m.last < hi) {
      ++m.last;
      grown = true;
    }
    double next = b;
    if (!grown) {
      if (!(xr - xl > d)) return m;
      const double margin = 1e-3 * (xr - xl - d);
      next = std::clamp(b, xl + margin, xr - d - margin);
    }
    if (!std::isfinite(next)) next = start;
    m.foot_left = find_foot(s, next, tau, m.first - 1);
    m.foot_right = find_foot(s, next + d, tau, m.last);
    m.u_left = s.clamped(m.foot_left);
    m.u_right = s.clamped(m.foot_right);
    const bool settled = !grown && std::abs(next - m.b_left) <= 1e-14 * (1.0 + std::abs(next));
    m.b_left = next;
    if (settled) break;
  }
  return m;
}

StepPlan plan_step(const BurgersState& state, double t_limit, const BurgersConfig& cfg,
                   double cap) {
  StepPlan plan;
  if (state.shock.size() != state.spline.size()) {
    throw std::invalid_argument("advance_burgers: need one shock flag per knot");
  }
  std::vector<Knot> k(state.spline.size());
  for (std::size_t i = 0; i < k.size(); ++i) {
    k[i] = {state.spline.knots()[i], state.spline.values()[i], state.shock[i]};
  }
  normalize_shocks(k, cfg.d_star, plan.events);
  std::vector<double> x(k.size());
  std::vector<double> u(k.size());
  plan.shock.resize(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) {
    x[i] = k[i].x;
    u[i] = k[i].u;
    plan.shock[i] = k[i].shock;
  }
  plan.spline = FreeKnotSpline(std::move(x), std::move(u));
  const FreeKnotSpline& s = plan.spline;
  const std::size_t n = s.size();

  const double gap = t_limit - state.t;
  const double nominal = std::min({cfg.tau, gap, cap});
  double tau = std::min(gap, cap);

  for (std::size_t l = 0; l + 1 < n; ++l) {
    if (!plan.shock[l]) continue;
    ShockPlan sp;
    sp.rec = make_shock_record(s, l);
    sp.control = control_time_step(s, sp.rec, nominal);
    tau = std::min(tau, sp.control.tau);
    plan.shocks.push_back(sp);
  }
  if (plan.shocks.empty()) tau = std::min(tau, nominal);

  // Knots that a merging shock may swallow are excluded from new shocks.
  plan.absorbed.assign(n, false);
  std::vector<std::pair<std::size_t, std::size_t>> bounds(plan.shocks.size());
  for (std::size_t q = 0; q < plan.shocks.size(); ++q) {
    const std::size_t l = plan.shocks[q].rec.left;
    const std::size_t lo = q == 0 ? 1 : plan.shocks[q - 1].rec.left + 3;
    const std::size_t hi = q + 1 == plan.shocks.size() ? n - 2 : plan.shocks[q + 1].rec.left - 2;
    bounds[q] = {lo, hi};
    if (plan.shocks[q].control.route == Route::kMerge) {
      const MergeResult m = merge_into_shock(s, plan.shocks[q].rec, lo, hi);
      for (std::size_t i = m.first; i < l; ++i) plan.absorbed[i] = true;
      for (std::size_t j = l + 2; j <= m.last; ++j) plan.absorbed[j] = true;
    }
  }

  plan.truncation.assign(n, kInf);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (touches_shock(plan.shock, i) || touches_shock(plan.shock, i + 1)) continue;
    if (plan.absorbed[i] || plan.absorbed[i + 1]) continue;
    if (!compressive(s, i)) continue;
    const double d = s.width(i);
    if (d <= cfg.d_star) continue;
    plan.truncation[i] = (d - cfg.d_star) / (s.values()[i] - s.values()[i + 1]);
    tau = std::min(tau, plan.truncation[i]);
  }
  if (!(tau > 0.0)) throw SolverError("advance_burgers: non-positive step");
  plan.tau = tau;
  plan.reaches_limit = tau >= gap;

  std::fill(plan.absorbed.begin(), plan.absorbed.end(), false);
  for (std::size_t q = 0; q < plan.shocks.size(); ++q) {
    ShockPlan& sp = plan.shocks[q];
    const double two_star = 2.0 * sp.control.t_star;
    sp.merge = sp.control.route == Route::kMerge && std::abs(tau - two_star) <= 1e-12 * two_star;
    if (!sp.merge) continue;
    sp.merged = merge_into_shock(s, sp.rec, bounds[q].first, bounds[q].second);
    if (cfg.conservative_merge) {
      sp.merged = balance_merge(s, sp.rec, sp.merged, tau, bounds[q].first, bounds[q].second);
    }
    for (std::size_t i = sp.merged.first; i < sp.rec.left; ++i) plan.absorbed[i] = true;
    for (std::size_t j = sp.rec.left + 2; j <= sp.merged.last; ++j) plan.absorbed[j] = true;
  }
  return plan;
}

// Removes knots that crossed a shock pair or each other. Shock pairs win.
std::vector<Knot> restore_order(const std::vector<Knot>& in, double tol) {
  std::vector<bool> member(in.size(), false);
  for (std::size_t i = 0; i + 1 < in.size(); ++i) {
    if (in[i].shock) member[i] = member[i + 1] = true;
  }
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < in.size(); ++i) {
    bool keep = true;
    while (!kept.empty() && in[i].x <= in[kept.back()].x + tol) {
      if (!member[i]) {
        keep = false;
        break;
      }
      if (!member[kept.back()]) {
        kept.pop_back();
        continue;
      }
      keep = false;
      break;
    }
    if (keep) kept.push_back(i);
  }
  std::vector<Knot> out;
  out.reserve(kept.size());
  for (std::size_t q = 0; q < kept.size(); ++q) {
    Knot kn = in[kept[q]];
    kn.shock = kn.shock && q + 1 < kept.size() && kept[q + 1] == kept[q] + 1;
    out.push_back(kn);
  }
  return out;
}

// Clips to [a, b]: outgoing end points are replaced by the interpolated end
// value; incoming ones stay at the end point (constant inflow state).
void apply_boundaries(std::vector<Knot>& k, double a, double b, double tol) {
  if (k.front().x >= a) {
    k.front().x = a;
  } else {
    std::size_t p = 0;
    while (p < k.size() && k[p].x < a) ++p;
    if (p == k.size()) throw SolverError("advance_burgers: all knots left the domain");
    Knot end{a, 0.0, false};
    const double w = (a - k[p - 1].x) / (k[p].x - k[p - 1].x);
    end.u = (1.0 - w) * k[p - 1].u + w * k[p].u;
    if (k[p].x - a <= tol) {
      k[p].x = a;
      k.erase(k.begin(), k.begin() + static_cast<std::ptrdiff_t>(p));
    } else {
      k.erase(k.begin(), k.begin() + static_cast<std::ptrdiff_t>(p));
      k.insert(k.begin(), end);
    }
    k.front().shock = false;
  }
  if (k.back().x <= b) {
    k.back().x = b;
  } else {
    std::size_t p = k.size() - 1;
    while (p > 0 && k[p].x > b) --p;
    if (k[p].x > b) throw SolverError("advance_burgers: all knots left the domain");
    Knot end{b, 0.0, false};
    const double w = (b - k[p].x) / (k[p + 1].x - k[p].x);
    end.u = (1.0 - w) * k[p].u + w * k[p + 1].u;
    k.erase(k.begin() + static_cast<std::ptrdiff_t>(p) + 1, k.end());
    if (b - k.back().x <= tol) {
      k.back().x = b;
    } else {
      k.push_back(end);
    }
  }
  k.back().shock = false;
  if (k.size() >= 2) k[k.size() - 2].shock = false;
  k.front().shock = false;
}

BurgersStep execute(const BurgersState& state, const StepPlan& plan, double t_limit) {
  const FreeKnotSpline& s = plan.spline;
  const std::size_t n = s.size();
  const double tau = plan.tau;
  const double tol = FreeKnotSpline::kMergeTolerance * (s.b() - s.a());

  BurgersStep out;
  out.record.events = plan.events;
  std::vector<Knot> next;
  next.reserve(n);

  std::size_t q = 0;
  for (std::size_t i = 0; i < n;) {
    if (plan.shock[i]) {
      const ShockPlan& sp = plan.shocks[q++];
      const double d = sp.rec.width;
      if (sp.merge) {
        next.push_back({sp.merged.b_left, sp.merged.u_left, true});
        next.push_back({sp.merged.b_left + d, sp.merged.u_right, false});
        const int absorbed = static_cast<int>((i - sp.merged.first) + (sp.merged.last - i - 1));
        out.record.events.push_back({EventKind::kMerged, static_cast<int>(i), tau, absorbed});
      } else {
        const ShockRegionGeometry g = shock_region(s, i, tau);
        CfvResult r;
        EventKind kind = EventKind::kCfv;
        try {
          r = cfv_step(g, sp.rec);
        } catch (const BracketViolation& bv) {
          if (bv.roots().empty()) throw;
          // Both roots solve the balance; keep the one nearest the
          // Rankine-Hugoniot prediction.
          const double predicted = sp.rec.b_left + tau * sp.rec.mean;
          double best = bv.roots().front();
          for (double root : bv.roots()) {
            if (std::abs(root - predicted) < std::abs(best - predicted)) best = root;
          }
          const CfvBalance bal = cfv_balance(g, sp.rec, best);
          r = {best, bal.u_left, bal.u_right, std::abs(bal.residual), bv.roots()};
          kind = EventKind::kFallbackRoot;
        }
        CfvAudit audit;
        audit.tau = tau;
        std::copy(std::begin(g.b_prev), std::end(g.b_prev), audit.b_prev);
        std::copy(std::begin(g.u_prev), std::end(g.u_prev), audit.u_prev);
        audit.b_left = r.b_left;
        audit.u_left = r.u_left;
        audit.u_right = r.u_right;
        out.audits.push_back(audit);
        next.push_back({r.b_left, r.u_left, true});
        next.push_back({r.b_left + d, r.u_right, false});
        out.record.events.push_back({kind, static_cast<int>(i), tau});
      }
      i += 2;
      continue;
    }
    if (plan.absorbed[i]) {
      ++i;
      continue;
    }
    const bool forms = plan.truncation[i] == tau && i + 1 < n && !plan.absorbed[i + 1];
    next.push_back({s.knots()[i] + tau * s.values()[i], s.values()[i], forms});
    ++out.record.propagated;
    if (forms) {
      out.record.events.push_back({EventKind::kTruncated, static_cast<int>(i), tau});
      out.record.events.push_back({EventKind::kShockFormed, static_cast<int>(i), tau});
    }
    ++i;
  }

  next = restore_order(next, tol);
  apply_boundaries(next, s.a(), s.b(), tol);
  next = restore_order(next, tol);

  std::vector<double> x(next.size());
  std::vector<double> u(next.size());
  std::vector<bool> flags(next.size());
  for (std::size_t i = 0; i < next.size(); ++i) {
    x[i] = next[i].x;
    u[i] = next[i].u;
    flags[i] = next[i].shock;
  }
  out.state.spline = FreeKnotSpline(std::move(x), std::move(u));
  if (out.state.spline.size() != flags.size()) {
    throw SolverError("advance_burgers: knot bookkeeping out of sync");
  }
  out.state.shock = std::move(flags);
  out.state.t = plan.reaches_limit ? t_limit : state.t + tau;
  out.state.step = state.step + 1;
  out.record.t = out.state.t;
  out.record.tau = tau;
  out.record.breakpoints = out.state.spline.interior_count();
  return out;
}

}  // namespace

BurgersStep advance_burgers(const BurgersState& state, double t_limit,
                            const BurgersConfig& cfg) {
  if (!(t_limit > state.t)) throw std::invalid_argument("advance_burgers: t_limit <= t");
  double cap = kInf;
  for (int attempt = 0; attempt <= cfg.max_halvings; ++attempt) {
    const StepPlan plan = plan_step(state, t_limit, cfg, cap);
    try {
      return execute(state, plan, t_limit);
    } catch (const SingularSlope&) {
    } catch (const BracketViolation&) {
    }
    cap = 0.5 * plan.tau;
  }
  throw SolverError("advance_burgers: step size halving limit reached");
}

BurgersRunResult run_burgers(const FreeKnotSpline& initial,
                             const std::vector<double>& times,
                             const BurgersConfig& cfg) {
  if (!(cfg.d_star > 0.0)) throw std::invalid_argument("run_burgers: d* must be positive");
  if (!(cfg.tau > 0.0)) throw std::invalid_argument("run_burgers: tau must be positive");
  BurgersRunResult result;
  BurgersState state = make_burgers_state(initial);
  result.trace.initial_breakpoints = initial.interior_count();
  std::vector<double> sorted = times;
  std::sort(sorted.begin(), sorted.end());
  constexpr std::size_t kMaxSteps = 1000000;
  for (double target : sorted) {
    if (target < state.t) throw std::invalid_argument("run_burgers: negative time");
    while (state.t < target) {
      BurgersStep step = advance_burgers(state, target, cfg);
      result.trace.steps.push_back(std::move(step.record));
      result.audits.insert(result.audits.end(), step.audits.begin(), step.audits.end());
      state = std::move(step.state);
      if (result.trace.steps.size() > kMaxSteps) {
        throw SolverError("run_burgers: step limit exceeded");
      }
    }
    result.snapshots.push_back({state.t, state.spline});
  }
  return result;
}

}  // namespace enn
