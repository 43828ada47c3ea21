#include "enn/data_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace enn {

namespace {

constexpr double kGolden = 0.6180339887498949;

// Solves the symmetric tridiagonal system (diag, off) x = rhs in place.
void solve_tridiagonal(std::vector<double> diag, const std::vector<double>& off,
                       std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = off[i - 1] / diag[i - 1];
    diag[i] -= w * off[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    rhs[i] = (rhs[i] - off[i] * rhs[i + 1]) / diag[i];
  }
}

class Fitter {
 public:
  Fitter(const ScalarFunction& target, double a, double b, const FitConfig& cfg)
      : target_(target), a_(a), b_(b), cfg_(cfg) {
    quad_.points = 5;
    quad_.subdivisions = 2;
    for (double x : cfg.jumps) {
      if (x > a && x < b) quad_.breaks.push_back(x);
    }
    std::sort(quad_.breaks.begin(), quad_.breaks.end());
    ua_ = target(a);
    ub_ = target(b);
    // One-sided limits at end-point jumps.
    for (double x : cfg.jumps) {
      if (x == a) ua_ = target(a + 1e-14 * (b - a));
      if (x == b) ub_ = target(b - 1e-14 * (b - a));
    }

    std::vector<double> cuts;
    for (int i = 1; i < 200; ++i) cuts.push_back(a + (b - a) * i / 200.0);
    QuadratureOptions norm_quad = quad_;
    norm_quad.subdivisions = 1;
    norm_ = std::sqrt(integrate_function(
        [&](double x) { const double v = target(x); return v * v; }, a, b,
        cuts, norm_quad));
  }

  FitResult run() {
    std::vector<double> knots;
    std::vector<bool> fixed;
    const int cells = std::max(1, cfg_.initial_cells);
    for (int i = 0; i <= cells; ++i) {
      knots.push_back(a_ + (b_ - a_) * i / cells);
      fixed.push_back(i == 0 || i == cells);
    }
    knots.back() = b_;
    // Ramp knots of fitted jumps stay fixed; uniform interior knots may move.
    const double w = cfg_.ramp_width * (b_ - a_);
    for (double x : quad_.breaks) {
      for (double y : {x - 0.5 * w, x + 0.5 * w}) {
        if (y > a_ && y < b_) {
          auto it = std::lower_bound(knots.begin(), knots.end(), y);
          fixed.insert(fixed.begin() + (it - knots.begin()), true);
          knots.insert(it, y);
        }
      }
    }

    FitResult result;
    Evaluation current = evaluate(knots);
    history_.push_back(relative(current.total));
    while (relative(current.total) > cfg_.epsilon &&
           static_cast<int>(knots.size()) < cfg_.max_knots) {
      const auto cell = worst_cell(knots, fixed, current);
      if (!cell) break;
      const double x = best_insertion(knots, *cell);
      auto it = knots.begin() + static_cast<std::ptrdiff_t>(*cell) + 1;
      fixed.insert(fixed.begin() + (it - knots.begin()), false);
      knots.insert(it, x);
      current = evaluate(knots);
      history_.push_back(relative(current.total));
      ++result.insertions;
    }
    if (relative(current.total) > cfg_.epsilon) {
      for (int pass = 0; pass < cfg_.relocation_passes; ++pass) {
        relocate(knots, fixed);
      }
      current = evaluate(knots);
    }

    result.spline = current.spline;
    QuadratureOptions report;
    report.breaks = quad_.breaks;
    const LpError final_error = lp_error(result.spline, target_, 2.0, report);
    result.error = final_error.value;
    result.target_norm = norm_;
    result.converged = result.error <= cfg_.epsilon;
    return result;
  }

  const std::vector<double>& history() const { return history_; }

 private:
  struct Evaluation {
    FreeKnotSpline spline;
    std::vector<double> cell_error;  // squared L2 error per cell
    double total = 0.0;              // squared L2 error
  };

  double relative(double squared_error) const {
    const double e = std::sqrt(std::max(0.0, squared_error));
    return norm_ > 0.0 ? e / norm_ : e;
  }

  // Gauss integration of g over [x0, x1], split at target jumps.
  template <typename G>
  double cell_integral(const G& g, double x0, double x1) const {
    double sum = 0.0;
    double lo = x0;
    auto emit = [&](double hi) {
      if (hi <= lo) return;
      const GaussRule& rule = gauss_legendre(quad_.points);
      const double h = (hi - lo) / quad_.subdivisions;
      for (int s = 0; s < quad_.subdivisions; ++s) {
        const double mid = lo + (s + 0.5) * h;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
          sum += 0.5 * h * rule.weights[q] * g(mid + 0.5 * h * rule.nodes[q]);
        }
      }
      lo = hi;
    };
    for (double j : quad_.breaks) {
      if (j > x0 && j < x1) emit(j);
    }
    emit(x1);
    return sum;
  }

  Evaluation evaluate(const std::vector<double>& knots) const {
    FreeKnotSpline s = least_squares_values(target_, knots, ua_, ub_, quad_);
    Evaluation e{std::move(s), {}, 0.0};
    const auto& x = e.spline.knots();
    const auto& u = e.spline.values();
    e.cell_error.resize(x.size() - 1);
    for (std::size_t c = 0; c + 1 < x.size(); ++c) {
      const double h = x[c + 1] - x[c];
      auto sq = [&](double y) {
        const double t = (y - x[c]) / h;
        const double d = (1.0 - t) * u[c] + t * u[c + 1] - target_(y);
        return d * d;
      };
      e.cell_error[c] = cell_integral(sq, x[c], x[c + 1]);
      e.total += e.cell_error[c];
    }
    return e;
  }

  double total_with(std::vector<double> knots, std::size_t index, double x) const {
    knots[index] = x;
    return evaluate(knots).total;
  }

  std::optional<std::size_t> worst_cell(const std::vector<double>& knots,
                                        const std::vector<bool>& fixed,
                                        const Evaluation& e) const {
    const double min_width = 1e-8 * (b_ - a_);
    std::optional<std::size_t> best;
    double best_err = -1.0;
    for (std::size_t c = 0; c + 1 < knots.size(); ++c) {
      if (knots[c + 1] - knots[c] < min_width) continue;
      // Skip ramp cells between the two knots of a fitted jump.
      if (fixed[c] && fixed[c + 1] && c > 0 && c + 2 < knots.size() &&
          knots[c + 1] - knots[c] <= cfg_.ramp_width * (b_ - a_) * (1 + 1e-9)) {
        continue;
      }
      if (e.cell_error[c] > best_err) {
        best_err = e.cell_error[c];
        best = c;
      }
    }
    return best;
  }

  // Golden-section search over (lo, hi) on f after a coarse scan.
  template <typename F>
  double minimize(const F& f, double lo, double hi, double* fbest) const {
    constexpr int kScan = 12;
    double best_x = 0.5 * (lo + hi);
    double best_f = f(best_x);
    int best_i = kScan / 2;
    for (int i = 1; i < kScan; ++i) {
      const double x = lo + (hi - lo) * i / kScan;
      const double v = f(x);
      if (v < best_f) {
        best_f = v;
        best_x = x;
        best_i = i;
      }
    }
    double l = lo + (hi - lo) * (best_i - 1) / kScan;
    double r = lo + (hi - lo) * (best_i + 1) / kScan;
    double x1 = r - kGolden * (r - l);
    double x2 = l + kGolden * (r - l);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int it = 0; it < cfg_.inner_solver_iters && r - l > 1e-15 * (b_ - a_); ++it) {
      if (f1 < f2) {
        r = x2;
        x2 = x1;
        f2 = f1;
        x1 = r - kGolden * (r - l);
        f1 = f(x1);
      } else {
        l = x1;
        x1 = x2;
        f1 = f2;
        x2 = l + kGolden * (r - l);
        f2 = f(x2);
      }
    }
    const double xg = f1 < f2 ? x1 : x2;
    const double fg = std::min(f1, f2);
    if (fg < best_f) {
      best_f = fg;
      best_x = xg;
    }
    *fbest = best_f;
    return best_x;
  }

  double best_insertion(const std::vector<double>& knots, std::size_t cell) const {
    const double lo = knots[cell];
    const double hi = knots[cell + 1];
    const double margin = 1e-6 * (hi - lo);
    std::vector<double> trial = knots;
    trial.insert(trial.begin() + static_cast<std::ptrdiff_t>(cell) + 1, 0.5 * (lo + hi));
    double fbest = 0.0;
    return minimize(
        [&](double x) { return total_with(trial, cell + 1, x); },
        lo + margin, hi - margin, &fbest);
  }

  void relocate(std::vector<double>& knots, const std::vector<bool>& fixed) const {
    for (std::size_t i = 1; i + 1 < knots.size(); ++i) {
      if (fixed[i]) continue;
      const double lo = knots[i - 1];
      const double hi = knots[i + 1];
      const double margin = 1e-6 * (hi - lo);
      const double before = total_with(knots, i, knots[i]);
      double after = 0.0;
      const double x = minimize([&](double y) { return total_with(knots, i, y); },
                                lo + margin, hi - margin, &after);
      if (after < before) knots[i] = x;
    }
  }

  const ScalarFunction& target_;
  double a_;
  double b_;
  FitConfig cfg_;
  QuadratureOptions quad_;
  double ua_ = 0.0;
  double ub_ = 0.0;
  double norm_ = 0.0;
  std::vector<double> history_;
};

}  // namespace

FreeKnotSpline least_squares_values(const ScalarFunction& target,
                                    std::vector<double> knots, double ua,
                                    double ub, const QuadratureOptions& quad) {
  const std::size_t n = knots.size();
  if (n < 2) throw std::invalid_argument("least_squares_values: need 2 knots");
  std::vector<double> values(n, 0.0);
  values.front() = ua;
  values.back() = ub;
  if (n == 2) return FreeKnotSpline(std::move(knots), std::move(values));

  const std::size_t m = n - 2;  // unknown interior values
  std::vector<double> diag(m, 0.0);
  std::vector<double> off(m > 0 ? m - 1 : 0, 0.0);
  std::vector<double> rhs(m, 0.0);
  const GaussRule& rule = gauss_legendre(quad.points);
  const int sub = std::max(1, quad.subdivisions);

  for (std::size_t c = 0; c + 1 < n; ++c) {
    const double x0 = knots[c];
    const double x1 = knots[c + 1];
    const double h = x1 - x0;
    // Moments of f against the two local hat pieces.
    double left = 0.0;
    double right = 0.0;
    double lo = x0;
    auto emit = [&](double hi) {
      if (hi <= lo) return;
      const double hs = (hi - lo) / sub;
      for (int s = 0; s < sub; ++s) {
        const double mid = lo + (s + 0.5) * hs;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
          const double y = mid + 0.5 * hs * rule.nodes[q];
          const double w = 0.5 * hs * rule.weights[q] * target(y);
          const double t = (y - x0) / h;
          left += w * (1.0 - t);
          right += w * t;
        }
      }
      lo = hi;
    };
    for (double j : quad.breaks) {
      if (j > x0 && j < x1) emit(j);
    }
    emit(x1);

    // Node c (left end of cell) and node c+1 (right end).
    if (c >= 1) {
      const std::size_t r = c - 1;
      diag[r] += h / 3.0;
      rhs[r] += left;
      if (c + 1 <= m) off[r] += h / 6.0;
      else rhs[r] -= h / 6.0 * ub;
    }
    if (c + 1 <= m) {
      const std::size_t r = c;
      diag[r] += h / 3.0;
      rhs[r] += right;
      if (c == 0) rhs[r] -= h / 6.0 * ua;
    }
  }
  solve_tridiagonal(diag, off, rhs);
  for (std::size_t i = 0; i < m; ++i) values[i + 1] = rhs[i];
  return FreeKnotSpline(std::move(knots), std::move(values));
}

FitResult fit(const ScalarFunction& target, double a, double b,
              const FitConfig& cfg) {
  if (!(b > a)) throw std::invalid_argument("fit: empty interval");
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) {
    throw std::invalid_argument("fit: epsilon must lie in (0, 1)");
  }
  if (cfg.max_knots < 2) throw std::invalid_argument("fit: max_knots < 2");
  Fitter fitter(target, a, b, cfg);
  FitResult r = fitter.run();
  r.history = fitter.history();
  return r;
}

FitResult fit_boundary(const ScalarFunction& g, double horizon,
                       const FitConfig& cfg) {
  return fit(g, 0.0, horizon, cfg);
}

}  // namespace enn
