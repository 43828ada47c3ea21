#ifndef ENN_SPLINE_HPP_
#define ENN_SPLINE_HPP_

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace enn {

using ScalarFunction = std::function<double(double)>;

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Continuous piecewise-linear function on [knots.front(), knots.back()],
/// stored as strictly increasing breakpoints and the nodal values there.
///
/// The first and last knots are the interval end points; the interior knots
/// are the free breaking points. A shallow ReLU network with unit input
/// weights spans exactly this set (see ReluForm).
class FreeKnotSpline {
 public:
  FreeKnotSpline() = default;
  /// Validates ordering and sizes. Knots closer than
  /// kMergeTolerance * (b - a) are merged by averaging their values.
  FreeKnotSpline(std::vector<double> knots, std::vector<double> values);

  /// Affine function on [a, b] with the given end values.
  static FreeKnotSpline Linear(double a, double b, double ua, double ub);
  /// Nodal interpolant of `f` at the given knots.
  static FreeKnotSpline Interpolate(std::span<const double> knots,
                                    const ScalarFunction& f);

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return knots_.size(); }
  /// Number of interior breaking points n.
  std::size_t interior_count() const {
    return knots_.size() < 2 ? 0 : knots_.size() - 2;
  }
  double a() const { return knots_.front(); }
  double b() const { return knots_.back(); }
  double width(std::size_t cell) const {
    return knots_[cell + 1] - knots_[cell];
  }
  double slope(std::size_t cell) const {
    return (values_[cell + 1] - values_[cell]) / width(cell);
  }

  /// Index i of the cell [b_i, b_{i+1}] containing x (last cell for x == b).
  std::size_t cell_of(double x) const;

  /// Throws DomainError for x outside [a, b].
  double operator()(double x) const;
  /// Evaluates with constant extension outside [a, b].
  double clamped(double x) const;

  /// Exact integral over [x0, x1] within [a, b].
  double integrate(double x0, double x1) const;
  double integrate() const { return integrate(a(), b()); }

  ScalarFunction as_function() const;

  static constexpr double kMergeTolerance = 1e-12;

 private:
  std::vector<double> knots_;
  std::vector<double> values_;
};

/// v(x) = c_{-1} + c_0 (x - b_0) + sum_{i>=1} c_i max(0, x - b_i) on [b_0, end].
struct ReluForm {
  double bias = 0.0;
  std::vector<double> coefficients;  // c_0 .. c_n
  std::vector<double> breakpoints;   // b_0 .. b_n
  double end = 0.0;                  // right end point b_{n+1}

  double operator()(double x) const;
};

ReluForm to_relu_form(const FreeKnotSpline& s);
FreeKnotSpline from_relu_form(const ReluForm& r);

/// Composite Gauss-Legendre quadrature controls. Each integration cell is
/// split into `subdivisions` equal parts with `points` nodes each. `breaks`
/// are extra cell boundaries, typically discontinuities of a reference.
struct QuadratureOptions {
  int points = 5;
  int subdivisions = 4;
  std::vector<double> breaks;
};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int points);

/// Integral of f over [x0, x1] with cells given by sorted `cuts` (clipped to
/// the interval) plus the end points.
double integrate_function(const ScalarFunction& f, double x0, double x1,
                          std::span<const double> cuts,
                          const QuadratureOptions& opt = {});

struct LpError {
  double value = 0.0;     // relative when `relative`, absolute otherwise
  double absolute = 0.0;  // ||s - ref||_p
  double reference_norm = 0.0;
  bool relative = true;   // false when ||ref||_p == 0
};

/// ||s - ref||_p and its relative variant over the spline's interval.
/// Integration cells are the spline cells refined by opt.breaks.
LpError lp_error(const FreeKnotSpline& s, const ScalarFunction& ref,
                 double p = 2.0, const QuadratureOptions& opt = {});

// Snapshot files: JSON {"t", "knots", "values"} and CSV "x,u" rows, with
// 17 significant digits so that values round-trip exactly.
std::string to_json(const FreeKnotSpline& s, double t);
FreeKnotSpline from_json(const std::string& text, double* t = nullptr);
std::string to_csv(const FreeKnotSpline& s);
FreeKnotSpline from_csv(const std::string& text);

}  // namespace enn

#endif  // ENN_SPLINE_HPP_
