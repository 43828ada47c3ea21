#ifndef ENN_REFERENCE_HPP_
#define ENN_REFERENCE_HPP_

#include <stdexcept>
#include <string>
#include <vector>

#include "enn/flux.hpp"
#include "enn/spline.hpp"

namespace enn {

/// Invalid solver configuration (for example a CFL violation).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Closed-form solutions

/// Exact solution of one of the presets with a closed form.
class ExactSolution {
 public:
  /// Known names: adv-disc-sine, adv-pw-smooth, adv-pw-constant,
  /// burgers-riemann-shock, burgers-rarefaction. Throws ConfigError for anything else.
  static ExactSolution preset(const std::string& name);
  static bool has_preset(const std::string& name);

  const std::string& name() const { return name_; }
  double a() const { return a_; }
  double b() const { return b_; }

  /// u(x, t); the left limit at a discontinuity. Throws DomainError outside
  /// [a, b] or for t < 0.
  double operator()(double x, double t) const;

  /// Discontinuity and kink locations at time t inside (a, b), sorted.
  std::vector<double> breaks(double t) const;

  ScalarFunction at(double t) const;

 private:
  std::string name_;
  double a_ = 0.0;
  double b_ = 1.0;
};

// ---------------------------------------------------------------------------
// Characteristic root solve for smooth Burgers data before the first shock

/// u(x, t) = u0(xi) with x = xi + t u0(xi). `speed_bound` bounds |u0|.
/// Throws SolverError-like std::runtime_error when the root is not unique.
double preshock_exact_burgers(const ScalarFunction& u0, double x, double t,
                              double speed_bound);

// ---------------------------------------------------------------------------
// WENO3 / RK4 finite-volume reference

enum class WenoBoundary { kPeriodic, kOutflow };

struct WenoConfig {
  double a = 0.0;
  double b = 1.0;
  int cells = 1000;
  double dt = 4e-4;
  WenoBoundary boundary = WenoBoundary::kPeriodic;
  double weight_epsilon = 1e-6;
};

struct WenoSnapshot {
  double t = 0.0;
  std::vector<double> averages;
};

struct WenoResult {
  std::vector<double> centers;
  double dx = 0.0;
  std::vector<WenoSnapshot> snapshots;
  long steps = 0;
  /// Largest |change of sum(averages)*dx| over one step.
  double max_mass_drift = 0.0;

  /// Piecewise-linear interpolant of the cell averages through the cell
  /// centres, constant out to the end points.
  ScalarFunction interpolant(std::size_t snapshot) const;
};

/// Runs to every time in `times` (sorted ascending, >= 0). The last step
/// before an output time is shortened to land on it. Throws ConfigError when
/// max|f'(u0)| dt / dx > 0.5 or the grid is invalid.
WenoResult weno_solve(const ScalarFunction& u0, const WenoConfig& cfg,
                      const FluxModel& flux, const std::vector<double>& times);

}  // namespace enn

#endif  // ENN_REFERENCE_HPP_
