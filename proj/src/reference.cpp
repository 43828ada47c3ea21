#include "enn/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace enn {

namespace {

constexpr double kPi = std::numbers::pi;

double disc_sine_profile(double y) {
  if (y > -0.9 && y < -0.6) return std::sin(kPi * (y + 0.9)) / 0.3;
  if (y > -0.2 && y < 0.1) return -1.0;
  return 0.0;
}

}  // namespace

bool ExactSolution::has_preset(const std::string& name) {
  return name == "adv-disc-sine" || name == "adv-pw-smooth" || name == "adv-pw-constant" ||
         name == "burgers-riemann-shock" || name == "burgers-rarefaction";
}

ExactSolution ExactSolution::preset(const std::string& name) {
  if (!has_preset(name)) throw ConfigError("no closed-form solution for preset '" + name + "'");
  ExactSolution e;
  e.name_ = name;
  if (name == "adv-pw-smooth") {
    e.a_ = 0.0;
    e.b_ = 1.0;
  } else {
    e.a_ = -1.0;
    e.b_ = 1.0;
  }
  return e;
}

double ExactSolution::operator()(double x, double t) const {
  if (t < 0.0) throw DomainError("exact: negative time");
  if (x < a_ || x > b_) throw DomainError("exact: x outside the domain");
  if (name_ == "adv-disc-sine") {
    // Left limit at the jumps: evaluate the open-interval formula, then
    // take the value from the left side when x sits exactly on a jump.
    const double y = x - t;
    for (double j : {-0.2, 0.1}) {
      if (y == j) return disc_sine_profile(y - 1e-15);
    }
    return disc_sine_profile(y);
  }
  if (name_ == "adv-pw-smooth") {
    return x <= t ? std::sin(t - x) : std::cos(x - t);
  }
  if (name_ == "adv-pw-constant") {
    return x <= t ? 1.0 : 0.0;
  }
  if (name_ == "burgers-riemann-shock") {
    return x <= 0.5 * t ? 1.0 : 0.0;
  }
  // burgers-rarefaction
  if (t == 0.0) return x <= 0.0 ? -1.0 : 1.0;
  if (x < -t) return -1.0;
  if (x > t) return 1.0;
  return x / t;
}

std::vector<double> ExactSolution::breaks(double t) const {
  std::vector<double> raw;
  if (name_ == "adv-disc-sine") {
    raw = {-0.9 + t, -0.6 + t, -0.2 + t, 0.1 + t};
  } else if (name_ == "adv-pw-smooth" || name_ == "adv-pw-constant") {
    raw = {t};
  } else if (name_ == "burgers-riemann-shock") {
    raw = {0.5 * t};
  } else {
    raw = {-t, t};
  }
  std::vector<double> out;
  for (double x : raw) {
    if (x > a_ && x < b_) out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ScalarFunction ExactSolution::at(double t) const {
  return [self = *this, t](double x) { return self(x, t); };
}

double preshock_exact_burgers(const ScalarFunction& u0, double x, double t,
                              double speed_bound) {
  if (t < 0.0) throw std::invalid_argument("preshock_exact_burgers: negative time");
  if (t == 0.0) return u0(x);
  const double reach = t * std::abs(speed_bound);
  if (reach == 0.0) return u0(x);
  auto h = [&](double xi) { return xi + t * u0(xi) - x; };

  // The root lies in [x - reach, x + reach]; sample for sign changes.
  const double lo0 = x - reach * (1.0 + 1e-9);
  const double hi0 = x + reach * (1.0 + 1e-9);
  constexpr int kSamples = 512;
  int changes = 0;
  double lo = lo0;
  double hi = hi0;
  double prev = h(lo0);
  if (prev == 0.0) return u0(lo0);
  for (int i = 1; i <= kSamples; ++i) {
    const double xi = lo0 + (hi0 - lo0) * i / kSamples;
    const double cur = h(xi);
    if (cur == 0.0) return u0(xi);
    if ((prev < 0.0) != (cur < 0.0)) {
      if (++changes == 1) {
        lo = xi - (hi0 - lo0) / kSamples;
        hi = xi;
      }
    }
    prev = cur;
  }
  if (changes == 0) throw std::runtime_error("preshock_exact_burgers: no characteristic root");
  if (changes > 1) {
    throw std::runtime_error("preshock_exact_burgers: characteristics have crossed");
  }

  // Newton with bisection safeguard on the bracket [lo, hi].
  double flo = h(lo);
  double xi = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double f = h(xi);
    if ((f < 0.0) == (flo < 0.0)) {
      lo = xi;
      flo = f;
    } else {
      hi = xi;
    }
    const double step = 1e-7 * (1.0 + std::abs(xi));
    const double df = (h(xi + step) - h(xi - step)) / (2.0 * step);
    double next = df != 0.0 ? xi - f / df : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - xi) <= 1e-15 * (1.0 + std::abs(xi)) || hi - lo <= 1e-15) {
      xi = next;
      break;
    }
    xi = next;
  }
  return u0(xi);
}

ScalarFunction WenoResult::interpolant(std::size_t snapshot) const {
  const std::vector<double>& v = snapshots.at(snapshot).averages;
  std::vector<double> x = centers;
  return [x, v](double p) {
    if (p <= x.front()) return v.front();
    if (p >= x.back()) return v.back();
    const auto it = std::upper_bound(x.begin(), x.end(), p);
    const std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
    const double w = (p - x[i]) / (x[i + 1] - x[i]);
    return (1.0 - w) * v[i] + w * v[i + 1];
  };
}

namespace {

class WenoScheme {
 public:
  WenoScheme(const WenoConfig& cfg, const FluxModel& flux)
      : cfg_(cfg), flux_(flux), n_(cfg.cells), dx_((cfg.b - cfg.a) / cfg.cells),
        ext_(cfg.cells + 4), fp_(cfg.cells + 4), fm_(cfg.cells + 4), hat_(cfg.cells + 1) {}

  double dx() const { return dx_; }

  // du/dt = -(F_{i+1/2} - F_{i-1/2}) / dx
  void rhs(const std::vector<double>& u, std::vector<double>& out) {
    for (int i = 0; i < n_; ++i) ext_[i + 2] = u[i];
    if (cfg_.boundary == WenoBoundary::kPeriodic) {
      ext_[0] = u[n_ - 2];
      ext_[1] = u[n_ - 1];
      ext_[n_ + 2] = u[0];
      ext_[n_ + 3] = u[1];
    } else {
      ext_[0] = ext_[1] = u[0];
      ext_[n_ + 2] = ext_[n_ + 3] = u[n_ - 1];
    }
    double speed = 0.0;
    for (double v : ext_) speed = std::max(speed, std::abs(flux_.speed(v)));
    for (std::size_t i = 0; i < ext_.size(); ++i) {
      const double f = flux_.flux(ext_[i]);
      fp_[i] = 0.5 * (f + speed * ext_[i]);
      fm_[i] = 0.5 * (f - speed * ext_[i]);
    }
    // Interface k sits between extended cells k+1 and k+2.
    for (int k = 0; k <= n_; ++k) {
      const int i = k + 1;
      hat_[k] = left_biased(fp_[i - 1], fp_[i], fp_[i + 1]) +
                left_biased(fm_[i + 2], fm_[i + 1], fm_[i]);
    }
    out.resize(n_);
    for (int i = 0; i < n_; ++i) out[i] = -(hat_[i + 1] - hat_[i]) / dx_;
  }

 private:
  // Third-order value at the face of cell v0 facing v1, from {vm, v0, v1}.
  double left_biased(double vm, double v0, double v1) const {
    const double p0 = -0.5 * vm + 1.5 * v0;
    const double p1 = 0.5 * v0 + 0.5 * v1;
    const double b0 = (v0 - vm) * (v0 - vm);
    const double b1 = (v1 - v0) * (v1 - v0);
    const double eps = cfg_.weight_epsilon;
    const double a0 = (1.0 / 3.0) / ((eps + b0) * (eps + b0));
    const double a1 = (2.0 / 3.0) / ((eps + b1) * (eps + b1));
    return (a0 * p0 + a1 * p1) / (a0 + a1);
  }

  WenoConfig cfg_;
  FluxModel flux_;
  int n_;
  double dx_;
  std::vector<double> ext_, fp_, fm_, hat_;
};

}  // namespace

WenoResult weno_solve(const ScalarFunction& u0, const WenoConfig& cfg,
                      const FluxModel& flux, const std::vector<double>& times) {
  if (cfg.cells < 4) throw ConfigError("weno_solve: need at least 4 cells");
  if (!(cfg.b > cfg.a)) throw ConfigError("weno_solve: empty domain");
  if (!(cfg.dt > 0.0)) throw ConfigError("weno_solve: dt must be positive");

  WenoScheme scheme(cfg, flux);
  const double dx = scheme.dx();
  WenoResult res;
  res.dx = dx;
  res.centers.resize(cfg.cells);
  std::vector<double> u(cfg.cells);
  QuadratureOptions quad;
  quad.subdivisions = 1;
  for (int i = 0; i < cfg.cells; ++i) {
    const double x0 = cfg.a + i * dx;
    res.centers[i] = x0 + 0.5 * dx;
    u[i] = integrate_function(u0, x0, x0 + dx, {}, quad) / dx;
  }

  double speed = 0.0;
  for (double v : u) speed = std::max(speed, std::abs(flux.speed(v)));
  const double cfl = speed * cfg.dt / dx;
  if (cfl > 0.5) {
    throw ConfigError("weno_solve: CFL number " + std::to_string(cfl) + " exceeds 0.5");
  }

  std::vector<double> sorted = times;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> k1, k2, k3, k4, tmp(cfg.cells);
  double t = 0.0;
  auto mass = [&](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    return m * dx;
  };
  for (double target : sorted) {
    if (target < t) throw ConfigError("weno_solve: output times must be nonnegative");
    while (target - t > 1e-12 * std::max(1.0, target)) {
      const double h = std::min(cfg.dt, target - t);
      const double before = mass(u);
      scheme.rhs(u, k1);
      for (int i = 0; i < cfg.cells; ++i) tmp[i] = u[i] + 0.5 * h * k1[i];
      scheme.rhs(tmp, k2);
      for (int i = 0; i < cfg.cells; ++i) tmp[i] = u[i] + 0.5 * h * k2[i];
      scheme.rhs(tmp, k3);
      for (int i = 0; i < cfg.cells; ++i) tmp[i] = u[i] + h * k3[i];
      scheme.rhs(tmp, k4);
      for (int i = 0; i < cfg.cells; ++i) {
        u[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      }
      if (cfg.boundary == WenoBoundary::kPeriodic) {
        res.max_mass_drift = std::max(res.max_mass_drift, std::abs(mass(u) - before));
      }
      t = (target - t <= cfg.dt) ? target : t + h;
      ++res.steps;
    }
    res.snapshots.push_back({target, u});
  }
  return res;
}

}  // namespace enn
