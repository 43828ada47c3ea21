#include "enn/spline.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace enn {

namespace {

GaussRule build_gauss_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Chebyshev initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      const double pn = n == 0 ? 1.0 : (n == 1 ? x : p1);
      const double pn1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pn1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

constexpr int kMaxGaussPoints = 32;

std::string format_double(double v) {
  std::array<char, 40> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                           std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

}  // namespace

const GaussRule& gauss_legendre(int points) {
  static const std::vector<GaussRule> rules = [] {
    std::vector<GaussRule> r(kMaxGaussPoints + 1);
    for (int n = 1; n <= kMaxGaussPoints; ++n) r[n] = build_gauss_rule(n);
    return r;
  }();
  if (points < 1 || points > kMaxGaussPoints) {
    throw std::invalid_argument("gauss_legendre: unsupported point count");
  }
  return rules[points];
}

FreeKnotSpline::FreeKnotSpline(std::vector<double> knots,
                               std::vector<double> values) {
  if (knots.size() != values.size()) {
    throw std::invalid_argument("FreeKnotSpline: knots/values size mismatch");
  }
  if (knots.size() < 2) {
    throw std::invalid_argument("FreeKnotSpline: need at least two knots");
  }
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!std::isfinite(knots[i]) || !std::isfinite(values[i])) {
      throw std::invalid_argument("FreeKnotSpline: non-finite entry");
    }
  }
  const double a = knots.front();
  const double b = knots.back();
  if (!(b > a)) throw std::invalid_argument("FreeKnotSpline: empty interval");
  const double tol = kMergeTolerance * (b - a);

  knots_.reserve(knots.size());
  values_.reserve(values.size());
  std::size_t i = 0;
  while (i < knots.size()) {
    // Group a run of near-coincident knots.
    std::size_t j = i + 1;
    while (j < knots.size() && knots[j] - knots[j - 1] <= tol) {
      if (knots[j] < knots[j - 1] - tol) break;
      ++j;
    }
    if (j < knots.size() && knots[j] < knots[j - 1]) {
      throw std::invalid_argument("FreeKnotSpline: knots not increasing");
    }
    double x = 0.0;
    double u = 0.0;
    for (std::size_t k = i; k < j; ++k) {
      x += knots[k];
      u += values[k];
    }
    x /= static_cast<double>(j - i);
    u /= static_cast<double>(j - i);
    if (i == 0) x = a;
    if (j == knots.size()) x = b;
    knots_.push_back(x);
    values_.push_back(u);
    i = j;
  }
  if (knots_.size() < 2) {
    throw std::invalid_argument("FreeKnotSpline: degenerate interval");
  }
}

FreeKnotSpline FreeKnotSpline::Linear(double a, double b, double ua,
                                      double ub) {
  return FreeKnotSpline({a, b}, {ua, ub});
}

FreeKnotSpline FreeKnotSpline::Interpolate(std::span<const double> knots,
                                           const ScalarFunction& f) {
  std::vector<double> x(knots.begin(), knots.end());
  std::vector<double> u(x.size());
  std::transform(x.begin(), x.end(), u.begin(), f);
  return FreeKnotSpline(std::move(x), std::move(u));
}

std::size_t FreeKnotSpline::cell_of(double x) const {
  auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  if (it == knots_.begin()) return 0;
  std::size_t i = static_cast<std::size_t>(it - knots_.begin()) - 1;
  return std::min(i, knots_.size() - 2);
}

double FreeKnotSpline::operator()(double x) const {
  if (!(x >= a() && x <= b())) {
    throw DomainError("FreeKnotSpline: evaluation point outside [a, b]");
  }
  return clamped(x);
}

double FreeKnotSpline::clamped(double x) const {
  if (x <= a()) return values_.front();
  if (x >= b()) return values_.back();
  const std::size_t i = cell_of(x);
  if (x == knots_[i]) return values_[i];
  const double w = (x - knots_[i]) / width(i);
  return (1.0 - w) * values_[i] + w * values_[i + 1];
}

double FreeKnotSpline::integrate(double x0, double x1) const {
  if (x1 < x0) throw DomainError("integrate: reversed bounds");
  if (x0 < a() || x1 > b()) throw DomainError("integrate: outside [a, b]");
  if (x0 == x1) return 0.0;
  double sum = 0.0;
  std::size_t i = cell_of(x0);
  double left = x0;
  double uleft = clamped(x0);
  while (left < x1) {
    const double right = std::min(x1, knots_[i + 1]);
    const double uright = right == knots_[i + 1] ? values_[i + 1] : clamped(right);
    sum += 0.5 * (right - left) * (uleft + uright);
    left = right;
    uleft = uright;
    ++i;
    if (i + 1 >= knots_.size()) break;
  }
  return sum;
}

ScalarFunction FreeKnotSpline::as_function() const {
  return [s = *this](double x) { return s.clamped(x); };
}

double ReluForm::operator()(double x) const {
  double v = bias;
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    v += coefficients[i] * std::max(0.0, x - breakpoints[i]);
  }
  return v;
}

ReluForm to_relu_form(const FreeKnotSpline& s) {
  ReluForm r;
  const std::size_t cells = s.size() - 1;
  r.bias = s.values().front();
  r.end = s.b();
  r.breakpoints.assign(s.knots().begin(), s.knots().end() - 1);
  r.coefficients.resize(cells);
  double previous = 0.0;
  for (std::size_t i = 0; i < cells; ++i) {
    const double m = s.slope(i);
    r.coefficients[i] = m - previous;
    previous = m;
  }
  return r;
}

FreeKnotSpline from_relu_form(const ReluForm& r) {
  std::vector<double> knots = r.breakpoints;
  knots.push_back(r.end);
  std::vector<double> values(knots.size());
  // Nodal values by accumulating slopes cell by cell.
  long double slope = 0.0L;
  long double value = r.bias;
  values[0] = r.bias;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    slope += r.coefficients[i];
    value += slope * (static_cast<long double>(knots[i + 1]) - knots[i]);
    values[i + 1] = static_cast<double>(value);
  }
  return FreeKnotSpline(std::move(knots), std::move(values));
}

double integrate_function(const ScalarFunction& f, double x0, double x1,
                          std::span<const double> cuts,
                          const QuadratureOptions& opt) {
  if (x1 < x0) throw DomainError("integrate_function: reversed bounds");
  std::vector<double> pts;
  pts.reserve(cuts.size() + opt.breaks.size() + 2);
  pts.push_back(x0);
  for (double c : cuts) {
    if (c > x0 && c < x1) pts.push_back(c);
  }
  for (double c : opt.breaks) {
    if (c > x0 && c < x1) pts.push_back(c);
  }
  pts.push_back(x1);
  std::sort(pts.begin(), pts.end());
  const GaussRule& rule = gauss_legendre(opt.points);
  const int sub = std::max(1, opt.subdivisions);
  double sum = 0.0;
  for (std::size_t c = 0; c + 1 < pts.size(); ++c) {
    const double h = (pts[c + 1] - pts[c]) / sub;
    if (h <= 0.0) continue;
    for (int s = 0; s < sub; ++s) {
      const double lo = pts[c] + s * h;
      const double mid = lo + 0.5 * h;
      double cell = 0.0;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        cell += rule.weights[q] * f(mid + 0.5 * h * rule.nodes[q]);
      }
      sum += 0.5 * h * cell;
    }
  }
  return sum;
}

LpError lp_error(const FreeKnotSpline& s, const ScalarFunction& ref, double p,
                 const QuadratureOptions& opt) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_error: p must be >= 1");
  auto diff = [&](double x) { return std::pow(std::abs(s.clamped(x) - ref(x)), p); };
  auto mag = [&](double x) { return std::pow(std::abs(ref(x)), p); };
  LpError e;
  e.absolute = std::pow(integrate_function(diff, s.a(), s.b(), s.knots(), opt), 1.0 / p);
  e.reference_norm = std::pow(integrate_function(mag, s.a(), s.b(), s.knots(), opt), 1.0 / p);
  if (e.reference_norm > 0.0) {
    e.value = e.absolute / e.reference_norm;
    e.relative = true;
  } else {
    e.value = e.absolute;
    e.relative = false;
  }
  return e;
}

std::string to_json(const FreeKnotSpline& s, double t) {
  std::ostringstream out;
  out << "{\"t\":" << format_double(t) << ",\"knots\":[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << (i ? "," : "") << format_double(s.knots()[i]);
  }
  out << "],\"values\":[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << (i ? "," : "") << format_double(s.values()[i]);
  }
  out << "]}\n";
  return out.str();
}

FreeKnotSpline from_json(const std::string& text, double* t) {
  const auto doc = nlohmann::json::parse(text);
  if (t != nullptr) *t = doc.value("t", 0.0);
  return FreeKnotSpline(doc.at("knots").get<std::vector<double>>(),
                        doc.at("values").get<std::vector<double>>());
}

std::string to_csv(const FreeKnotSpline& s) {
  std::string out = "x,u\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out += format_double(s.knots()[i]);
    out += ',';
    out += format_double(s.values()[i]);
    out += '\n';
  }
  return out;
}

FreeKnotSpline from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<double> x;
  std::vector<double> u;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == 'x') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("from_csv: malformed row");
    }
    x.push_back(std::stod(line.substr(0, comma)));
    u.push_back(std::stod(line.substr(comma + 1)));
  }
  return FreeKnotSpline(std::move(x), std::move(u));
}

}  // namespace enn
