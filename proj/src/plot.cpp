#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "enn/harness.hpp"

namespace enn {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;
constexpr int kReferenceSamples = 800;

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

std::string render_plot(const FreeKnotSpline& s, const ScalarFunction* reference,
                        const std::string& title) {
  std::vector<double> ref_x;
  std::vector<double> ref_u;
  if (reference) {
    for (int i = 0; i <= kReferenceSamples; ++i) {
      const double x = s.a() + (s.b() - s.a()) * i / kReferenceSamples;
      ref_x.push_back(x);
      ref_u.push_back((*reference)(x));
    }
  }
  double lo = *std::min_element(s.values().begin(), s.values().end());
  double hi = *std::max_element(s.values().begin(), s.values().end());
  for (double u : ref_u) {
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  if (hi - lo < 1e-12) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + plot_w * (x - s.a()) / (s.b() - s.a()); };
  auto py = [&](double u) { return kTop + plot_h * (hi - u) / (hi - lo); };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
         num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
         "\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
         escape(title) + "</text>\n";
  const double axis_y = kTop + plot_h;
  svg += "<line class=\"axis\" x1=\"" + num(kLeft) + "\" y1=\"" + num(axis_y) + "\" x2=\"" +
         num(kLeft + plot_w) + "\" y2=\"" + num(axis_y) + "\" stroke=\"black\"/>\n";
  svg += "<line class=\"axis\" x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" +
         num(kLeft) + "\" y2=\"" + num(axis_y) + "\" stroke=\"black\"/>\n";
  svg += "<text x=\"" + num(kLeft) + "\" y=\"" + num(axis_y + 40) + "\" font-size=\"12\">" +
         num(s.a()) + "</text>\n";
  svg += "<text x=\"" + num(kLeft + plot_w) + "\" y=\"" + num(axis_y + 40) +
         "\" text-anchor=\"end\" font-size=\"12\">" + num(s.b()) + "</text>\n";
  svg += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(kTop + 4) +
         "\" text-anchor=\"end\" font-size=\"12\">" + num(hi) + "</text>\n";
  svg += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(axis_y) +
         "\" text-anchor=\"end\" font-size=\"12\">" + num(lo) + "</text>\n";

  if (reference) {
    svg += "<polyline class=\"reference\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1\" "
           "stroke-dasharray=\"4 2\" points=\"";
    for (std::size_t i = 0; i < ref_x.size(); ++i) {
      if (i) svg += ' ';
      svg += num(px(ref_x[i])) + "," + num(py(ref_u[i]));
    }
    svg += "\"/>\n";
  }
  svg += "<polyline class=\"approximation\" fill=\"none\" stroke=\"#1f77b4\" "
         "stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) svg += ' ';
    svg += num(px(s.knots()[i])) + "," + num(py(s.values()[i]));
  }
  svg += "\"/>\n";
  for (double x : s.knots()) {
    svg += "<line class=\"tick\" x1=\"" + num(px(x)) + "\" y1=\"" + num(axis_y + 6) + "\" x2=\"" +
           num(px(x)) + "\" y2=\"" + num(axis_y + 18) + "\" stroke=\"black\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

void emit_plot(const Snapshot& snapshot, const ScalarFunction* reference,
               const std::filesystem::path& path) {
  char title[64];
  std::snprintf(title, sizeof(title), "t = %.4f, breakpoints = %zu", snapshot.t,
                snapshot.spline.interior_count());
  const std::string svg = render_plot(snapshot.spline, reference, title);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write plot " + path.string());
  out << svg;
  if (!out) throw std::runtime_error("write failed for plot " + path.string());
}

}  // namespace enn
