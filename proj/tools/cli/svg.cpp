#include "cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace bautin::cli {

namespace {

constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 34.0;
constexpr double kBottom = 50.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

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

/// Round tick spacing (1, 2 or 5 times a power of ten) giving about `target` intervals.
double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  return (f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0) * mag;
}

std::pair<double, double> padded(double lo, double hi) {
  if (!(lo <= hi)) {
    return {0.0, 1.0};
  }
  const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
  if (hi - lo < 1e-9 * scale) {
    const double d = std::max(std::abs(lo) * 0.05, 1e-12);
    return {lo - d, hi + d};
  }
  const double d = 0.04 * (hi - lo);
  return {lo - d, hi + d};
}

}  // namespace

void write_svg(std::ostream& out, const Plot& plot) {
  const auto& spec = plot.spec;
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  double ylo = xlo, yhi = -xlo;
  auto grow = [&](double x, double y) {
    if (std::isfinite(x) && std::isfinite(y)) {
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
      ylo = std::min(ylo, y);
      yhi = std::max(yhi, y);
    }
  };
  for (const auto& s : plot.series) {
    for (const auto& [x, y] : s.xy) grow(x, y);
  }
  for (const auto& m : plot.markers) grow(m.x, m.y);
  for (const auto& c : plot.cells) {
    grow(c.x - plot.cell_w / 2, c.y - plot.cell_h / 2);
    grow(c.x + plot.cell_w / 2, c.y + plot.cell_h / 2);
  }
  const bool tight_x = !plot.cells.empty() || spec.kind == PlotKind::TimeSeries;
  auto [x0, x1] = spec.x_range ? *spec.x_range
                               : (tight_x ? std::pair{xlo, xhi} : padded(xlo, xhi));
  auto [y0, y1] = spec.y_range ? *spec.y_range
                               : (plot.cells.empty() ? padded(ylo, yhi) : std::pair{ylo, yhi});
  if (!(x1 - x0 >= 1e-9 * std::max({1.0, std::abs(x0), std::abs(x1)}))) {
    std::tie(x0, x1) = padded(x0, x0);
  }
  if (!(y1 - y0 >= 1e-9 * std::max({1.0, std::abs(y0), std::abs(y1)}))) {
    std::tie(y0, y1) = padded(y0, y0);
  }

  const double pw = spec.width - kLeft - kRight;
  const double ph = spec.height - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + (y1 - y) / (y1 - y0) * ph; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
      << spec.height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(spec.width / 2.0) << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-size=\"13\">" << escape(spec.title) << "</text>\n";
  out << "<clipPath id=\"area\"><rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop)
      << "\" width=\"" << num(pw) << "\" height=\"" << num(ph) << "\"/></clipPath>\n";

  static const char* palette[] = {"#fde0c5", "#c6dbef", "#c7e9c0", "#bdbdbd", "#636363"};
  out << "<g clip-path=\"url(#area)\">\n";
  for (const auto& c : plot.cells) {
    const double w = plot.cell_w / (x1 - x0) * pw;
    const double h = plot.cell_h / (y1 - y0) * ph;
    out << "<rect x=\"" << num(px(c.x) - w / 2) << "\" y=\"" << num(py(c.y) - h / 2)
        << "\" width=\"" << num(w + 0.3) << "\" height=\"" << num(h + 0.3) << "\" fill=\""
        << palette[std::clamp(c.category, 0, 4)] << "\"/>\n";
  }
  for (const auto& s : plot.series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
    bool first = true;
    for (const auto& [x, y] : s.xy) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      out << (first ? "" : " ") << num(px(x)) << ',' << num(py(y));
      first = false;
    }
    out << "\"/>\n";
  }
  // Alternate label sides so that neighboring markers stay readable.
  for (std::size_t i = 0; i < plot.markers.size(); ++i) {
    const auto& m = plot.markers[i];
    const bool below = i % 2 == 1;
    out << "<circle cx=\"" << num(px(m.x)) << "\" cy=\"" << num(py(m.y))
        << "\" r=\"3.5\" fill=\"#d62728\"/>\n";
    out << "<text x=\"" << num(px(m.x) + (below ? -5 : 5)) << "\" y=\""
        << num(py(m.y) + (below ? 15 : -6)) << "\" text-anchor=\"" << (below ? "end" : "start")
        << "\">" << escape(m.label) << "</text>\n";
  }
  out << "</g>\n";

  out << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  const double xs = nice_step(x1 - x0, 5);
  for (double i = std::ceil(x0 / xs), last = std::min(std::floor(x1 / xs), i + 20); i <= last;
       ++i) {
    const double xv = i == 0.0 ? 0.0 : i * xs;
    out << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(kTop + ph + 15)
        << "\" text-anchor=\"middle\">" << tick(xv) << "</text>\n";
  }
  const double ys = nice_step(y1 - y0, 5);
  for (double i = std::ceil(y0 / ys), last = std::min(std::floor(y1 / ys), i + 20); i <= last;
       ++i) {
    const double yv = i == 0.0 ? 0.0 : i * ys;
    out << "<text x=\"" << num(kLeft - 5) << "\" y=\"" << num(py(yv) + 4)
        << "\" text-anchor=\"end\">" << tick(yv) << "</text>\n";
  }
  out << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(spec.height - 10.0)
      << "\" text-anchor=\"middle\">" << escape(spec.x_label) << "</text>\n";
  out << "<text transform=\"translate(14," << num(kTop + ph / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(spec.y_label) << "</text>\n";
  double ly = kTop + 14;
  for (const auto& [color, text] : plot.legend) {
    out << "<rect x=\"" << num(kLeft + pw - 110) << "\" y=\"" << num(ly - 9)
        << "\" width=\"10\" height=\"10\" fill=\"" << color << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(kLeft + pw - 95) << "\" y=\"" << num(ly) << "\">" << escape(text)
        << "</text>\n";
    ly += 14;
  }
  out << "</svg>\n";
}

}  // namespace bautin::cli
