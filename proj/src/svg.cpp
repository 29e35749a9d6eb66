#include "revroa/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace revroa {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 520.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::vector<double> ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) out.push_back(t);
  return out;
}

}  // namespace

SvgPlot::SvgPlot(double x_min, double x_max, double y_min, double y_max, std::string title)
    : x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max), title_(std::move(title)) {}

double SvgPlot::px(double x) const { return kLeft + (x - x_min_) / (x_max_ - x_min_) * (kWidth - kLeft - kRight); }
double SvgPlot::py(double y) const { return kHeight - kBottom - (y - y_min_) / (y_max_ - y_min_) * (kHeight - kTop - kBottom); }

void SvgPlot::raster(const ClassifiedGrid& grid) {
  const auto& s = grid.spec;
  const double dd = (s.delta_max - s.delta_min) / static_cast<double>(s.n_delta);
  const double dw = (s.omega_max - s.omega_min) / static_cast<double>(s.n_omega);
  std::ostringstream out;
  out << "<g shape-rendering=\"crispEdges\">\n";
  for (std::size_t j = 0; j < s.n_omega; ++j) {
    for (std::size_t i = 0; i < s.n_delta; ++i) {
      const Label l = grid.at(i, j).label;
      const char* color = l.verdict == Verdict::StableHome ? "#7fc97f"
                          : l.verdict == Verdict::StableNeighbor ? (l.neighbor > 0 ? "#80b1d3" : "#beaed4")
                                                                 : "#fb8072";
      const double x0 = s.delta_min + static_cast<double>(i) * dd;
      const double y1 = s.omega_min + static_cast<double>(j + 1) * dw;
      out << "<rect x=\"" << fmt(px(x0)) << "\" y=\"" << fmt(py(y1)) << "\" width=\"" << fmt(px(x0 + dd) - px(x0))
          << "\" height=\"" << fmt(py(y1 - dw) - py(y1)) << "\" fill=\"" << color << "\"/>\n";
    }
  }
  out << "</g>\n";
  body_ += out.str();
  legend_.emplace_back("#7fc97f", "stable (home)");
  legend_.emplace_back("#80b1d3", "stable (k > 0)");
  legend_.emplace_back("#beaed4", "stable (k < 0)");
  legend_.emplace_back("#fb8072", "unstable");
}

void SvgPlot::polyline(const std::vector<State>& points, const std::string& color, bool closed, double width,
                       const std::string& label) {
  if (points.empty()) return;
  std::ostringstream out;
  out << '<' << (closed ? "polygon" : "polyline") << " fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
      << fmt(width) << "\" points=\"";
  for (const State& p : points) out << fmt(px(p.x1)) << ',' << fmt(py(p.x2)) << ' ';
  out << "\"/>\n";
  body_ += out.str();
  if (!label.empty()) legend_.emplace_back(color, label);
}

void SvgPlot::marker(State p, const std::string& color, const std::string& label) {
  body_ += "<circle cx=\"" + fmt(px(p.x1)) + "\" cy=\"" + fmt(py(p.x2)) + "\" r=\"3.5\" fill=\"" + color + "\"/>\n";
  if (!label.empty()) legend_.emplace_back(color, label);
}

std::string SvgPlot::render(const std::string& config_hash, const std::string& timestamp) const {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<!-- config_hash: " << config_hash << " -->\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  if (!timestamp.empty()) out << "<metadata>generated " << escape(timestamp) << "</metadata>\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << fmt(kLeft) << "\" y=\"24\" font-size=\"14\">" << escape(title_) << "</text>\n";
  out << "<clipPath id=\"plot\"><rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\""
      << fmt(kWidth - kLeft - kRight) << "\" height=\"" << fmt(kHeight - kTop - kBottom) << "\"/></clipPath>\n";
  out << "<g clip-path=\"url(#plot)\">\n" << body_ << "</g>\n";
  out << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(kWidth - kLeft - kRight)
      << "\" height=\"" << fmt(kHeight - kTop - kBottom) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ticks(x_min_, x_max_)) {
    out << "<line x1=\"" << fmt(px(t)) << "\" y1=\"" << fmt(kHeight - kBottom) << "\" x2=\"" << fmt(px(t))
        << "\" y2=\"" << fmt(kHeight - kBottom + 5) << "\" stroke=\"black\"/>";
    out << "<text x=\"" << fmt(px(t)) << "\" y=\"" << fmt(kHeight - kBottom + 18) << "\" text-anchor=\"middle\">"
        << tick_label(t) << "</text>\n";
  }
  for (double t : ticks(y_min_, y_max_)) {
    out << "<line x1=\"" << fmt(kLeft - 5) << "\" y1=\"" << fmt(py(t)) << "\" x2=\"" << fmt(kLeft) << "\" y2=\""
        << fmt(py(t)) << "\" stroke=\"black\"/>";
    out << "<text x=\"" << fmt(kLeft - 8) << "\" y=\"" << fmt(py(t) + 4) << "\" text-anchor=\"end\">"
        << tick_label(t) << "</text>\n";
  }
  out << "<text x=\"" << fmt(kLeft + (kWidth - kLeft - kRight) / 2) << "\" y=\"" << fmt(kHeight - 10)
      << "\" text-anchor=\"middle\">delta [rad]</text>\n";
  out << "<text transform=\"translate(18," << fmt(kTop + (kHeight - kTop - kBottom) / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">ddelta [rad/s]</text>\n";
  double ly = kTop + 10;
  for (const auto& [color, label] : legend_) {
    out << "<rect x=\"" << fmt(kWidth - kRight + 12) << "\" y=\"" << fmt(ly - 8) << "\" width=\"12\" height=\"10\" fill=\""
        << color << "\"/><text x=\"" << fmt(kWidth - kRight + 30) << "\" y=\"" << fmt(ly) << "\">" << escape(label)
        << "</text>\n";
    ly += 16;
  }
  out << "</svg>\n";
  return out.str();
}

SvgPlot SvgPlot::fit(const std::vector<std::vector<State>>& sets, std::string title) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& set : sets) {
    for (const State& p : set) {
      if (!is_finite(p)) continue;
      x0 = std::min(x0, p.x1);
      x1 = std::max(x1, p.x1);
      y0 = std::min(y0, p.x2);
      y1 = std::max(y1, p.x2);
    }
  }
  if (!(x1 > x0)) {
    x0 = (std::isfinite(x0) ? x0 : 0.0) - 1.0;
    x1 = x0 + 2.0;
  }
  if (!(y1 > y0)) {
    y0 = (std::isfinite(y0) ? y0 : 0.0) - 1.0;
    y1 = y0 + 2.0;
  }
  const double mx = 0.05 * (x1 - x0), my = 0.05 * (y1 - y0);
  return SvgPlot(x0 - mx, x1 + mx, y0 - my, y1 + my, std::move(title));
}

std::string palette(std::size_t i) {
  static const char* colors[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d"};
  return colors[i % (sizeof colors / sizeof colors[0])];
}

}  // namespace revroa
