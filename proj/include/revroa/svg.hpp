#pragma once

#include <string>
#include <vector>

#include "revroa/model.hpp"
#include "revroa/roa.hpp"

namespace revroa {

/// Phase-plane figure: delta [rad] on x, ddelta [rad/s] on y.
class SvgPlot {
 public:
  SvgPlot(double x_min, double x_max, double y_min, double y_max, std::string title);

  void raster(const ClassifiedGrid& grid);
  void polyline(const std::vector<State>& points, const std::string& color, bool closed, double width = 1.5,
                const std::string& label = {});
  void marker(State p, const std::string& color, const std::string& label = {});

  /// SVG 1.1 document. `timestamp` is written as metadata when non-empty.
  std::string render(const std::string& config_hash, const std::string& timestamp = {}) const;

  /// Axis range covering the points with a small margin.
  static SvgPlot fit(const std::vector<std::vector<State>>& sets, std::string title);

 private:
  double px(double x) const;
  double py(double y) const;

  double x_min_, x_max_, y_min_, y_max_;
  std::string title_;
  std::string body_;
  std::vector<std::pair<std::string, std::string>> legend_;
};

/// Distinct colours for overlaid curves.
std::string palette(std::size_t i);

}  // namespace revroa
