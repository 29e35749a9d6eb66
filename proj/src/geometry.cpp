#include "revroa/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace revroa {

namespace {

constexpr double kEdgeTolerance = 1e-12;

double cross(State o, State a, State b) { return (a.x1 - o.x1) * (b.x2 - o.x2) - (a.x2 - o.x2) * (b.x1 - o.x1); }

int sign(double v) { return (v > 0.0) - (v < 0.0); }

bool on_segment(State p, State a, State b) {
  return std::min(a.x1, b.x1) <= p.x1 && p.x1 <= std::max(a.x1, b.x1) && std::min(a.x2, b.x2) <= p.x2 &&
         p.x2 <= std::max(a.x2, b.x2);
}

bool segments_cross(State a, State b, State c, State d) {
  const int d1 = sign(cross(c, d, a));
  const int d2 = sign(cross(c, d, b));
  const int d3 = sign(cross(a, b, c));
  const int d4 = sign(cross(a, b, d));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && on_segment(a, c, d)) return true;
  if (d2 == 0 && on_segment(b, c, d)) return true;
  if (d3 == 0 && on_segment(c, a, b)) return true;
  if (d4 == 0 && on_segment(d, a, b)) return true;
  return false;
}

State intersection_point(State a, State b, State c, State d, double& s_out) {
  const double den = (b.x1 - a.x1) * (d.x2 - c.x2) - (b.x2 - a.x2) * (d.x1 - c.x1);
  double s = 0.5;
  if (den != 0.0) s = ((c.x1 - a.x1) * (d.x2 - c.x2) - (c.x2 - a.x2) * (d.x1 - c.x1)) / den;
  s = std::clamp(s, 0.0, 1.0);
  s_out = s;
  return a + s * (b - a);
}

}  // namespace

BoundaryCurve translate_curve(const BoundaryCurve& b, int k) {
  BoundaryCurve out = b;
  const double dx = 2.0 * std::numbers::pi * k;
  for (auto& v : out.vertices) v.x1 += dx;
  out.shift = b.shift + k;
  return out;
}

double point_segment_distance(State p, State a, State b) {
  const State ab = b - a;
  const double len2 = ab.x1 * ab.x1 + ab.x2 * ab.x2;
  double s = 0.0;
  if (len2 > 0.0) s = std::clamp(((p.x1 - a.x1) * ab.x1 + (p.x2 - a.x2) * ab.x2) / len2, 0.0, 1.0);
  return norm(p - (a + s * ab));
}

bool contains(std::span<const State> poly, State p) {
  const std::size_t n = poly.size();
  if (n == 0) return false;
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const State a = poly[i];
    const State b = poly[j];
    if (point_segment_distance(p, a, b) <= kEdgeTolerance) return true;
    if ((a.x2 > p.x2) != (b.x2 > p.x2)) {
      const double x_cross = a.x1 + (p.x2 - a.x2) * (b.x1 - a.x1) / (b.x2 - a.x2);
      if (p.x1 < x_cross) inside = !inside;
    }
  }
  return inside;
}

bool contains(const BoundaryCurve& b, State p) { return contains(std::span<const State>(b.vertices), p); }

double polygon_area(std::span<const State> poly) {
  const std::size_t n = poly.size();
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const State a = poly[i];
    const State b = poly[(i + 1) % n];
    twice += a.x1 * b.x2 - b.x1 * a.x2;
  }
  return 0.5 * twice;
}

double polygon_area(const BoundaryCurve& b) { return polygon_area(std::span<const State>(b.vertices)); }

std::optional<std::pair<std::size_t, std::size_t>> find_self_intersection(std::span<const State> poly) {
  const std::size_t n = poly.size();
  if (n < 4) return std::nullopt;
  for (std::size_t i = 0; i < n; ++i) {
    const State a = poly[i];
    const State b = poly[(i + 1) % n];
    const double ax_lo = std::min(a.x1, b.x1), ax_hi = std::max(a.x1, b.x1);
    const double ay_lo = std::min(a.x2, b.x2), ay_hi = std::max(a.x2, b.x2);
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent through the closing edge
      const State c = poly[j];
      const State d = poly[(j + 1) % n];
      if (std::max(c.x1, d.x1) < ax_lo || std::min(c.x1, d.x1) > ax_hi || std::max(c.x2, d.x2) < ay_lo ||
          std::min(c.x2, d.x2) > ay_hi) {
        continue;
      }
      if (segments_cross(a, b, c, d)) return std::make_pair(i, j);
    }
  }
  return std::nullopt;
}

int make_simple_ccw(BoundaryCurve& b) {
  int discarded = 0;
  const bool has_theta = b.thetas.size() == b.vertices.size();
  while (b.vertices.size() >= 4) {
    const auto hit = find_self_intersection(b.vertices);
    if (!hit) break;
    const auto [i, j] = *hit;
    const std::size_t n = b.vertices.size();
    double s = 0.0;
    const State p = intersection_point(b.vertices[i], b.vertices[(i + 1) % n], b.vertices[j],
                                       b.vertices[(j + 1) % n], s);
    double p_theta = 0.0;
    if (has_theta) p_theta = b.thetas[i] + s * (b.thetas[(i + 1) % n] - b.thetas[i]);

    // Loop A: p, v[i+1..j]. Loop B: v[j+1..n-1], v[0..i], p.
    std::vector<State> loop_a{p};
    std::vector<double> theta_a{p_theta};
    for (std::size_t k = i + 1; k <= j; ++k) {
      loop_a.push_back(b.vertices[k]);
      if (has_theta) theta_a.push_back(b.thetas[k]);
    }
    std::vector<State> loop_b;
    std::vector<double> theta_b;
    for (std::size_t k = j + 1; k < n; ++k) {
      loop_b.push_back(b.vertices[k]);
      if (has_theta) theta_b.push_back(b.thetas[k]);
    }
    for (std::size_t k = 0; k <= i; ++k) {
      loop_b.push_back(b.vertices[k]);
      if (has_theta) theta_b.push_back(b.thetas[k]);
    }
    loop_b.push_back(p);
    theta_b.push_back(p_theta);

    const bool keep_a = std::abs(polygon_area(loop_a)) > std::abs(polygon_area(loop_b));
    b.vertices = keep_a ? std::move(loop_a) : std::move(loop_b);
    if (has_theta) {
      b.thetas = keep_a ? std::move(theta_a) : std::move(theta_b);
    }
    ++discarded;
  }
  if (polygon_area(b) < 0.0) {
    std::reverse(b.vertices.begin(), b.vertices.end());
    if (has_theta) std::reverse(b.thetas.begin(), b.thetas.end());
  }
  if (discarded > 0) {
    b.warnings.push_back("self-intersection repaired: " + std::to_string(discarded) + " loop(s) discarded");
  }
  return discarded;
}

double hausdorff_distance(std::span<const State> a, std::span<const State> b, double sx, double sy) {
  auto scaled = [sx, sy](std::span<const State> in) {
    std::vector<State> out;
    out.reserve(in.size());
    for (State s : in) out.push_back({s.x1 / sx, s.x2 / sy});
    return out;
  };
  const auto pa = scaled(a);
  const auto pb = scaled(b);
  auto directed = [](const std::vector<State>& from, const std::vector<State>& to) {
    double worst = 0.0;
    for (State p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < to.size(); ++i) {
        best = std::min(best, point_segment_distance(p, to[i], to[(i + 1) % to.size()]));
      }
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(pa, pb), directed(pb, pa));
}

}  // namespace revroa
