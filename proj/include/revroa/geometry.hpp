#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "revroa/model.hpp"

namespace revroa {

/// Closed polyline in the (delta, ddelta) plane. The edge from the last vertex
/// back to the first is implicit.
struct BoundaryCurve {
  std::vector<State> vertices;
  std::vector<double> thetas;  ///< seed angle per vertex; empty when not sampled
  double t_back = 0.0;
  int shift = 0;  ///< neighbour index k after translate_curve
  std::string scenario_hash;
  std::size_t sample_count = 0;
  std::string loss_kind;
  double max_loss = 0.0;
  std::vector<std::string> warnings;

  std::size_t size() const { return vertices.size(); }
};

BoundaryCurve translate_curve(const BoundaryCurve& b, int k);

/// Even-odd ray casting; points within 1e-12 of an edge count as inside.
bool contains(const BoundaryCurve& b, State p);
bool contains(std::span<const State> polygon, State p);

/// Signed shoelace area; positive for counterclockwise vertex order.
double polygon_area(const BoundaryCurve& b);
double polygon_area(std::span<const State> polygon);

double point_segment_distance(State p, State a, State b);

/// Indices (i, j) of the first pair of non-adjacent crossing edges, if any.
std::optional<std::pair<std::size_t, std::size_t>> find_self_intersection(std::span<const State> polygon);

/// Removes self-intersections by repeatedly cutting at a crossing and keeping
/// the loop of larger area, then orients the curve counterclockwise.
/// Returns the number of loops discarded.
int make_simple_ccw(BoundaryCurve& b);

/// Symmetric Hausdorff-type distance between two closed polylines measured
/// from every vertex of each to the other polyline, after dividing the
/// coordinates by (scale_x1, scale_x2).
double hausdorff_distance(std::span<const State> a, std::span<const State> b, double scale_x1 = 1.0,
                          double scale_x2 = 1.0);

}  // namespace revroa
