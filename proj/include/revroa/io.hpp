#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "revroa/assessor.hpp"
#include "revroa/geometry.hpp"
#include "revroa/lyapunov.hpp"
#include "revroa/roa.hpp"

namespace revroa {

inline constexpr int kSchemaVersion = 1;

/// Columns theta_rad, delta_rad, ddelta_rad_per_s.
void write_boundary_csv(std::ostream& out, const BoundaryCurve& curve, const std::vector<std::string>& header_comments);

/// JSON document with the vertices and the curve metadata.
void write_boundary_json(std::ostream& out, const BoundaryCurve& curve, const std::string& config_hash,
                         double reverse_duration);

/// One row per cell: i, j, delta, ddelta, label, neighbor, settle time, note.
void write_grid_csv(std::ostream& out, const ClassifiedGrid& grid, const std::vector<std::string>& header_comments);

void write_seed_json(std::ostream& out, const LyapunovSeed& seed, const std::string& config_hash);

void write_report_json(std::ostream& out, const ClearingWindowReport& report, const BoundaryCurve& home,
                       const std::string& config_hash);

struct AreaRow {
  std::string value;  ///< sweep value as given on the command line
  std::string boundary_file;
  double area = 0.0;
  std::size_t samples = 0;
  bool budget_exceeded = false;
};

void write_area_table_csv(std::ostream& out, const std::string& axis, const std::vector<AreaRow>& rows,
                          const std::vector<std::string>& header_comments);

/// Parsed boundary CSV as written by write_boundary_csv.
BoundaryCurve read_boundary_csv(std::istream& in);

}  // namespace revroa
