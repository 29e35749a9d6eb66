#include "revroa/io.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "revroa/errors.hpp"

namespace revroa {

namespace {

using nlohmann::ordered_json;

void comments(std::ostream& out, const std::vector<std::string>& lines) {
  for (const auto& line : lines) out << "# " << line << '\n';
}

ordered_json label_json(Label l) {
  ordered_json j;
  j["verdict"] = to_string(l);
  j["stable"] = l.stable();
  j["neighbor"] = l.neighbor;
  return j;
}

ordered_json state_json(State s) { return ordered_json::array({s.x1, s.x2}); }

ordered_json curve_metadata(const BoundaryCurve& c) {
  ordered_json j;
  j["t_back_s"] = c.t_back;
  j["shift"] = c.shift;
  j["scenario_hash"] = c.scenario_hash;
  j["sample_count"] = c.sample_count;
  j["vertex_count"] = c.vertices.size();
  j["loss_kind"] = c.loss_kind;
  j["max_loss"] = c.max_loss;
  j["area"] = polygon_area(c);
  j["warnings"] = c.warnings;
  return j;
}

}  // namespace

void write_boundary_csv(std::ostream& out, const BoundaryCurve& curve, const std::vector<std::string>& header_comments) {
  comments(out, header_comments);
  out << "theta_rad,delta_rad,ddelta_rad_per_s\n";
  for (std::size_t i = 0; i < curve.vertices.size(); ++i) {
    const double theta = i < curve.thetas.size() ? curve.thetas[i] : 0.0;
    out << format_double(theta) << ',' << format_double(curve.vertices[i].x1) << ','
        << format_double(curve.vertices[i].x2) << '\n';
  }
}

void write_boundary_json(std::ostream& out, const BoundaryCurve& curve, const std::string& config_hash,
                         double reverse_duration) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["config_hash"] = config_hash;
  j["kind"] = "tlroa_boundary";
  j["reverse_duration_s"] = reverse_duration;
  j["metadata"] = curve_metadata(curve);
  ordered_json verts = ordered_json::array();
  for (std::size_t i = 0; i < curve.vertices.size(); ++i) {
    verts.push_back({{"theta_rad", i < curve.thetas.size() ? curve.thetas[i] : 0.0},
                     {"delta_rad", curve.vertices[i].x1},
                     {"ddelta_rad_per_s", curve.vertices[i].x2}});
  }
  j["vertices"] = std::move(verts);
  out << j.dump(2) << '\n';
}

void write_grid_csv(std::ostream& out, const ClassifiedGrid& grid, const std::vector<std::string>& header_comments) {
  comments(out, header_comments);
  out << "i,j,delta_rad,ddelta_rad_per_s,label,neighbor,settle_time_s,note\n";
  for (std::size_t j = 0; j < grid.spec.n_omega; ++j) {
    for (std::size_t i = 0; i < grid.spec.n_delta; ++i) {
      const State c = grid.spec.cell_center(i, j);
      const CellResult& r = grid.at(i, j);
      const char* kind = r.label.verdict == Verdict::StableHome       ? "StableHome"
                         : r.label.verdict == Verdict::StableNeighbor ? "StableNeighbor"
                                                                      : "Unstable";
      out << i << ',' << j << ',' << format_double(c.x1) << ',' << format_double(c.x2) << ',' << kind << ','
          << r.label.neighbor << ',' << format_double(r.label.stable() ? r.settle_time : 0.0) << ',' << r.note
          << '\n';
    }
  }
}

void write_seed_json(std::ostream& out, const LyapunovSeed& seed, const std::string& config_hash) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["config_hash"] = config_hash;
  j["kind"] = "lyapunov_seed";
  j["equilibrium"] = state_json(seed.x_eq);
  j["P"] = ordered_json::array({ordered_json::array({seed.p(0, 0), seed.p(0, 1)}),
                                ordered_json::array({seed.p(1, 0), seed.p(1, 1)})});
  j["level"] = seed.level;
  j["halvings"] = seed.halvings;
  j["max_radius"] = seed.max_radius();
  out << j.dump(2) << '\n';
}

void write_report_json(std::ostream& out, const ClearingWindowReport& report, const BoundaryCurve& home,
                       const std::string& config_hash) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["config_hash"] = config_hash;
  j["kind"] = "clearing_assessment";
  j["dt_s"] = report.dt;
  j["k_max"] = report.k_max;
  j["curve"] = curve_metadata(home);
  ordered_json table = ordered_json::array();
  for (const auto& p : report.points) {
    ordered_json row;
    row["clearing_time_s"] = p.assessment.clearing_time;
    row["post_fault_state"] = state_json(p.assessment.post_fault_state);
    row["wrapped_state"] = state_json(p.assessment.wrapped_state);
    row["membership"] = label_json(p.assessment.verdict);
    row["simulation"] = label_json(p.simulation.label);
    if (p.simulation.label.stable()) row["simulation"]["settle_time_s"] = p.simulation.settle_time;
    if (!p.simulation.note.empty()) row["simulation"]["note"] = p.simulation.note;
    row["agreement"] = to_string(p.agreement);
    table.push_back(std::move(row));
  }
  j["verdicts"] = std::move(table);
  ordered_json intervals = ordered_json::array();
  for (const auto& iv : report.intervals) {
    intervals.push_back({{"t_begin_s", iv.t_begin}, {"t_end_s", iv.t_end}, {"verdict", label_json(iv.verdict)}});
  }
  j["intervals"] = std::move(intervals);
  j["stability_transitions_s"] = report.stability_transitions();
  j["diagnostics"] = {{"agree", report.count(Agreement::Agree)},
                      {"conservative", report.count(Agreement::Conservative)},
                      {"violation", report.count(Agreement::Violation)}};
  out << j.dump(2) << '\n';
}

void write_area_table_csv(std::ostream& out, const std::string& axis, const std::vector<AreaRow>& rows,
                          const std::vector<std::string>& header_comments) {
  comments(out, header_comments);
  out << axis << ",area,samples,budget_exceeded,boundary_file\n";
  for (const auto& r : rows) {
    out << r.value << ',' << format_double(r.area) << ',' << r.samples << ',' << (r.budget_exceeded ? 1 : 0) << ','
        << r.boundary_file << '\n';
  }
}

BoundaryCurve read_boundary_csv(std::istream& in) {
  BoundaryCurve c;
  std::string line;
  bool header = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line.rfind("theta_rad,delta_rad,ddelta_rad_per_s", 0) != 0) {
        throw ConfigError("boundary CSV: unexpected header '" + line + "'", line_no);
      }
      header = true;
      continue;
    }
    std::istringstream row(line);
    std::string a, b, d;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, d, ',')) {
      throw ConfigError("boundary CSV: expected three columns", line_no);
    }
    try {
      c.thetas.push_back(std::stod(a));
      c.vertices.push_back({std::stod(b), std::stod(d)});
    } catch (const std::exception&) {
      throw ConfigError("boundary CSV: malformed number", line_no);
    }
  }
  if (c.vertices.size() < 3) throw ConfigError("boundary CSV: fewer than three vertices");
  c.sample_count = c.vertices.size();
  return c;
}

}  // namespace revroa
