// revroa: forward RoA grids, reverse-time TLRoA boundaries, clearing-time
// assessment and parameter sweeps from a config file.
//
// Exit codes: 0 ok, 1 runtime failure, 2 configuration error,
// 3 reverse time requested on a hard-saturated model.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "revroa/assessor.hpp"
#include "revroa/config.hpp"
#include "revroa/errors.hpp"
#include "revroa/io.hpp"
#include "revroa/roa.hpp"
#include "revroa/svg.hpp"

#ifndef REVROA_VERSION
#define REVROA_VERSION "dev"
#endif

namespace fs = std::filesystem;
using namespace revroa;

namespace {

enum ExitCode { kOk = 0, kRuntime = 1, kConfig = 2, kIrreversible = 3 };

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = "out";
  unsigned jobs = 0;
  bool deterministic = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "Config file (sectioned key = value); defaults apply when omitted");
  cmd->add_option("--set", o.overrides, "Override a config key, e.g. --set SCR=1.1 (repeatable)");
  cmd->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
  cmd->add_option("--jobs", o.jobs, "Worker threads (0 = available parallelism)")->capture_default_str();
  cmd->add_flag("--deterministic", o.deterministic, "Suppress timestamps and wall times in outputs");
}

RunConfig load(const CommonOptions& o, const std::vector<std::string>& extra = {}) {
  auto overrides = o.overrides;
  overrides.insert(overrides.end(), extra.begin(), extra.end());
  if (o.config_path.empty()) return parse_config("", overrides);
  try {
    return load_config(o.config_path, overrides);
  } catch (const ConfigError& e) {
    throw ConfigError(o.config_path + ": " + e.what());
  }
}

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

/// Collects output files and writes manifest.json last.
class Run {
 public:
  Run(std::string command, const CommonOptions& opts, const RunConfig& cfg)
      : command_(std::move(command)),
        opts_(opts),
        hash_(config_hash(cfg)),
        start_(std::chrono::steady_clock::now()),
        sims_at_start_(integration_count()) {
    fs::create_directories(opts.out_dir);
  }

  const std::string& hash() const { return hash_; }

  std::vector<std::string> csv_header(const std::string& what) const {
    return {"config_hash: " + hash_, "command: " + command_, "content: " + what,
            "units: delta [rad], ddelta [rad/s], time [s]"};
  }

  void write(const std::string& name, const std::string& kind, const std::string& content) {
    std::ofstream out(fs::path(opts_.out_dir) / name, std::ios::binary);
    if (!out) throw Error("cannot write " + (fs::path(opts_.out_dir) / name).string());
    out << content;
    outputs_.push_back({name, kind});
  }

  std::string svg(const SvgPlot& plot) const {
    return plot.render(hash_, opts_.deterministic ? std::string() : timestamp_utc());
  }

  void finish(nlohmann::ordered_json extra = nlohmann::ordered_json::object()) {
    nlohmann::ordered_json m;
    m["schema_version"] = kSchemaVersion;
    m["config_hash"] = hash_;
    m["command"] = command_;
    m["tool_version"] = REVROA_VERSION;
    m["overrides"] = opts_.overrides;
    m["simulation_count"] = integration_count() - sims_at_start_;
    if (opts_.deterministic) {
      m["wall_time_s"] = nullptr;
    } else {
      m["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (const auto& [name, kind] : outputs_) files.push_back({{"path", name}, {"kind", kind}});
    m["outputs"] = std::move(files);
    m["results"] = std::move(extra);
    std::ofstream out(fs::path(opts_.out_dir) / "manifest.json", std::ios::binary);
    out << m.dump(2) << '\n';
  }

 private:
  std::string command_;
  CommonOptions opts_;
  std::string hash_;
  std::chrono::steady_clock::time_point start_;
  std::size_t sims_at_start_;
  std::vector<std::pair<std::string, std::string>> outputs_;
};

template <class F>
std::string to_text(F&& f) {
  std::ostringstream out;
  f(out);
  return out.str();
}

GridSpec grid_spec(const RunConfig& cfg, State x_eq) {
  GridSpec g = GridSpec::centered(x_eq, cfg.grid.delta_half_width);
  g.omega_min = cfg.grid.ddelta_min;
  g.omega_max = cfg.grid.ddelta_max;
  g.n_delta = cfg.grid.n_delta;
  g.n_omega = cfg.grid.n_ddelta;
  return g;
}

struct Tlroa {
  LyapunovSeed seed;
  TlroaResult result;
};

Tlroa run_tlroa(const RunConfig& cfg, unsigned jobs) {
  Tlroa t;
  t.seed = build_seed(cfg.scenario, cfg.seed_options());
  t.result = estimate_tlroa(cfg.scenario, t.seed, cfg.tlroa.t_back, cfg.tlroa.sampler, cfg.integrator, jobs);
  t.result.curve.scenario_hash = config_hash(cfg);
  return t;
}

int cmd_forward_roa(const CommonOptions& o) {
  const RunConfig cfg = load(o);
  Run run("forward-roa", o, cfg);
  const LyapunovSeed seed = build_seed(cfg.scenario, cfg.seed_options());
  const ClassifiedGrid grid = forward_roa(cfg.scenario, seed, grid_spec(cfg, seed.x_eq), cfg.integrator, o.jobs);

  run.write("grid.csv", "classified_grid", to_text([&](std::ostream& out) {
              write_grid_csv(out, grid, run.csv_header("forward-simulated classification of cell centres"));
            }));
  const auto& s = grid.spec;
  SvgPlot plot(s.delta_min, s.delta_max, s.omega_min, s.omega_max, "Forward-simulated region of attraction");
  plot.raster(grid);
  plot.marker(seed.x_eq, "black", "post-fault equilibrium");
  run.write("roa.svg", "svg", run.svg(plot));

  nlohmann::ordered_json results;
  results["cells"] = grid.cells.size();
  results["stable_home"] = grid.count(Verdict::StableHome);
  results["stable_neighbor"] = grid.count(Verdict::StableNeighbor);
  results["unstable"] = grid.count(Verdict::Unstable);
  results["stable_home_area"] = grid.area(Verdict::StableHome);
  run.finish(results);
  std::cout << "forward-roa: " << grid.cells.size() << " cells, " << grid.count(Verdict::StableHome) << " home, "
            << grid.count(Verdict::StableNeighbor) << " neighbour, " << grid.count(Verdict::Unstable)
            << " unstable -> " << o.out_dir << '\n';
  return kOk;
}

void write_tlroa_files(Run& run, const Tlroa& t, const std::string& stem) {
  const auto& curve = t.result.curve;
  run.write(stem + ".csv", "boundary_csv", to_text([&](std::ostream& out) {
              auto header = run.csv_header("TLRoA boundary at the clearing instant");
              header.push_back("t_back_s: " + format_double(curve.t_back));
              header.push_back("sample_count: " + std::to_string(curve.sample_count));
              for (const auto& w : curve.warnings) header.push_back("warning: " + w);
              write_boundary_csv(out, curve, header);
            }));
  run.write(stem + ".json", "boundary_json", to_text([&](std::ostream& out) {
              write_boundary_json(out, curve, run.hash(), t.result.reverse_duration);
            }));
}

int cmd_tlroa(const CommonOptions& o) {
  const RunConfig cfg = load(o);
  if (cfg.scenario.params.sat_mode == SatMode::Hard) {
    throw HardSaturationNotReversible("sat_mode = hard cannot be integrated in reverse time; use smooth");
  }
  Run run("tlroa", o, cfg);
  const Tlroa t = run_tlroa(cfg, o.jobs);
  write_tlroa_files(run, t, "boundary");
  run.write("samples.csv", "samples_csv", to_text([&](std::ostream& out) {
              write_samples_csv(out, t.result.samples, run.csv_header("sampler state, ordered by seed angle"));
            }));
  const BoundaryCurve ellipse = seed_polygon(t.seed, 128);
  run.write("seed.json", "seed_json", to_text([&](std::ostream& out) { write_seed_json(out, t.seed, run.hash()); }));
  run.write("seed_ellipse.csv", "seed_csv", to_text([&](std::ostream& out) {
              write_boundary_csv(out, ellipse, run.csv_header("seed ellipse"));
            }));
  SvgPlot plot = SvgPlot::fit({t.result.curve.vertices}, "Time-limited region of attraction");
  plot.polyline(t.result.curve.vertices, palette(0), true, 1.5, "TLRoA, t_back " + format_double(cfg.tlroa.t_back) + " s");
  plot.polyline(ellipse.vertices, "black", true, 1.0, "seed ellipse");
  plot.marker(t.seed.x_eq, "black");
  run.write("tlroa.svg", "svg", run.svg(plot));

  nlohmann::ordered_json results;
  results["sample_count"] = t.result.samples.size();
  results["termination"] = to_string(t.result.samples.termination);
  results["budget_exceeded"] = t.result.budget_exceeded;
  results["area"] = polygon_area(t.result.curve);
  results["seed_halvings"] = t.seed.halvings;
  results["warnings"] = t.result.curve.warnings;
  run.finish(results);
  std::cout << "tlroa: " << t.result.samples.size() << " samples (" << to_string(t.result.samples.termination)
            << "), area " << format_double(polygon_area(t.result.curve)) << " -> " << o.out_dir << '\n';
  if (t.result.budget_exceeded) std::cerr << "warning: sampler budget exhausted before the loss goal\n";
  return kOk;
}

struct AssessOptions {
  double t_clear = -1.0;
  bool sweep = false;
  std::string boundary;
};

int cmd_assess(const CommonOptions& o, const AssessOptions& a) {
  const RunConfig cfg = load(o);
  SweepRange range = cfg.assess.sweep;
  if (!a.sweep) {
    const double t = a.t_clear >= 0.0 ? a.t_clear : cfg.assess.t_clear;
    range = {t, t, 1.0};
  }
  range.validate();
  if (range.t_begin < cfg.scenario.t_fault_start) throw ConfigError("clearing time precedes the fault start");

  Run run("assess", o, cfg);
  const LyapunovSeed seed = build_seed(cfg.scenario, cfg.seed_options());
  BoundaryCurve home;
  if (!a.boundary.empty()) {
    std::ifstream in(a.boundary);
    if (!in) throw ConfigError("cannot open boundary file '" + a.boundary + "'");
    home = read_boundary_csv(in);
    make_simple_ccw(home);
  } else {
    if (cfg.scenario.params.sat_mode == SatMode::Hard) {
      throw HardSaturationNotReversible("inline TLRoA estimation needs sat_mode = smooth or none");
    }
    Tlroa t{seed, estimate_tlroa(cfg.scenario, seed, cfg.tlroa.t_back, cfg.tlroa.sampler, cfg.integrator, o.jobs)};
    t.result.curve.scenario_hash = run.hash();
    write_tlroa_files(run, t, "boundary");
    home = t.result.curve;
  }

  const ClearingWindowReport report =
      clearing_windows(cfg.scenario, range, home, seed, cfg.assess.k_max, cfg.integrator, o.jobs);
  run.write("assessment.json", "assessment_json", to_text([&](std::ostream& out) {
              write_report_json(out, report, home, run.hash());
            }));
  run.write("assessment.txt", "assessment_text", to_text([&](std::ostream& out) {
              out << "# config_hash: " << run.hash() << '\n';
              write_report_text(out, report);
            }));
  const Trajectory traj = fault_trajectory(cfg.scenario, range.t_end, cfg.integrator);
  run.write("fault_trajectory.csv", "trajectory_csv", to_text([&](std::ostream& out) {
              write_fault_trajectory_csv(out, traj, run.csv_header("during-fault trajectory, raw and wrapped angle"));
            }));

  std::vector<std::vector<State>> extent{home.vertices, traj.states};
  SvgPlot plot = SvgPlot::fit(extent, "Fault trajectory over the TLRoA and its neighbours");
  for (int k = -cfg.assess.k_max; k <= cfg.assess.k_max; ++k) {
    const auto c = translate_curve(home, k);
    plot.polyline(c.vertices, k == 0 ? palette(0) : palette(2), true, k == 0 ? 1.5 : 1.0,
                  k == 0 ? "TLRoA (home)" : (k == 1 ? "neighbour TLRoAs" : ""));
  }
  plot.polyline(traj.states, "#d62728", false, 1.2, "fault trajectory");
  for (const auto& p : report.points) {
    plot.marker(p.assessment.post_fault_state, p.assessment.verdict.stable() ? "#1a9641" : "#d7191c");
  }
  run.write("assessment.svg", "svg", run.svg(plot));

  nlohmann::ordered_json results;
  nlohmann::ordered_json intervals = nlohmann::ordered_json::array();
  for (const auto& iv : report.intervals) {
    intervals.push_back({{"t_begin_s", iv.t_begin}, {"t_end_s", iv.t_end}, {"verdict", to_string(iv.verdict)}});
  }
  results["intervals"] = std::move(intervals);
  results["violations"] = report.count(Agreement::Violation);
  results["conservative"] = report.count(Agreement::Conservative);
  run.finish(results);
  write_report_text(std::cout, report);
  return kOk;
}

struct SweepOptions {
  std::string axis;
  std::vector<std::string> values;
};

std::string axis_key(const std::string& axis) {
  if (axis == "t_back") return "t_back_s";
  if (axis == "ramp_rate") return "ramp_rate_kA_per_s";
  if (axis == "i_d_fault") return "i_d_fault_pu";
  if (axis == "SCR") return "SCR";
  throw ConfigError("unknown sweep axis '" + axis + "' (expected t_back|ramp_rate|i_d_fault|SCR)");
}

int cmd_sweep(const CommonOptions& o, const SweepOptions& s) {
  const std::string key = axis_key(s.axis);
  if (s.values.empty()) throw ConfigError("sweep needs at least one value");
  const RunConfig base = load(o);
  std::vector<RunConfig> variants;
  for (const auto& v : s.values) {
    variants.push_back(load(o, {key + "=" + v}));
    if (variants.back().scenario.params.sat_mode == SatMode::Hard) {
      throw HardSaturationNotReversible("sat_mode = hard cannot be integrated in reverse time; use smooth");
    }
  }

  Run run("sweep", o, base);
  std::vector<AreaRow> rows;
  std::vector<BoundaryCurve> curves;
  for (std::size_t i = 0; i < variants.size(); ++i) {
    const Tlroa t = run_tlroa(variants[i], o.jobs);
    const std::string stem = "boundary_" + std::to_string(i);
    write_tlroa_files(run, t, stem);
    rows.push_back({s.values[i], stem + ".csv", polygon_area(t.result.curve), t.result.samples.size(),
                    t.result.budget_exceeded});
    curves.push_back(t.result.curve);
  }
  run.write("areas.csv", "area_table", to_text([&](std::ostream& out) {
              write_area_table_csv(out, s.axis, rows, run.csv_header("TLRoA polygon area per sweep value"));
            }));
  std::vector<std::vector<State>> extent;
  for (const auto& c : curves) extent.push_back(c.vertices);
  SvgPlot plot = SvgPlot::fit(extent, "TLRoA sensitivity: " + s.axis);
  for (std::size_t i = 0; i < curves.size(); ++i) {
    plot.polyline(curves[i].vertices, palette(i), true, 1.5, s.axis + " = " + s.values[i]);
  }
  run.write("sweep.svg", "svg", run.svg(plot));

  nlohmann::ordered_json results;
  results["axis"] = s.axis;
  nlohmann::ordered_json table = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    table.push_back({{"value", r.value}, {"area", r.area}, {"samples", r.samples}, {"budget_exceeded", r.budget_exceeded}});
  }
  results["areas"] = std::move(table);
  run.finish(results);
  std::cout << s.axis << "  area  samples\n";
  for (const auto& r : rows) std::cout << r.value << "  " << format_double(r.area) << "  " << r.samples << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reverse-time transient stability assessment of a grid-following converter model"};
  app.set_version_flag("--version", REVROA_VERSION);
  app.require_subcommand(1);

  CommonOptions common;
  AssessOptions assess_opts;
  SweepOptions sweep_opts;

  auto* fwd = app.add_subcommand("forward-roa", "Classify a phase-plane grid by forward simulation");
  add_common(fwd, common);

  auto* tl = app.add_subcommand("tlroa", "Estimate the time-limited RoA boundary by reverse-time integration");
  add_common(tl, common);

  auto* as = app.add_subcommand("assess", "Assess clearing times against the TLRoA and its 2*pi neighbours");
  add_common(as, common);
  as->add_option("--t-clear", assess_opts.t_clear, "Single clearing time [s] (default: assess.t_clear_s)");
  as->add_flag("--sweep", assess_opts.sweep, "Sweep assess.sweep_start_s..sweep_stop_s by sweep_step_s");
  as->add_option("--boundary", assess_opts.boundary, "Use a boundary CSV instead of estimating the TLRoA");

  auto* sw = app.add_subcommand("sweep", "One TLRoA per value of a parameter, with an area table");
  add_common(sw, common);
  sw->add_option("--axis", sweep_opts.axis, "t_back | ramp_rate (kA/s) | i_d_fault (pu) | SCR")->required();
  sw->add_option("--values", sweep_opts.values, "Comma-separated values")->required()->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*fwd) return cmd_forward_roa(common);
    if (*tl) return cmd_tlroa(common);
    if (*as) return cmd_assess(common, assess_opts);
    return cmd_sweep(common, sweep_opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const HardSaturationNotReversible& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIrreversible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
}
