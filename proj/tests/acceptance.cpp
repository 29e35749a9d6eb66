// Acceptance checks. Prints one PASS/FAIL line per criterion; exits nonzero
// only for failures not listed with --known-failure.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "revroa/assessor.hpp"
#include "revroa/config.hpp"
#include "revroa/geometry.hpp"
#include "revroa/io.hpp"
#include "revroa/roa.hpp"

using namespace revroa;
namespace fs = std::filesystem;

namespace {


struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

RunConfig reference(const std::vector<std::string>& overrides = {}) {
  return load_config(std::string(REVROA_CONFIG_DIR) + "/reference.cfg", overrides);
}

int shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Reverse time undoes forward time.
Outcome criterion1() {
  Stopwatch clock;
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  IntegratorConfig cfg = reference().integrator;
  cfg.record_steps = false;
  const double horizon = 1.0;

  Scenario plain = reference().scenario;
  plain.params.sat_mode = SatMode::None;
  const LyapunovSeed seed_plain = build_seed(plain);
  double worst_plain = 0.0;
  int n_plain = 0;
  while (n_plain < 100) {
    const State x0 = seed_plain.x_eq + State{1.2 * u(gen), 15.0 * u(gen)};
    if (classify_initial_state(plain, seed_plain, x0, cfg).label.verdict != Verdict::StableHome) continue;
    const double t0 = plain.t_fault_clear;
    const State x1 = integrate_forward(x0, t0, t0 + horizon, plain, cfg).back();
    const State back = integrate_reverse(x1, t0 + horizon, horizon, plain, cfg).back();
    worst_plain = std::max(worst_plain, norm(back - x0));
    ++n_plain;
  }

  // Starts beyond the saturation limit so that the smooth map is engaged.
  const Scenario smooth = reference().scenario;
  const LyapunovSeed seed_smooth = build_seed(smooth);
  const double lim = smooth.params.sat_limit;
  double worst_smooth = 0.0;
  int n_smooth = 0;
  for (int tries = 0; n_smooth < 100 && tries < 20000; ++tries) {
    const double w = (u(gen) < 0.0 ? -1.0 : 1.0) * lim * (1.05 + 0.5 * std::abs(u(gen)));
    const State x0 = seed_smooth.x_eq + State{1.5 * u(gen), w};
    if (classify_initial_state(smooth, seed_smooth, x0, cfg).label.verdict != Verdict::StableHome) continue;
    const double t0 = smooth.t_fault_clear;
    const State x1 = integrate_forward(x0, t0, t0 + horizon, smooth, cfg).back();
    const State back = integrate_reverse(x1, t0 + horizon, horizon, smooth, cfg).back();
    worst_smooth = std::max(worst_smooth, norm(back - x0));
    ++n_smooth;
  }
  const double secs = clock.seconds();
  return {n_plain == 100 && n_smooth == 100 && worst_plain < 1e-4 && worst_smooth < 1e-3 && secs < 30.0,
          fmt("max roundtrip error %.2e (no saturation, %d starts), %.2e (smooth, %d starts |ddelta| > limit), %.1f s",
              worst_plain, n_plain, worst_smooth, n_smooth, secs)};
}

// Every boundary vertex is confirmed by forward simulation.
Outcome criterion2() {
  Stopwatch clock;
  const RunConfig rc = reference();
  const LyapunovSeed seed = build_seed(rc.scenario, rc.seed_options());
  const TlroaResult r = estimate_tlroa(rc.scenario, seed, rc.tlroa.t_back, rc.tlroa.sampler, rc.integrator);
  std::size_t home = 0;
  for (const State& v : r.curve.vertices) {
    home += classify_initial_state(rc.scenario, seed, v, rc.integrator).label.verdict == Verdict::StableHome;
  }
  const double secs = clock.seconds();
  return {home == r.curve.size() && secs < 120.0,
          fmt("%zu/%zu vertices StableHome, %.1f s", home, r.curve.size(), secs)};
}

bool strictly_inside(State v, const BoundaryCurve& outer) {
  if (!contains(outer, v)) return false;
  for (std::size_t i = 0; i < outer.size(); ++i) {
    if (point_segment_distance(v, outer.vertices[i], outer.vertices[(i + 1) % outer.size()]) == 0.0) return false;
  }
  return true;
}

int outside_count(const BoundaryCurve& inner, const BoundaryCurve& outer) {
  int n = 0;
  for (const State& v : inner.vertices) n += !strictly_inside(v, outer);
  return n;
}

// Longer horizons give nested, larger curves. The three boundaries share an
// arc along which they are closer than the chord error at the default goal,
// so nesting is asserted at goal 1e-3 and the default goal is reported.
Outcome criterion3() {
  const RunConfig rc = reference();
  const LyapunovSeed seed = build_seed(rc.scenario, rc.seed_options());
  auto curves_at = [&](double goal) {
    SamplerConfig s = rc.tlroa.sampler;
    s.loss_goal = goal;
    s.n_max = 8192;
    std::vector<BoundaryCurve> curves;
    for (double tb : {0.9, 1.0, 1.1}) curves.push_back(estimate_tlroa(rc.scenario, seed, tb, s, rc.integrator).curve);
    return curves;
  };
  const auto fine = curves_at(1e-3);
  const auto coarse = curves_at(rc.tlroa.sampler.loss_goal);
  std::vector<double> areas;
  for (const auto& c : fine) areas.push_back(polygon_area(c));
  const bool nested = outside_count(fine[0], fine[1]) == 0 && outside_count(fine[1], fine[2]) == 0;
  const bool growing = areas[0] <= areas[1] && areas[1] <= areas[2];
  return {nested && growing,
          fmt("goal 1e-3 (N %zu/%zu/%zu): areas %.1f, %.1f, %.1f, nested: %s; goal %.2f: areas %.1f, %.1f, %.1f, "
              "vertices outside the next curve %d and %d",
              fine[0].size(), fine[1].size(), fine[2].size(), areas[0], areas[1], areas[2], nested ? "yes" : "no",
              rc.tlroa.sampler.loss_goal, polygon_area(coarse[0]), polygon_area(coarse[1]), polygon_area(coarse[2]),
              outside_count(coarse[0], coarse[1]), outside_count(coarse[1], coarse[2]))};
}

std::vector<double> sweep_areas(const std::string& axis, const std::string& values, const std::string& out) {
  fs::remove_all(out);
  const std::string cmd = std::string(REVROA_CLI) + " sweep --config " + REVROA_CONFIG_DIR +
                          "/reference.cfg --deterministic --axis " + axis + " --values " + values + " --out " + out +
                          " > " + out + ".log 2>&1";
  if (shell(cmd) != 0) return {};
  std::ifstream in(fs::path(out) / "areas.csv");
  std::vector<double> areas;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    std::istringstream row(line);
    std::string value, area;
    std::getline(row, value, ',');
    std::getline(row, area, ',');
    areas.push_back(std::stod(area));
  }
  return areas;
}

// Sensitivity orderings, each pair from one sweep run.
Outcome criterion4() {
  struct Pair {
    const char* axis;
    const char* values;
  };
  bool ok = true;
  std::string detail;
  for (const Pair& p : {Pair{"ramp_rate", "14.2,28.4"}, Pair{"i_d_fault", "0.01,0.45"}, Pair{"SCR", "3.3,1.1"}}) {
    Stopwatch clock;
    const auto a = sweep_areas(p.axis, p.values, std::string("acceptance_sweep_") + p.axis);
    const double secs = clock.seconds();
    const bool pair_ok = a.size() == 2 && a[0] > a[1] && secs < 180.0;
    ok &= pair_ok;
    if (!detail.empty()) detail += "; ";
    if (a.size() == 2) {
      detail += fmt("%s %s: %.2f > %.2f (%.1f s)", p.axis, p.values, a[0], a[1], secs);
    } else {
      detail += fmt("%s: sweep failed", p.axis);
    }
  }
  return {ok, detail};
}

// Curvature sampling is at least as accurate as uniform refinement and
// cheaper than the Euclidean criterion.
Outcome criterion5() {
  const RunConfig rc = reference();
  const LyapunovSeed seed = build_seed(rc.scenario, rc.seed_options());
  const double tb = rc.tlroa.t_back;

  // The endpoint map is extremely steep in a few narrow angle windows, so a
  // uniform-angle reference misses most of the boundary. The reference is
  // 512 samples spread by endpoint distance instead.
  SamplerConfig ref_sampler = rc.tlroa.sampler;
  ref_sampler.loss_kind = LossKind::Euclidean;
  ref_sampler.n_max = 512;
  ref_sampler.loss_goal = 1e-9;
  const std::vector<State> dense = estimate_tlroa(rc.scenario, seed, tb, ref_sampler, rc.integrator).curve.vertices;
  double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
  for (const State& p : dense) {
    x_lo = std::min(x_lo, p.x1), x_hi = std::max(x_hi, p.x1);
    y_lo = std::min(y_lo, p.x2), y_hi = std::max(y_hi, p.x2);
  }
  const double sx = x_hi - x_lo, sy = y_hi - y_lo;

  auto error_at = [&](LossKind kind, std::size_t n) {
    SamplerConfig s = rc.tlroa.sampler;
    s.loss_kind = kind;
    s.n_max = n;
    s.loss_goal = 1e-9;
    const TlroaResult r = estimate_tlroa(rc.scenario, seed, tb, s, rc.integrator);
    return hausdorff_distance(r.curve.vertices, dense, sx, sy);
  };
  bool ok = true;
  std::string detail;
  for (std::size_t n : {50u, 68u}) {
    const double ec = error_at(LossKind::Curvature, n);
    const double eh = error_at(LossKind::Homogeneous, n);
    ok &= ec <= eh;
    detail += fmt("N=%zu Hausdorff curvature %.4f vs homogeneous %.4f; ", n, ec, eh);
  }
  auto evaluations = [&](LossKind kind) {
    SamplerConfig s = rc.tlroa.sampler;
    s.loss_kind = kind;
    return estimate_tlroa(rc.scenario, seed, tb, s, rc.integrator).integrations;
  };
  const std::size_t nc = evaluations(LossKind::Curvature);
  const std::size_t ne = evaluations(LossKind::Euclidean);
  ok &= nc < ne;
  detail += fmt("evaluations to goal %.2f: curvature %zu, Euclidean %zu", rc.tlroa.sampler.loss_goal, nc, ne);
  return {ok, detail};
}

std::vector<std::pair<bool, double>> claim_runs(const ClearingWindowReport& rep) {
  std::vector<std::pair<bool, double>> runs;
  for (const auto& p : rep.points) {
    const bool stable = p.assessment.verdict.stable();
    if (runs.empty() || runs.back().first != stable) runs.push_back({stable, p.assessment.clearing_time});
  }
  return runs;
}

// Stable, unstable, stable again as the clearing time grows.
Outcome criterion6() {
  struct Case {
    const char* ramp;
    double first;
  };
  const double reentry = 0.80, tol = 0.10;
  bool ok = true;
  std::string detail;
  for (const Case& c : {Case{"28.4", 0.52}, Case{"42.6", 0.65}}) {
    const RunConfig rc = reference({std::string("ramp_rate_kA_per_s=") + c.ramp});
    const LyapunovSeed seed = build_seed(rc.scenario, rc.seed_options());
    const TlroaResult home = estimate_tlroa(rc.scenario, seed, rc.tlroa.t_back, rc.tlroa.sampler, rc.integrator);
    const ClearingWindowReport rep =
        clearing_windows(rc.scenario, rc.assess.sweep, home.curve, seed, rc.assess.k_max, rc.integrator);
    const auto runs = claim_runs(rep);
    const bool pattern = runs.size() == 3 && runs[0].first && !runs[1].first && runs[2].first;
    const auto tr = rep.stability_transitions();
    const bool first_ok = tr.size() >= 1 && std::abs(tr[0] - c.first) <= tol + 1e-9;
    const bool reentry_ok = tr.size() >= 2 && std::abs(tr[1] - reentry) <= tol + 1e-9;
    const std::size_t violations = rep.count(Agreement::Violation);
    ok &= pattern && first_ok && reentry_ok && violations == 0;

    if (!detail.empty()) detail += "; ";
    detail += fmt("%s kA/s: ", c.ramp);
    for (const auto& iv : rep.intervals) {
      detail += fmt("[%.2f,%.2f] %s ", iv.t_begin, iv.t_end, to_string(iv.verdict).c_str());
    }
    detail += "transitions";
    for (double t : tr) detail += fmt(" %.2f", t);
    detail += fmt(" (expected %.2f and %.2f, +-%.2f); %zu violations, %zu conservative", c.first, reentry, tol,
                  violations, rep.count(Agreement::Conservative));
  }
  return {ok, detail};
}

// The adaptive estimate needs far fewer integrations than the grid oracle.
Outcome criterion7() {
  const RunConfig rc = reference();
  const LyapunovSeed seed = build_seed(rc.scenario, rc.seed_options());
  GridSpec g = GridSpec::centered(seed.x_eq, rc.grid.delta_half_width);
  g.omega_min = rc.grid.ddelta_min;
  g.omega_max = rc.grid.ddelta_max;
  g.n_delta = rc.grid.n_delta;
  g.n_omega = rc.grid.n_ddelta;

  Stopwatch grid_clock;
  const ClassifiedGrid grid = forward_roa(rc.scenario, seed, g, rc.integrator);
  const double grid_secs = grid_clock.seconds();
  Stopwatch tl_clock;
  const TlroaResult r = estimate_tlroa(rc.scenario, seed, rc.tlroa.t_back, rc.tlroa.sampler, rc.integrator);
  const double tl_secs = tl_clock.seconds();
  const double ratio = static_cast<double>(grid.integrations) / static_cast<double>(r.integrations);
  return {grid.cells.size() >= 3200 && ratio >= 10.0,
          fmt("oracle %zu cells, %zu integrations, %.2f s; TLRoA %zu integrations, %.3f s; ratio %.1fx "
              "(wall-clock ratio %.1fx, reported only)",
              grid.cells.size(), grid.integrations, grid_secs, r.integrations, tl_secs, ratio,
              tl_secs > 0.0 ? grid_secs / tl_secs : 0.0)};
}

// Property suites, run from the unit-test binary.
Outcome criterion8() {
  const char* cases[] = {
      "residual below 1e-10 on random Hurwitz systems",
      "Jacobian agrees with central differences",
      "point-in-polygon agrees with the winding number on 1000 points",
      "right-hand side is 2*pi periodic in the angle",
  };
  bool ok = true;
  std::string detail;
  for (const char* c : cases) {
    const std::string cmd = std::string(REVROA_UNIT_TESTS) + " --test-case=\"" + c + "\" > acceptance_props.log 2>&1";
    const bool pass = shell(cmd) == 0;
    ok &= pass;
    if (!detail.empty()) detail += "; ";
    detail += fmt("%s: %s", c, pass ? "ok" : "failed");
  }
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> known, only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if ((a == "--known-failure" || a == "--only") && i + 1 < argc) {
      (a == "--only" ? only : known).insert(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--known-failure N]... [--only N]...\n";
      return 2;
    }
  }

  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                       criterion5, criterion6, criterion7, criterion8};
  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(n)) continue;
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const bool expected_fail = known.count(n) > 0;
    std::cout << "Criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << (!o.pass && expected_fail ? " (known)" : "")
              << "  " << o.detail << std::endl;
    if (!o.pass && !expected_fail) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
