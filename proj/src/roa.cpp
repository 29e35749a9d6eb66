#include "revroa/roa.hpp"

#include <cmath>
#include <numbers>

#include "revroa/errors.hpp"
#include "revroa/parallel.hpp"

namespace revroa {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

int nearest_translate(double x1, double center) { return static_cast<int>(std::lround((x1 - center) / kTwoPi)); }
}  // namespace

std::string to_string(Label label) {
  switch (label.verdict) {
    case Verdict::StableHome: return "StableHome";
    case Verdict::StableNeighbor: return "StableNeighbor(" + std::to_string(label.neighbor) + ")";
    case Verdict::Unstable: return "Unstable";
  }
  return "Unstable";
}

CellResult classify_initial_state(const Scenario& sc, const LyapunovSeed& seed, State x0,
                                  const IntegratorConfig& cfg) {
  const double t0 = sc.t_fault_clear;
  const double t_steady = sc.ramp_end();
  const double center = seed.x_eq.x1;

  ForwardOptions opts;
  opts.tracked_equilibrium = State{center + kTwoPi * nearest_translate(x0.x1, center), 0.0};
  opts.band = [&seed, t_steady, center](double t, State x) {
    if (t < t_steady) return false;
    const int k = nearest_translate(x.x1, center);
    return seed.inside({x.x1 - kTwoPi * k, x.x2});
  };
  IntegratorConfig run = cfg;
  run.record_steps = false;

  CellResult out;
  try {
    const Trajectory traj = integrate_forward(x0, t0, t0 + cfg.max_time, sc, run, opts);
    if (const auto t_band = traj.first_event(EventKind::ToleranceBandEntered)) {
      const int k = nearest_translate(traj.back().x1, center);
      out.label = {k == 0 ? Verdict::StableHome : Verdict::StableNeighbor, k};
      out.settle_time = *t_band - t0;
    } else if (traj.has_event(EventKind::DivergenceDetected)) {
      out.note = "diverged";
    } else {
      out.note = "not settled within horizon";
    }
  } catch (const Error& e) {
    out.label = {};
    out.note = e.what();
  }
  return out;
}

GridSpec GridSpec::centered(State x_eq, double half_width) {
  GridSpec g;
  g.delta_min = x_eq.x1 - half_width;
  g.delta_max = x_eq.x1 + half_width;
  return g;
}

State GridSpec::cell_center(std::size_t i, std::size_t j) const {
  const double dd = (delta_max - delta_min) / static_cast<double>(n_delta);
  const double dw = (omega_max - omega_min) / static_cast<double>(n_omega);
  return {delta_min + (static_cast<double>(i) + 0.5) * dd, omega_min + (static_cast<double>(j) + 0.5) * dw};
}

void GridSpec::validate() const {
  if (!(delta_max > delta_min) || !(omega_max > omega_min)) throw ConfigError("grid ranges must be non-empty");
  if (n_delta == 0 || n_omega == 0) throw ConfigError("grid resolution must be positive");
}

std::size_t ClassifiedGrid::count(Verdict v) const {
  std::size_t n = 0;
  for (const auto& c : cells) n += c.label.verdict == v;
  return n;
}

double ClassifiedGrid::area(Verdict v) const {
  const double cell = (spec.delta_max - spec.delta_min) / static_cast<double>(spec.n_delta) *
                      (spec.omega_max - spec.omega_min) / static_cast<double>(spec.n_omega);
  return cell * static_cast<double>(count(v));
}

ClassifiedGrid forward_roa(const Scenario& sc, const LyapunovSeed& seed, const GridSpec& spec,
                           const IntegratorConfig& cfg, unsigned jobs) {
  spec.validate();
  ClassifiedGrid grid;
  grid.spec = spec;
  grid.cells.resize(spec.n_delta * spec.n_omega);
  parallel_for(grid.cells.size(), jobs, [&](std::size_t idx) {
    const std::size_t i = idx % spec.n_delta;
    const std::size_t j = idx / spec.n_delta;
    grid.cells[idx] = classify_initial_state(sc, seed, spec.cell_center(i, j), cfg);
  });
  grid.integrations = grid.cells.size();
  return grid;
}

State tlroa_endpoint(const Scenario& sc, const LyapunovSeed& seed, double t_back, double theta,
                     const IntegratorConfig& cfg) {
  const State start = seed_point(seed, theta);
  const double duration = t_back + sc.ramp_duration();
  if (!(duration > 0.0)) return start;
  IntegratorConfig run = cfg;
  run.record_steps = false;
  return integrate_reverse(start, sc.ramp_end() + t_back, duration, sc, run).back();
}

TlroaResult estimate_tlroa(const Scenario& sc, const LyapunovSeed& seed, double t_back, const SamplerConfig& sampler,
                           const IntegratorConfig& cfg, unsigned jobs) {
  if (sc.params.sat_mode == SatMode::Hard) {
    throw HardSaturationNotReversible("TLRoA estimation needs a reversible model; hard saturation is not");
  }
  if (t_back < 0.0) throw ConfigError("t_back must be >= 0");
  TlroaResult out;
  out.reverse_duration = t_back + sc.ramp_duration();
  out.samples = run_sampler([&](double theta) { return tlroa_endpoint(sc, seed, t_back, theta, cfg); }, sampler, jobs);
  out.integrations = out.reverse_duration > 0.0 ? out.samples.size() : 0;
  out.budget_exceeded = out.samples.termination == Termination::BudgetExhausted;

  BoundaryCurve& curve = out.curve;
  for (const auto& s : out.samples.samples) {
    curve.vertices.push_back(s.endpoint);
    curve.thetas.push_back(s.theta);
  }
  curve.t_back = t_back;
  curve.sample_count = out.samples.size();
  curve.loss_kind = std::string(to_string(sampler.loss_kind));
  curve.max_loss = out.samples.max_loss;
  if (out.budget_exceeded) {
    curve.warnings.push_back("sampler budget exhausted before the loss goal was met");
  }
  make_simple_ccw(curve);
  return out;
}

BoundaryCurve seed_polygon(const LyapunovSeed& seed, std::size_t n) {
  BoundaryCurve b;
  for (std::size_t i = 0; i < n; ++i) {
    const double theta = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
    b.vertices.push_back(seed_point(seed, theta));
    b.thetas.push_back(theta);
  }
  b.sample_count = n;
  b.loss_kind = "uniform";
  return b;
}

}  // namespace revroa
