#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "revroa/geometry.hpp"
#include "revroa/lyapunov.hpp"
#include "revroa/model.hpp"
#include "revroa/ode.hpp"
#include "revroa/sampler.hpp"

namespace revroa {

enum class Verdict { StableHome, StableNeighbor, Unstable };

/// Outcome of one post-fault initial condition. `neighbor` is the 2*pi
/// index k of the equilibrium reached (0 for home).
struct Label {
  Verdict verdict = Verdict::Unstable;
  int neighbor = 0;

  bool stable() const { return verdict != Verdict::Unstable; }
  friend bool operator==(const Label&, const Label&) = default;
};

std::string to_string(Label label);

struct CellResult {
  Label label;
  double settle_time = 0.0;  ///< time from clearing to band entry; only meaningful when stable
  std::string note;
};

/// Forward-time classification of a state at the clearing instant: runs the
/// post-fault schedule for cfg.max_time, settled when the state enters the
/// seed band around any 2*pi-translate of the equilibrium on the steady
/// segment. Divergence is measured from the equilibrium translate nearest the
/// start. Integrator failures are reported as Unstable with a note.
CellResult classify_initial_state(const Scenario& sc, const LyapunovSeed& seed, State x0,
                                  const IntegratorConfig& cfg);

struct GridSpec {
  double delta_min = 0.0;
  double delta_max = 0.0;
  double omega_min = -20.0 * std::numbers::pi;
  double omega_max = 20.0 * std::numbers::pi;
  std::size_t n_delta = 80;
  std::size_t n_omega = 40;

  /// delta in [x_eq - half_width, x_eq + half_width].
  static GridSpec centered(State x_eq, double half_width = 3.0 * std::numbers::pi);
  State cell_center(std::size_t i, std::size_t j) const;
  void validate() const;
};

/// Labels stored row-major by omega index: cells[j * n_delta + i].
struct ClassifiedGrid {
  GridSpec spec;
  std::vector<CellResult> cells;
  std::size_t integrations = 0;

  const CellResult& at(std::size_t i, std::size_t j) const { return cells[j * spec.n_delta + i]; }
  std::size_t count(Verdict v) const;
  /// Area covered by cells with the given verdict.
  double area(Verdict v) const;
};

ClassifiedGrid forward_roa(const Scenario& sc, const LyapunovSeed& seed, const GridSpec& spec,
                           const IntegratorConfig& cfg, unsigned jobs = 1);

struct TlroaResult {
  BoundaryCurve curve;
  SampleSet samples;
  bool budget_exceeded = false;
  std::size_t integrations = 0;
  double reverse_duration = 0.0;  ///< t_back plus the ramp duration
};

/// Endpoint of the backward flow started on the seed boundary at angle theta,
/// run for t_back on the steady segment and then back through the ramp.
State tlroa_endpoint(const Scenario& sc, const LyapunovSeed& seed, double t_back, double theta,
                     const IntegratorConfig& cfg);

/// Reverse-time estimate of the time-limited region of attraction, expressed
/// as states at the clearing instant.
TlroaResult estimate_tlroa(const Scenario& sc, const LyapunovSeed& seed, double t_back, const SamplerConfig& sampler,
                           const IntegratorConfig& cfg, unsigned jobs = 1);

/// Polygon of n points on the seed boundary, uniform in angle.
BoundaryCurve seed_polygon(const LyapunovSeed& seed, std::size_t n);

}  // namespace revroa
