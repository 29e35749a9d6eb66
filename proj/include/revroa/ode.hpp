#pragma once

#include <functional>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "revroa/model.hpp"

namespace revroa {

enum class EventKind { FaultCleared, RampStarted, RampEnded, ToleranceBandEntered, DivergenceDetected };

std::string_view to_string(EventKind kind);

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::FaultCleared;
};

/// Integration output. For reverse runs `times` is the backward clock, which
/// starts at 0 and increases; scenario time is `scenario_end - time`.
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<Event> events;
  bool reverse = false;
  double scenario_end = 0.0;

  const State& front() const { return states.front(); }
  const State& back() const { return states.back(); }
  double end_time() const { return times.back(); }
  bool has_event(EventKind kind) const;
  std::optional<double> first_event(EventKind kind) const;
};

struct IntegratorConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double max_step = 0.01;
  double divergence_radius = 3.0 * std::numbers::pi;
  double max_time = 5.0;
  double min_step = 1e-12;
  bool record_steps = true;  ///< false keeps only the first and last state

  void validate() const;
};

/// Band test used as the "settled" condition; checked at accepted step ends
/// and refined to the first crossing.
using BandPredicate = std::function<bool(double t, State s)>;

struct ForwardOptions {
  std::optional<State> tracked_equilibrium;  ///< enables the divergence check
  BandPredicate band;
  double band_time_tol = 1e-9;
};

/// Dormand-Prince 5(4) from t0 to t_end under the scenario schedule and the
/// scenario's sat_mode. Phase switches are step boundaries.
Trajectory integrate_forward(State x0, double t0, double t_end, const Scenario& sc,
                             const IntegratorConfig& cfg, const ForwardOptions& opts = {});

/// Backward flow x' = -f(tau, x) with tau running from `scenario_end` down to
/// `scenario_end - duration`.
Trajectory integrate_reverse(State x_end, double scenario_end, double duration, const Scenario& sc,
                             const IntegratorConfig& cfg);

/// Backward flow ending at the clearing instant: scenario_end = t_fault_clear + duration.
Trajectory integrate_reverse(State x_end, double duration, const Scenario& sc,
                             const IntegratorConfig& cfg);

/// Columns t, delta_rad, ddelta_rad_per_s, event. Numbers use 17 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const std::vector<std::string>& header_comments = {});

std::string format_double(double v);

/// Process-wide number of integrate_forward / integrate_reverse calls so far.
std::size_t integration_count();

}  // namespace revroa
