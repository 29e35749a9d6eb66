#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "revroa/geometry.hpp"
#include "revroa/lyapunov.hpp"
#include "revroa/model.hpp"
#include "revroa/ode.hpp"
#include "revroa/roa.hpp"

namespace revroa {

/// Maps an angle into (-pi, pi].
double wrap_angle(double delta);

/// During-fault trajectory from the pre-fault equilibrium at t_fault_start to
/// t_clear. A zero-length fault returns the single equilibrium sample.
Trajectory fault_trajectory(const Scenario& sc, double t_clear, const IntegratorConfig& cfg);

/// Columns t, delta_rad, delta_wrapped_rad, ddelta_rad_per_s.
void write_fault_trajectory_csv(std::ostream& out, const Trajectory& traj,
                                const std::vector<std::string>& header_comments = {});

struct AssessmentResult {
  double clearing_time = 0.0;
  State post_fault_state;  ///< unwrapped
  State wrapped_state;
  Label verdict;
  int k_max = 2;
};

/// Membership of an unwrapped post-fault state in home and its translates,
/// tried in the order k = 0, 1, -1, 2, -2, ...
Label classify_membership(State x, const BoundaryCurve& home, int k_max = 2);

AssessmentResult assess(const Scenario& sc, double t_clear, const BoundaryCurve& home, int k_max,
                        const IntegratorConfig& cfg);

enum class Agreement {
  Agree,
  Conservative,  ///< membership says unstable, simulation settles
  Violation,     ///< membership says stable, simulation does not settle
};

std::string_view to_string(Agreement a);

struct SweepPoint {
  AssessmentResult assessment;
  CellResult simulation;
  Agreement agreement = Agreement::Agree;
};

struct ClearingInterval {
  double t_begin = 0.0;
  double t_end = 0.0;
  Label verdict;
};

struct ClearingWindowReport {
  std::vector<SweepPoint> points;
  std::vector<ClearingInterval> intervals;
  double dt = 0.0;
  int k_max = 2;
  std::size_t integrations = 0;

  std::size_t count(Agreement a) const;
  /// Sweep times at which the stable/unstable claim flips; each entry is the
  /// first clearing time carrying the new claim.
  std::vector<double> stability_transitions() const;
};

struct SweepRange {
  double t_begin = 0.1;
  double t_end = 1.0;
  double dt = 0.01;

  std::vector<double> times() const;
  void validate() const;
};

/// Sweeps the clearing time. `seed` is the band used by the confirming
/// forward simulation; `home` is the post-fault TLRoA, which does not depend
/// on the clearing instant.
ClearingWindowReport clearing_windows(const Scenario& sc, const SweepRange& range, const BoundaryCurve& home,
                                      const LyapunovSeed& seed, int k_max, const IntegratorConfig& cfg,
                                      unsigned jobs = 1);

std::vector<ClearingInterval> coalesce(const std::vector<SweepPoint>& points);

void write_report_text(std::ostream& out, const ClearingWindowReport& report);

}  // namespace revroa
