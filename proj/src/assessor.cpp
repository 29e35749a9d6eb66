#include "revroa/assessor.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "revroa/errors.hpp"
#include "revroa/parallel.hpp"

namespace revroa {

namespace {
constexpr double kPi = std::numbers::pi;
}

double wrap_angle(double delta) {
  double w = std::remainder(delta, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

Trajectory fault_trajectory(const Scenario& sc, double t_clear, const IntegratorConfig& cfg) {
  if (t_clear < sc.t_fault_start) throw ConfigError("t_clear must not precede the fault start");
  const Scenario faulted = sc.with_clearing_time(t_clear);
  const State x_pre = equilibrium(faulted, Phase::PreFault);
  if (t_clear == sc.t_fault_start) {
    Trajectory traj;
    traj.times = {t_clear};
    traj.states = {x_pre};
    traj.scenario_end = t_clear;
    return traj;
  }
  return integrate_forward(x_pre, sc.t_fault_start, t_clear, faulted, cfg);
}

void write_fault_trajectory_csv(std::ostream& out, const Trajectory& traj,
                                const std::vector<std::string>& header_comments) {
  for (const auto& line : header_comments) out << "# " << line << '\n';
  out << "t,delta_rad,delta_wrapped_rad,ddelta_rad_per_s\n";
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const State s = traj.states[i];
    out << format_double(traj.times[i]) << ',' << format_double(s.x1) << ',' << format_double(wrap_angle(s.x1))
        << ',' << format_double(s.x2) << '\n';
  }
}

Label classify_membership(State x, const BoundaryCurve& home, int k_max) {
  if (contains(home, x)) return {Verdict::StableHome, 0};
  for (int m = 1; m <= k_max; ++m) {
    for (int k : {m, -m}) {
      if (contains(translate_curve(home, k), x)) return {Verdict::StableNeighbor, k};
    }
  }
  return {};
}

AssessmentResult assess(const Scenario& sc, double t_clear, const BoundaryCurve& home, int k_max,
                        const IntegratorConfig& cfg) {
  AssessmentResult r;
  r.clearing_time = t_clear;
  r.k_max = k_max;
  r.post_fault_state = fault_trajectory(sc, t_clear, cfg).back();
  r.wrapped_state = {wrap_angle(r.post_fault_state.x1), r.post_fault_state.x2};
  r.verdict = classify_membership(r.post_fault_state, home, k_max);
  return r;
}

std::string_view to_string(Agreement a) {
  switch (a) {
    case Agreement::Agree: return "agree";
    case Agreement::Conservative: return "conservative";
    case Agreement::Violation: return "violation";
  }
  return "";
}

std::size_t ClearingWindowReport::count(Agreement a) const {
  std::size_t n = 0;
  for (const auto& p : points) n += p.agreement == a;
  return n;
}

std::vector<double> ClearingWindowReport::stability_transitions() const {
  std::vector<double> out;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].assessment.verdict.stable() != points[i - 1].assessment.verdict.stable()) {
      out.push_back(points[i].assessment.clearing_time);
    }
  }
  return out;
}

std::vector<double> SweepRange::times() const {
  validate();
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::floor((t_end - t_begin) / dt + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) out.push_back(t_begin + static_cast<double>(i) * dt);
  return out;
}

void SweepRange::validate() const {
  if (!(dt > 0.0)) throw ConfigError("sweep step must be > 0");
  if (!(t_end >= t_begin)) throw ConfigError("sweep end must not precede its start");
}

std::vector<ClearingInterval> coalesce(const std::vector<SweepPoint>& points) {
  std::vector<ClearingInterval> out;
  for (const auto& p : points) {
    const auto& a = p.assessment;
    if (!out.empty() && out.back().verdict == a.verdict) {
      out.back().t_end = a.clearing_time;
    } else {
      out.push_back({a.clearing_time, a.clearing_time, a.verdict});
    }
  }
  return out;
}

ClearingWindowReport clearing_windows(const Scenario& sc, const SweepRange& range, const BoundaryCurve& home,
                                      const LyapunovSeed& seed, int k_max, const IntegratorConfig& cfg,
                                      unsigned jobs) {
  const auto times = range.times();
  ClearingWindowReport report;
  report.dt = range.dt;
  report.k_max = k_max;
  report.points.resize(times.size());
  parallel_for(times.size(), jobs, [&](std::size_t i) {
    SweepPoint& p = report.points[i];
    p.assessment = assess(sc, times[i], home, k_max, cfg);
    p.simulation = classify_initial_state(sc.with_clearing_time(times[i]), seed, p.assessment.post_fault_state, cfg);
    const bool claim = p.assessment.verdict.stable();
    const bool sim = p.simulation.label.stable();
    if (claim == sim) {
      p.agreement = Agreement::Agree;
    } else {
      p.agreement = claim ? Agreement::Violation : Agreement::Conservative;
    }
  });
  report.intervals = coalesce(report.points);
  for (const auto& p : report.points) {
    report.integrations += p.assessment.clearing_time > sc.t_fault_start ? 2 : 1;
  }
  return report;
}

namespace {
std::string short_time(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", t);
  return buf;
}
}  // namespace

void write_report_text(std::ostream& out, const ClearingWindowReport& report) {
  out << "clearing-time sweep, dt = " << short_time(report.dt) << " s, neighbours |k| <= " << report.k_max << '\n';
  for (const auto& iv : report.intervals) {
    out << "  [" << short_time(iv.t_begin) << ", " << short_time(iv.t_end) << "] s  ";
    out << (iv.verdict.stable() ? to_string(iv.verdict) : std::string("unstable within horizon")) << '\n';
  }
  const auto transitions = report.stability_transitions();
  out << "stability transitions:";
  if (transitions.empty()) out << " none";
  for (double t : transitions) out << ' ' << short_time(t) << " s";
  out << '\n';
  out << "forward-simulation cross-check: " << report.count(Agreement::Agree) << " agree, "
      << report.count(Agreement::Conservative) << " conservative, " << report.count(Agreement::Violation)
      << " violation(s)\n";
  for (const auto& p : report.points) {
    if (p.agreement == Agreement::Agree) continue;
    out << "  t_clear " << short_time(p.assessment.clearing_time) << " s: membership "
        << to_string(p.assessment.verdict) << ", simulation " << to_string(p.simulation.label);
    if (!p.simulation.note.empty()) out << " (" << p.simulation.note << ')';
    out << " [" << to_string(p.agreement) << "]\n";
  }
}

}  // namespace revroa
