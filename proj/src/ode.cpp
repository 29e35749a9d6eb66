#include "revroa/ode.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "revroa/errors.hpp"

namespace revroa {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::FaultCleared: return "FaultCleared";
    case EventKind::RampStarted: return "RampStarted";
    case EventKind::RampEnded: return "RampEnded";
    case EventKind::ToleranceBandEntered: return "ToleranceBandEntered";
    case EventKind::DivergenceDetected: return "DivergenceDetected";
  }
  return "";
}

bool Trajectory::has_event(EventKind kind) const { return first_event(kind).has_value(); }

std::optional<double> Trajectory::first_event(EventKind kind) const {
  for (const auto& e : events) {
    if (e.kind == kind) return e.time;
  }
  return std::nullopt;
}

void IntegratorConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw ConfigError("integrator tolerances must be > 0");
  if (!(divergence_radius > 0.0)) throw ConfigError("divergence_radius must be > 0");
  if (!(max_step > 0.0)) throw ConfigError("max_step must be > 0");
  if (!(max_time > 0.0)) throw ConfigError("max_time must be > 0");
}

namespace {

std::atomic<std::size_t> g_integrations{0};

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

using Field = std::function<State(double, State)>;

struct StepResult {
  State x;
  State k_end;
  double err = 0.0;
};

StepResult dopri_step(const Field& f, double t, State x, State k1, double h, const IntegratorConfig& cfg) {
  const State k2 = f(t + c2 * h, x + (h * a21) * k1);
  const State k3 = f(t + c3 * h, x + h * (a31 * k1 + a32 * k2));
  const State k4 = f(t + c4 * h, x + h * (a41 * k1 + a42 * k2 + a43 * k3));
  const State k5 = f(t + c5 * h, x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  const State k6 = f(t + h, x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  const State xn = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  const State k7 = f(t + h, xn);
  const State e = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
  const double s1 = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(x.x1), std::abs(xn.x1));
  const double s2 = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(x.x2), std::abs(xn.x2));
  const double err = std::sqrt(0.5 * ((e.x1 / s1) * (e.x1 / s1) + (e.x2 / s2) * (e.x2 / s2)));
  return {xn, k7, is_finite(xn) ? err : std::numeric_limits<double>::infinity()};
}

double initial_step(const Field& f, double t, State x, State k1, const IntegratorConfig& cfg) {
  const double s1 = cfg.abs_tol + cfg.rel_tol * std::abs(x.x1);
  const double s2 = cfg.abs_tol + cfg.rel_tol * std::abs(x.x2);
  const double d0 = std::hypot(x.x1 / s1, x.x2 / s2);
  const double d1 = std::hypot(k1.x1 / s1, k1.x2 / s2);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, cfg.max_step);
  const State k2 = f(t + h0, x + h0 * k1);
  const double d2 = std::hypot((k2.x1 - k1.x1) / s1, (k2.x2 - k1.x2) / s2) / h0;
  const double dm = std::max(d1, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
  return std::min({100.0 * h0, h1, cfg.max_step});
}

enum class Stop { None, Band, Divergence };

/// Walks one smooth piece [t, t_stop] of the vector field, recording accepted
/// steps. Returns the reason for an early stop, if any.
class Stepper {
 public:
  Stepper(const IntegratorConfig& cfg, Trajectory& traj) : cfg_(cfg), traj_(traj) {}

  using Check = std::function<Stop(double, State)>;

  Stop run(const Field& f, double& t, State& x, double t_stop, const Check& check,
           const BandPredicate* band, double band_tol) {
    if (!(t_stop > t)) return Stop::None;
    State k1 = f(t, x);
    if (h_ <= 0.0) h_ = initial_step(f, t, x, k1, cfg_);
    while (t < t_stop) {
      const double remaining = t_stop - t;
      double h = std::min({h_, cfg_.max_step, remaining});
      const bool last = h >= remaining * (1.0 - 1e-12) || remaining - h < 1e-13 * std::max(1.0, std::abs(t));
      if (last) h = remaining;
      const StepResult step = dopri_step(f, t, x, k1, h, cfg_);
      if (step.err <= 1.0) {
        const double t_prev = t;
        const State x_prev = x;
        const State k_prev = k1;
        t = last ? t_stop : t + h;
        x = step.x;
        k1 = step.k_end;
        const double fac = step.err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(step.err, -0.2), 0.2, 5.0);
        h_ = h * fac;
        if (band && *band && (*band)(t, x)) {
          refine_band(f, t_prev, x_prev, k_prev, h, *band, band_tol, t, x);
          record(t, x, true);
          return Stop::Band;
        }
        record(t, x, last);
        if (check) {
          const Stop s = check(t, x);
          if (s != Stop::None) {
            if (!cfg_.record_steps && !last) record(t, x, true);
            return s;
          }
        }
      } else {
        h_ = h * std::clamp(0.9 * std::pow(step.err, -0.2), 0.1, 0.9);
        if (!std::isfinite(step.err)) h_ = 0.1 * h;
        if (h_ < cfg_.min_step) {
          throw StepFailure("step size underflow at t = " + format_double(t));
        }
      }
    }
    return Stop::None;
  }

  void record(double t, State x, bool force = false) {
    if (!cfg_.record_steps) {
      if (!force) return;
      if (traj_.times.size() >= 2) {
        traj_.times.back() = t;
        traj_.states.back() = x;
        return;
      }
    }
    if (!traj_.times.empty() && traj_.times.back() == t) {
      traj_.states.back() = x;
      return;
    }
    traj_.times.push_back(t);
    traj_.states.push_back(x);
  }

 private:
  void refine_band(const Field& f, double t0, State x0, State k0, double h, const BandPredicate& band,
                   double tol, double& t_out, State& x_out) const {
    double lo = 0.0;
    double hi = h;
    State x_hi = x_out;
    for (int i = 0; i < 60 && hi - lo > tol; ++i) {
      const double mid = 0.5 * (lo + hi);
      const State xm = dopri_step(f, t0, x0, k0, mid, cfg_).x;
      if (band(t0 + mid, xm)) {
        hi = mid;
        x_hi = xm;
      } else {
        lo = mid;
      }
    }
    t_out = t0 + hi;
    x_out = x_hi;
  }

  const IntegratorConfig& cfg_;
  Trajectory& traj_;
  double h_ = 0.0;
};

void add_switch_events(Trajectory& traj, const Segment& ended, const Segment* next, double time) {
  if (ended.phase == Phase::Fault) traj.events.push_back({time, EventKind::FaultCleared});
  if (next && next->phase == Phase::Ramp) traj.events.push_back({time, EventKind::RampStarted});
  if (ended.phase == Phase::Ramp) traj.events.push_back({time, EventKind::RampEnded});
}

}  // namespace

Trajectory integrate_forward(State x0, double t0, double t_end, const Scenario& sc,
                             const IntegratorConfig& cfg, const ForwardOptions& opts) {
  if (!(t_end > t0)) throw ConfigError("integrate_forward requires t_end > t0");
  ++g_integrations;
  Trajectory traj;
  traj.scenario_end = t_end;
  const auto segs = sc.segments();
  const SatMode mode = sc.params.sat_mode;
  Stepper stepper(cfg, traj);
  stepper.record(t0, x0, true);

  Stepper::Check check;
  if (opts.tracked_equilibrium) {
    const double center = opts.tracked_equilibrium->x1;
    check = [center, &cfg](double, State x) {
      return std::abs(x.x1 - center) > cfg.divergence_radius ? Stop::Divergence : Stop::None;
    };
  }

  double t = t0;
  State x = x0;
  for (std::size_t i = 0; i < segs.size() && t < t_end; ++i) {
    const Segment& seg = segs[i];
    if (seg.t_end <= t) continue;
    const double stop_at = std::min(seg.t_end, t_end);
    const Field f = [&seg, &sc, mode](double tt, State s) { return rhs(tt, s, seg, sc.params, mode); };
    const Stop why = stepper.run(f, t, x, stop_at, check, &opts.band, opts.band_time_tol);
    if (why == Stop::Band) {
      traj.events.push_back({t, EventKind::ToleranceBandEntered});
      return traj;
    }
    if (why == Stop::Divergence) {
      traj.events.push_back({t, EventKind::DivergenceDetected});
      return traj;
    }
    if (stop_at == seg.t_end && seg.t_end < t_end) {
      add_switch_events(traj, seg, i + 1 < segs.size() ? &segs[i + 1] : nullptr, t);
    }
  }
  stepper.record(t, x, true);
  return traj;
}

Trajectory integrate_reverse(State x_end, double scenario_end, double duration, const Scenario& sc,
                             const IntegratorConfig& cfg) {
  if (sc.params.sat_mode == SatMode::Hard) {
    throw HardSaturationNotReversible(
        "hard PLL frequency clamping is not Lipschitz; use sat_mode = smooth for reverse time");
  }
  if (!(duration > 0.0)) throw ConfigError("integrate_reverse requires duration > 0");
  ++g_integrations;
  Trajectory traj;
  traj.reverse = true;
  traj.scenario_end = scenario_end;
  const auto segs = sc.segments();
  const SatMode mode = sc.params.sat_mode;
  Stepper stepper(cfg, traj);
  stepper.record(0.0, x_end, true);

  double s = 0.0;
  State x = x_end;
  for (std::size_t j = segs.size(); j-- > 0 && s < duration;) {
    const Segment& seg = segs[j];
    // Segment covers scenario times (t_begin, t_end] when walked backwards.
    if (seg.t_begin >= scenario_end - s) continue;
    const double local_stop = std::min(scenario_end - seg.t_begin, duration);
    const Field f = [&seg, &sc, mode, scenario_end](double clock, State st) {
      return -1.0 * rhs(scenario_end - clock, st, seg, sc.params, mode);
    };
    stepper.run(f, s, x, local_stop, {}, nullptr, 0.0);
    if (local_stop < duration) {
      // Crossing seg.t_begin backwards: the segment before it ends here.
      const Segment* prev = j > 0 ? &segs[j - 1] : nullptr;
      if (seg.phase == Phase::PostFault && prev && prev->phase == Phase::Ramp) {
        traj.events.push_back({s, EventKind::RampEnded});
      } else if (seg.phase == Phase::Ramp) {
        traj.events.push_back({s, EventKind::RampStarted});
      }
      if (prev && prev->phase == Phase::Fault) traj.events.push_back({s, EventKind::FaultCleared});
    }
  }
  stepper.record(s, x, true);
  return traj;
}

Trajectory integrate_reverse(State x_end, double duration, const Scenario& sc, const IntegratorConfig& cfg) {
  return integrate_reverse(x_end, sc.t_fault_clear + duration, duration, sc, cfg);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const std::vector<std::string>& header_comments) {
  for (const auto& line : header_comments) out << "# " << line << '\n';
  out << "# columns: t [s" << (traj.reverse ? ", backward clock" : "") << "], delta [rad], ddelta [rad/s]\n";
  out << "t,delta_rad,ddelta_rad_per_s,event\n";
  std::size_t next_event = 0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    std::string label;
    while (next_event < traj.events.size() && traj.events[next_event].time <= traj.times[i]) {
      if (!label.empty()) label += '|';
      label += to_string(traj.events[next_event].kind);
      ++next_event;
    }
    out << format_double(traj.times[i]) << ',' << format_double(traj.states[i].x1) << ','
        << format_double(traj.states[i].x2) << ',' << label << '\n';
  }
}

std::size_t integration_count() { return g_integrations.load(); }

}  // namespace revroa
