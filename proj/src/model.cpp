#include "revroa/model.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "revroa/errors.hpp"

namespace revroa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMassFloor = 1e-9;

double max_real_eigenvalue(const Eigen::Matrix2d& a) {
  const double half_tr = 0.5 * a.trace();
  const double disc = half_tr * half_tr - a.determinant();
  return disc > 0.0 ? half_tr + std::sqrt(disc) : half_tr;
}

}  // namespace

std::string_view to_string(SatMode mode) {
  switch (mode) {
    case SatMode::None: return "none";
    case SatMode::Hard: return "hard";
    case SatMode::Smooth: return "smooth";
  }
  return "none";
}

SatMode parse_sat_mode(std::string_view text) {
  if (text == "none") return SatMode::None;
  if (text == "hard") return SatMode::Hard;
  if (text == "smooth") return SatMode::Smooth;
  throw ConfigError("unknown sat_mode '" + std::string(text) + "' (expected none|hard|smooth)");
}

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::PreFault: return "pre-fault";
    case Phase::Fault: return "fault";
    case Phase::Ramp: return "ramp";
    case Phase::PostFault: return "post-fault";
  }
  return "post-fault";
}

double norm(State s) { return std::hypot(s.x1, s.x2); }
bool is_finite(State s) { return std::isfinite(s.x1) && std::isfinite(s.x2); }

// ---------------------------------------------------------------------------
// SystemParams

double SystemParams::voltage_base() const { return v_ll_rms * std::sqrt(2.0 / 3.0); }

double SystemParams::current_base() const {
  return std::sqrt(2.0) * s_base / (std::sqrt(3.0) * v_ll_rms);
}

double SystemParams::impedance_base() const { return v_ll_rms * v_ll_rms / s_base; }

void SystemParams::update_impedance() {
  const double z = impedance_base() / scr;
  r_lg = z / std::sqrt(1.0 + xr * xr);
  l_g = r_lg * xr / omega_g;
}

void SystemParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(k_p > 0.0, "k_p must be > 0");
  require(k_i > 0.0, "k_i must be > 0");
  require(l_g > 0.0, "L_g must be > 0");
  require(r_lg >= 0.0, "r_Lg must be >= 0");
  require(s_base > 0.0 && v_ll_rms > 0.0, "power and voltage bases must be > 0");
  require(scr > 0.0 && xr > 0.0, "SCR and X/R must be > 0");
  require(omega_g > 0.0 && omega0 > 0.0, "frequencies must be > 0");
  require(v_g_prefault >= 0.0 && v_g_fault >= 0.0 && v_g_postfault >= 0.0,
          "grid voltages must be >= 0");
  require(sat_limit > 0.0, "sat_limit must be > 0");
}

SystemParams SystemParams::reference() {
  SystemParams p;
  p.update_impedance();
  return p;
}

// ---------------------------------------------------------------------------
// Scenario

double Scenario::ramp_duration() const {
  if (!ramp_enabled) return 0.0;
  return std::max(0.0, (i_d_target - i_d_fault) / ramp_rate);
}

std::vector<Segment> Scenario::segments() const {
  const double v_post = params.v_g_postfault;
  std::vector<Segment> out;
  out.push_back({Phase::PreFault, -kInf, t_fault_start, params.v_g_prefault, i_d_prefault, 0.0,
                 i_q_prefault});
  if (t_fault_clear > t_fault_start) {
    out.push_back(
        {Phase::Fault, t_fault_start, t_fault_clear, params.v_g_fault, i_d_fault, 0.0, i_q_fault});
  }
  const double t_ramp_end = ramp_end();
  if (t_ramp_end > t_fault_clear) {
    out.push_back(
        {Phase::Ramp, t_fault_clear, t_ramp_end, v_post, i_d_fault, ramp_rate, i_q_prefault});
  }
  out.push_back({Phase::PostFault, t_ramp_end, kInf, v_post, i_d_target, 0.0, i_q_prefault});
  return out;
}

Segment Scenario::segment_at(double t) const {
  const auto segs = segments();
  for (const auto& s : segs) {
    if (t < s.t_end) return s;
  }
  return segs.back();
}

Segment Scenario::steady_segment(Phase phase) const {
  const auto segs = segments();
  const auto it = std::find_if(segs.begin(), segs.end(),
                               [phase](const Segment& s) { return s.phase == phase; });
  if (it == segs.end() || it->i_d_slope != 0.0) {
    throw ConfigError("phase '" + std::string(to_string(phase)) + "' is not a steady segment");
  }
  return *it;
}

Scenario Scenario::with_clearing_time(double t_clear) const {
  Scenario out = *this;
  out.t_fault_clear = t_clear;
  return out;
}

void Scenario::validate() const {
  params.validate();
  if (ramp_enabled && !(ramp_rate > 0.0)) throw ConfigError("ramp_rate must be > 0");
  if (t_fault_clear < t_fault_start) throw ConfigError("t_fault_clear must not precede t_fault_start");
  if (i_d_target < i_d_fault && ramp_enabled) {
    throw ConfigError("i_d_target must be >= i_d_fault for an upward recovery ramp");
  }
  auto check_limit = [this](double i_d, double i_q, const char* phase) {
    if (std::hypot(i_d, i_q) > i_max * (1.0 + 1e-12)) {
      throw ConfigError(std::string("current magnitude exceeds i_max in ") + phase + " phase");
    }
  };
  check_limit(i_d_prefault, i_q_prefault, "pre-fault");
  check_limit(i_d_fault, i_q_fault, "fault");
  check_limit(i_d_target, i_q_prefault, "post-fault");
}

Scenario Scenario::reference() {
  Scenario sc;
  sc.params = SystemParams::reference();
  sc.ramp_rate = ramp_kA_per_s_to_pu(28.4, sc.params);
  return sc;
}

double ramp_kA_per_s_to_pu(double kA_per_s, const SystemParams& params) {
  return kA_per_s * 1e3 / params.current_base();
}

double ramp_pu_to_kA_per_s(double pu_per_s, const SystemParams& params) {
  return pu_per_s * params.current_base() * 1e-3;
}

// ---------------------------------------------------------------------------
// Dynamics

SwingCoefficients coefficients(State s, double t, const Segment& seg, const SystemParams& p) {
  const double ib = p.current_base();
  const double i_d = seg.i_d(t) * ib;
  const double di_d = seg.i_d_slope * ib;
  const double i_q = seg.i_q * ib;
  const double v_g = seg.v_g * p.voltage_base();

  SwingCoefficients c;
  c.m_eq = 1.0 - p.k_p * p.l_g * i_d;
  // i_q is constant on every segment, so its first and second derivatives vanish.
  c.t_m_eq = p.k_p * (p.l_g * di_d * p.omega_g) + p.k_i * (p.r_lg * i_q + p.l_g * i_d * p.omega_g);
  c.t_e_eq = p.k_i * v_g * std::sin(s.x1);
  c.d_eq = p.k_p * (v_g * std::cos(s.x1) - p.l_g * di_d) - p.k_i * p.l_g * i_d;
  if (std::abs(c.m_eq) < kMassFloor) {
    throw DegenerateMass("M_eq = " + std::to_string(c.m_eq) + " at t = " + std::to_string(t));
  }
  return c;
}

SwingCoefficients coefficients(State s, double t, const Scenario& sc) {
  return coefficients(s, t, sc.segment_at(t), sc.params);
}

double saturate_smooth(double x2, double sat_limit) { return sat_limit * std::tanh(x2 / sat_limit); }

double effective_rate(double x2, const SystemParams& p, SatMode mode) {
  switch (mode) {
    case SatMode::None: return x2;
    case SatMode::Hard: return std::clamp(x2, -p.sat_limit, p.sat_limit);
    case SatMode::Smooth: return saturate_smooth(x2, p.sat_limit);
  }
  return x2;
}

State rhs(double t, State s, const Segment& seg, const SystemParams& p, SatMode mode) {
  const auto c = coefficients(s, t, seg, p);
  const double rate = effective_rate(s.x2, p, mode);
  return {rate, (c.t_m_eq - c.t_e_eq - c.d_eq * rate) / c.m_eq};
}

State rhs(double t, State s, const Scenario& sc, SatMode mode) {
  return rhs(t, s, sc.segment_at(t), sc.params, mode);
}

State rhs(double t, State s, const Scenario& sc) { return rhs(t, s, sc, sc.params.sat_mode); }

Eigen::Matrix2d jacobian(State s, double t, const Segment& seg, const SystemParams& p,
                         SatMode mode) {
  const auto c = coefficients(s, t, seg, p);
  const double v_g = seg.v_g * p.voltage_base();
  const double rate = effective_rate(s.x2, p, mode);
  double drate = 1.0;
  if (mode == SatMode::Hard) {
    drate = std::abs(s.x2) < p.sat_limit ? 1.0 : 0.0;
  } else if (mode == SatMode::Smooth) {
    const double ch = std::cosh(s.x2 / p.sat_limit);
    drate = 1.0 / (ch * ch);
  }
  // dT_e/dx1 = k_i V cos x1, dD/dx1 = -k_p V sin x1.
  const double dt_e = p.k_i * v_g * std::cos(s.x1);
  const double dd = -p.k_p * v_g * std::sin(s.x1);
  Eigen::Matrix2d a;
  a << 0.0, drate, (-dt_e - dd * rate) / c.m_eq, -c.d_eq * drate / c.m_eq;
  return a;
}

Eigen::Matrix2d jacobian(State s, double t, const Scenario& sc, SatMode mode) {
  return jacobian(s, t, sc.segment_at(t), sc.params, mode);
}

bool is_hurwitz(const Eigen::Matrix2d& a, double margin) { return max_real_eigenvalue(a) < -margin; }

State equilibrium(const Scenario& sc, Phase phase, State guess) {
  const Segment seg = sc.steady_segment(phase);
  const SystemParams& p = sc.params;
  const double t = std::isfinite(seg.t_begin) ? seg.t_begin : seg.t_end;
  const double v_g = seg.v_g * p.voltage_base();
  // On a steady segment x2 = 0 and the swing equation reduces to
  // k_i V sin(x1) = T_m.
  const double t_m = coefficients({0.0, 0.0}, t, seg, p).t_m_eq;
  const double k = p.k_i * v_g;
  if (!(k > 0.0) || std::abs(t_m) > k) {
    throw NoEquilibrium("no synchronising solution: |T_m| = " + std::to_string(std::abs(t_m)) +
                        " exceeds k_i*V_g = " + std::to_string(k));
  }

  auto residual = [&](double x) { return k * std::sin(x) - t_m; };
  auto newton = [&](double x) {
    double r = residual(x);
    for (int it = 0; it < 100; ++it) {
      if (std::abs(r) <= 1e-13 * k) return x;
      double slope = k * std::cos(x);
      if (std::abs(slope) < 1e-12 * k) slope = slope < 0.0 ? -1e-6 * k : 1e-6 * k;
      double step = -r / slope;
      double damping = 1.0;
      double x_new = x + step;
      double r_new = residual(x_new);
      while (std::abs(r_new) >= std::abs(r) && damping > 1e-6) {
        damping *= 0.5;
        x_new = x + damping * step;
        r_new = residual(x_new);
      }
      x = x_new;
      r = r_new;
    }
    if (std::abs(r) <= 1e-10) return x;
    throw NoConvergence("equilibrium Newton iteration did not converge in 100 iterations");
  };

  auto stable = [&](double x) {
    const State s{x, 0.0};
    return coefficients(s, t, seg, p).d_eq > 0.0 && is_hurwitz(jacobian(s, t, seg, p, SatMode::None));
  };

  double x = newton(guess.x1);
  if (!stable(x)) {
    // Other root of the sine equation in the same period.
    double mirror = std::numbers::pi - x;
    mirror += 2.0 * std::numbers::pi * std::round((guess.x1 - mirror) / (2.0 * std::numbers::pi));
    x = newton(mirror);
    if (!stable(x)) throw NoEquilibrium("no linearly stable equilibrium on this segment");
  }
  return {x, 0.0};
}

}  // namespace revroa
