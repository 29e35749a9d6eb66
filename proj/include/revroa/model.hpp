#pragma once

// Reduced-order model of a grid-following converter: the PLL angle obeys an
// equivalent swing equation  M_eq * x2' = T_m_eq - T_e_eq - D_eq * x1'.
//
// Quantities inside the swing equation are physical: volts (phase peak),
// amperes (peak), ohms, henries. Currents and voltages in a Scenario are per
// unit and scaled by SystemParams::current_base() / voltage_base().

#include <Eigen/Core>

#include <array>
#include <numbers>
#include <string_view>
#include <vector>

namespace revroa {

enum class SatMode { None, Hard, Smooth };

std::string_view to_string(SatMode mode);
SatMode parse_sat_mode(std::string_view text);

struct State {
  double x1 = 0.0;  ///< PLL angle delta [rad]
  double x2 = 0.0;  ///< PLL angle rate, deviation from omega0 [rad/s]

  friend bool operator==(const State&, const State&) = default;
};

inline State operator+(State a, State b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
inline State operator-(State a, State b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
inline State operator*(double k, State a) { return {k * a.x1, k * a.x2}; }
double norm(State s);
bool is_finite(State s);

struct SystemParams {
  double k_p = 0.025;
  double k_i = 1.5;
  double s_base = 12e6;     ///< rated power [VA]
  double v_ll_rms = 690.0;  ///< rated line-line rms voltage [V]
  double omega_g = 2.0 * std::numbers::pi * 50.0;
  double omega0 = 2.0 * std::numbers::pi * 50.0;
  double scr = 3.3;
  double xr = 18.6;
  double r_lg = 0.0;  ///< grid resistance [ohm], derived from scr/xr
  double l_g = 0.0;   ///< grid inductance [H], derived from scr/xr
  double v_g_prefault = 1.0;
  double v_g_fault = 0.0;
  double v_g_postfault = 1.0;
  double sat_limit = 2.0 * std::numbers::pi * 5.0;
  SatMode sat_mode = SatMode::None;

  double voltage_base() const;    ///< phase peak [V]
  double current_base() const;    ///< peak [A]
  double impedance_base() const;  ///< [ohm]

  /// Recomputes r_lg and l_g from scr and xr: |Z| = Z_base / SCR, X/R = xr.
  void update_impedance();
  /// Throws ConfigError on an invariant violation.
  void validate() const;

  /// Operating point used throughout: 12 MVA, 690 V, SCR 3.3, X/R 18.6.
  static SystemParams reference();
};

enum class Phase { PreFault, Fault, Ramp, PostFault };

std::string_view to_string(Phase phase);

/// One piece of the current/voltage schedule. i_d is affine in time inside it.
struct Segment {
  Phase phase = Phase::PostFault;
  double t_begin = 0.0;
  double t_end = 0.0;
  double v_g = 1.0;          ///< [pu]
  double i_d_begin = 0.0;    ///< [pu] at t_begin
  double i_d_slope = 0.0;    ///< [pu/s]
  double i_q = 0.0;          ///< [pu]

  double i_d(double t) const { return i_d_slope == 0.0 ? i_d_begin : i_d_begin + i_d_slope * (t - t_begin); }
};

struct Scenario {
  SystemParams params;
  double i_d_prefault = 1.0;
  double i_q_prefault = 0.0;
  double i_d_fault = 0.01;
  double i_q_fault = -1.0;
  double i_d_target = 1.0;
  bool ramp_enabled = true;
  double ramp_rate = 2.0;  ///< [pu/s]
  double t_fault_start = 0.0;
  double t_fault_clear = 0.15;
  double i_max = 1.1;

  double ramp_duration() const;
  double ramp_end() const { return t_fault_clear + ramp_duration(); }

  /// Schedule covering the whole real line, in time order.
  std::vector<Segment> segments() const;
  Segment segment_at(double t) const;
  Segment steady_segment(Phase phase) const;

  Scenario with_clearing_time(double t_clear) const;

  void validate() const;

  static Scenario reference();
};

/// Converts a ramp given in kA/s into pu/s on the peak current base.
double ramp_kA_per_s_to_pu(double kA_per_s, const SystemParams& params);
double ramp_pu_to_kA_per_s(double pu_per_s, const SystemParams& params);

struct SwingCoefficients {
  double m_eq = 1.0;
  double t_m_eq = 0.0;
  double t_e_eq = 0.0;
  double d_eq = 0.0;
};

SwingCoefficients coefficients(State s, double t, const Segment& seg, const SystemParams& p);
SwingCoefficients coefficients(State s, double t, const Scenario& sc);

double saturate_smooth(double x2, double sat_limit);
/// x2 as seen by the angle integrator under `mode`.
double effective_rate(double x2, const SystemParams& p, SatMode mode);

State rhs(double t, State s, const Segment& seg, const SystemParams& p, SatMode mode);
State rhs(double t, State s, const Scenario& sc, SatMode mode);
State rhs(double t, State s, const Scenario& sc);

Eigen::Matrix2d jacobian(State s, double t, const Segment& seg, const SystemParams& p, SatMode mode);
Eigen::Matrix2d jacobian(State s, double t, const Scenario& sc, SatMode mode);

/// Stable equilibrium of a steady phase (PreFault or PostFault), nearest the
/// branch Newton lands on from `guess`.
State equilibrium(const Scenario& sc, Phase phase, State guess = {});

bool is_hurwitz(const Eigen::Matrix2d& a, double margin = 0.0);

}  // namespace revroa
