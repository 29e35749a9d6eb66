#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "revroa/errors.hpp"
#include "revroa/lyapunov.hpp"
#include "revroa/ode.hpp"
#include "support.hpp"

using namespace revroa;

TEST_SUITE("ode") {

TEST_CASE("during-fault motion matches the closed-form solution") {
  // With V_g = 0 the swing equation is linear in x2: M x2' = T_m - D x2.
  Scenario sc = Scenario::reference();
  sc.t_fault_clear = 0.6;
  const SystemParams& p = sc.params;
  const double ib = p.current_base();
  const double m = 1.0 - p.k_p * p.l_g * sc.i_d_fault * ib;
  const double tm = p.k_i * (p.r_lg * sc.i_q_fault * ib + p.l_g * sc.i_d_fault * ib * p.omega_g);
  const double d = -p.k_i * p.l_g * sc.i_d_fault * ib;
  const double a = -d / m, b = tm / m;

  const State x0{0.3, 0.0};
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-10;
  cfg.abs_tol = 1e-12;
  const Trajectory traj = integrate_forward(x0, 0.0, 0.6, sc, cfg);
  REQUIRE(traj.times.size() > 2);
  for (std::size_t i = 0; i < traj.times.size(); i += 5) {
    const double t = traj.times[i];
    const double c = x0.x2 + b / a;
    const double x2 = c * std::exp(a * t) - b / a;
    const double x1 = x0.x1 + c * std::expm1(a * t) / a - b / a * t;
    CHECK(traj.states[i].x1 == doctest::Approx(x1).epsilon(1e-8));
    CHECK(traj.states[i].x2 == doctest::Approx(x2).epsilon(1e-8));
  }
}

TEST_CASE("reverse integration undoes forward integration") {
  using revroa::test::uniform;
  for (SatMode mode : {SatMode::None, SatMode::Smooth}) {
    Scenario sc = Scenario::reference();
    sc.params.sat_mode = mode;
    const State x_eq = equilibrium(sc, Phase::PostFault);
    IntegratorConfig cfg;
    for (int i = 0; i < 10; ++i) {
      const State x0{x_eq.x1 + uniform(-1.0, 1.0), uniform(-10.0, 10.0)};
      const double t0 = sc.t_fault_clear;
      const Trajectory fwd = integrate_forward(x0, t0, t0 + 0.8, sc, cfg);
      const Trajectory back = integrate_reverse(fwd.back(), t0 + 0.8, 0.8, sc, cfg);
      CHECK(norm(back.back() - x0) < 1e-4);
      CHECK(back.reverse);
      CHECK(back.end_time() == doctest::Approx(0.8));
    }
  }
}

TEST_CASE("hard saturation refuses reverse time") {
  Scenario sc = Scenario::reference();
  sc.params.sat_mode = SatMode::Hard;
  CHECK_THROWS_AS(integrate_reverse({0.3, 0.0}, 1.0, sc, IntegratorConfig{}), HardSaturationNotReversible);
  CHECK_NOTHROW(integrate_forward({0.3, 0.0}, 0.0, 0.5, sc, IntegratorConfig{}));
}

TEST_CASE("phase switches are step boundaries and emit events") {
  const Scenario sc = Scenario::reference();
  const Trajectory traj = integrate_forward({0.3, 0.0}, 0.0, 1.0, sc, IntegratorConfig{});
  REQUIRE(traj.first_event(EventKind::FaultCleared));
  CHECK(*traj.first_event(EventKind::FaultCleared) == sc.t_fault_clear);
  CHECK(*traj.first_event(EventKind::RampStarted) == sc.t_fault_clear);
  CHECK(*traj.first_event(EventKind::RampEnded) == doctest::Approx(sc.ramp_end()).epsilon(1e-15));
  bool hit_clear = false, hit_ramp_end = false;
  for (double t : traj.times) {
    hit_clear |= t == sc.t_fault_clear;
    hit_ramp_end |= t == sc.ramp_end();
  }
  CHECK(hit_clear);
  CHECK(hit_ramp_end);
  for (std::size_t i = 1; i < traj.times.size(); ++i) CHECK(traj.times[i] > traj.times[i - 1]);
}

TEST_CASE("tighter tolerances converge to the same answer") {
  const Scenario sc = revroa::test::smooth_reference();
  auto end_state = [&](double rel) {
    IntegratorConfig cfg;
    cfg.rel_tol = rel;
    cfg.abs_tol = rel * 1e-2;
    cfg.record_steps = false;
    return integrate_forward({1.5, 20.0}, sc.t_fault_clear, sc.t_fault_clear + 2.0, sc, cfg).back();
  };
  const State ref = end_state(1e-12);
  const double e6 = norm(end_state(1e-6) - ref);
  const double e8 = norm(end_state(1e-8) - ref);
  CHECK(e8 < 1e-5);
  CHECK(e8 <= e6);
}

TEST_CASE("band entry is located and stops the run") {
  const Scenario sc = revroa::test::smooth_reference();
  const LyapunovSeed seed = build_seed(sc);
  ForwardOptions opts;
  opts.band = [&](double, State x) { return seed.inside(x); };
  opts.tracked_equilibrium = seed.x_eq;
  const State x0 = seed.x_eq + State{0.5, 0.0};
  const Trajectory traj = integrate_forward(x0, sc.ramp_end(), sc.ramp_end() + 5.0, sc, IntegratorConfig{}, opts);
  REQUIRE(traj.has_event(EventKind::ToleranceBandEntered));
  CHECK(seed.inside(traj.back()));
  CHECK(seed.value(traj.back()) == doctest::Approx(seed.level).epsilon(1e-3));
  CHECK(*traj.first_event(EventKind::ToleranceBandEntered) == traj.end_time());
}

TEST_CASE("divergence is detected from the tracked equilibrium") {
  const Scenario sc = revroa::test::smooth_reference();
  const State x_eq = equilibrium(sc, Phase::PostFault);
  ForwardOptions opts;
  opts.tracked_equilibrium = x_eq;
  IntegratorConfig cfg;
  cfg.divergence_radius = 0.5;
  const Trajectory traj = integrate_forward(x_eq + State{0.0, 40.0}, sc.ramp_end(), sc.ramp_end() + 5.0, sc, cfg, opts);
  CHECK(traj.has_event(EventKind::DivergenceDetected));
  CHECK(norm(traj.back() - x_eq) > 0.5);
}

TEST_CASE("record_steps=false keeps only the endpoints") {
  IntegratorConfig cfg;
  cfg.record_steps = false;
  const Trajectory traj = integrate_forward({0.3, 0.0}, 0.0, 1.0, Scenario::reference(), cfg);
  CHECK(traj.states.size() == 2);
  CHECK(traj.times.back() == 1.0);
}

TEST_CASE("configuration validation") {
  IntegratorConfig cfg;
  cfg.rel_tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK_THROWS_AS(integrate_forward({0.0, 0.0}, 1.0, 1.0, Scenario::reference(), IntegratorConfig{}), ConfigError);
}

TEST_CASE("trajectory CSV") {
  const Trajectory traj = integrate_forward({0.3, 0.0}, 0.0, 0.3, Scenario::reference(), IntegratorConfig{});
  std::ostringstream out;
  write_trajectory_csv(out, traj, {"config_hash: abc"});
  const std::string text = out.str();
  CHECK(text.rfind("# config_hash: abc\n", 0) == 0);
  CHECK(text.find("\nt,delta_rad,ddelta_rad_per_s,event\n") != std::string::npos);
  CHECK(text.find("FaultCleared") != std::string::npos);
  CHECK(format_double(0.1) == "0.10000000000000001");
}

}  // TEST_SUITE
