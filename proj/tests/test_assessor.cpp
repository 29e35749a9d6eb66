#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "revroa/assessor.hpp"
#include "revroa/errors.hpp"
#include "support.hpp"

using namespace revroa;

namespace {

constexpr double kPi = std::numbers::pi;

BoundaryCurve square(double half, State c) {
  BoundaryCurve b;
  b.vertices = {c + State{-half, -half}, c + State{half, -half}, c + State{half, half}, c + State{-half, half}};
  b.thetas = {0.0, 1.0, 2.0, 3.0};
  return b;
}

SweepPoint point(double t, Label verdict) {
  SweepPoint p;
  p.assessment.clearing_time = t;
  p.assessment.verdict = verdict;
  return p;
}

struct Fixture {
  Scenario sc = revroa::test::smooth_reference();
  LyapunovSeed seed = build_seed(sc);
  IntegratorConfig cfg;
  TlroaResult home = estimate_tlroa(sc, seed, 1.0, SamplerConfig{}, cfg);
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

}  // namespace

TEST_SUITE("assessor") {

TEST_CASE("angle wrapping") {
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(3 * kPi / 2) == doctest::Approx(-kPi / 2));
  for (int k = -3; k <= 3; ++k) CHECK(wrap_angle(0.4 + 2 * kPi * k) == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("fault trajectory") {
  const Scenario sc = revroa::test::smooth_reference();
  const State pre = equilibrium(sc, Phase::PreFault);
  const Trajectory zero = fault_trajectory(sc, sc.t_fault_start, IntegratorConfig{});
  REQUIRE(zero.states.size() == 1);
  CHECK(zero.back() == pre);

  const Trajectory traj = fault_trajectory(sc, 0.4, IntegratorConfig{});
  CHECK(traj.times.front() == sc.t_fault_start);
  CHECK(traj.end_time() == doctest::Approx(0.4));
  CHECK(traj.states.front() == pre);
  // V_g = 0 leaves no restoring torque: the angle drifts monotonically.
  const double dir = traj.states.back().x1 - traj.states.front().x1;
  CHECK(dir != 0.0);
  for (std::size_t i = 1; i < traj.states.size(); ++i) CHECK((traj.states[i].x1 - traj.states[i - 1].x1) * dir >= 0.0);

  std::ostringstream out;
  write_fault_trajectory_csv(out, traj);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,delta_rad,delta_wrapped_rad,ddelta_rad_per_s");
  int rows = 0;
  while (std::getline(in, line)) {
    double t, d, w, r;
    char c;
    std::istringstream row(line);
    row >> t >> c >> d >> c >> w >> c >> r;
    CHECK(w == doctest::Approx(wrap_angle(d)));
    CHECK(std::remainder(d - w, 2 * kPi) == doctest::Approx(0.0).scale(1.0));
    ++rows;
  }
  CHECK(rows == static_cast<int>(traj.states.size()));
}

TEST_CASE("membership tries the home copy first, then neighbours") {
  const BoundaryCurve home = square(1.0, {0.3, 0.0});
  CHECK(classify_membership({0.3, 0.5}, home) == Label{Verdict::StableHome, 0});
  CHECK(classify_membership({0.3 + 2 * kPi, 0.5}, home) == Label{Verdict::StableNeighbor, 1});
  CHECK(classify_membership({0.3 - 4 * kPi, 0.5}, home) == Label{Verdict::StableNeighbor, -2});
  CHECK(classify_membership({0.3 + 6 * kPi, 0.5}, home).verdict == Verdict::Unstable);
  CHECK(classify_membership({0.3 + 6 * kPi, 0.5}, home, 3) == Label{Verdict::StableNeighbor, 3});
  CHECK(classify_membership({0.3, 5.0}, home).verdict == Verdict::Unstable);
}

TEST_CASE("membership is equivariant under 2*pi shifts") {
  const BoundaryCurve& home = fixture().home.curve;
  using revroa::test::uniform;
  for (int i = 0; i < 200; ++i) {
    const State x{uniform(-6.0, 6.0), uniform(-40.0, 40.0)};
    const Label a = classify_membership(x, home, 4);
    const Label b = classify_membership(x + State{2 * kPi, 0.0}, home, 4);
    if (a.stable() && std::abs(a.neighbor) < 3) {
      CHECK(b.stable());
      CHECK(b.neighbor == a.neighbor + 1);
    }
  }
}

TEST_CASE("assessment at the trivial clearing time") {
  const Fixture& f = fixture();
  const AssessmentResult r = assess(f.sc, f.sc.t_fault_start, f.home.curve, 2, f.cfg);
  CHECK(r.post_fault_state == equilibrium(f.sc, Phase::PreFault));
  CHECK(r.verdict == Label{Verdict::StableHome, 0});
  CHECK(r.wrapped_state.x1 == doctest::Approx(wrap_angle(r.post_fault_state.x1)));
}

TEST_CASE("interval coalescing") {
  const Label home{Verdict::StableHome, 0}, bad{Verdict::Unstable, 0}, left{Verdict::StableNeighbor, -1};
  const std::vector<SweepPoint> pts{point(0.1, home), point(0.2, home), point(0.3, bad), point(0.4, left),
                                    point(0.5, left)};
  const auto iv = coalesce(pts);
  REQUIRE(iv.size() == 3);
  CHECK(iv[0].t_begin == 0.1);
  CHECK(iv[0].t_end == 0.2);
  CHECK(iv[1].verdict == bad);
  CHECK(iv[1].t_begin == iv[1].t_end);
  CHECK(iv[2].verdict == left);
  CHECK(iv[2].t_end == 0.5);
  CHECK(coalesce({}).empty());

  ClearingWindowReport rep;
  rep.points = pts;
  rep.intervals = iv;
  const auto tr = rep.stability_transitions();
  REQUIRE(tr.size() == 2);
  CHECK(tr[0] == 0.3);
  CHECK(tr[1] == 0.4);
}

TEST_CASE("sweep range") {
  SweepRange r{0.1, 0.3, 0.05};
  const auto t = r.times();
  REQUIRE(t.size() == 5);
  CHECK(t.back() == doctest::Approx(0.3));
  r.dt = 0.0;
  CHECK_THROWS_AS(r.validate(), ConfigError);
  r = {0.5, 0.1, 0.1};
  CHECK_THROWS_AS(r.validate(), ConfigError);
}

TEST_CASE("clearing sweep: no violations, transitions bracketed under refinement") {
  const Fixture& f = fixture();
  const ClearingWindowReport coarse = clearing_windows(f.sc, {0.1, 1.0, 0.04}, f.home.curve, f.seed, 2, f.cfg);
  const ClearingWindowReport fine = clearing_windows(f.sc, {0.1, 1.0, 0.02}, f.home.curve, f.seed, 2, f.cfg);
  CHECK(coarse.count(Agreement::Violation) == 0);
  CHECK(fine.count(Agreement::Violation) == 0);
  CHECK(coarse.points.front().assessment.verdict == Label{Verdict::StableHome, 0});
  CHECK(coarse.integrations >= coarse.points.size());
  const auto tc = coarse.stability_transitions();
  const auto tf = fine.stability_transitions();
  REQUIRE(!tc.empty());
  REQUIRE(tc.size() == tf.size());
  for (std::size_t i = 0; i < tc.size(); ++i) {
    CHECK(tf[i] <= tc[i] + 1e-9);
    CHECK(tf[i] > tc[i] - 0.04 - 1e-9);
  }

  std::ostringstream text;
  write_report_text(text, coarse);
  CHECK(text.str().find("StableHome") != std::string::npos);
}

TEST_CASE("a weak grid leaves the post-fault state outside every copy") {
  Scenario sc = revroa::test::smooth_reference();
  sc.params.scr = 1.1;
  sc.params.update_impedance();
  const LyapunovSeed seed = build_seed(sc);
  const IntegratorConfig cfg;
  const TlroaResult home = estimate_tlroa(sc, seed, 1.0, SamplerConfig{}, cfg);
  const AssessmentResult r = assess(sc, 0.3, home.curve, 2, cfg);
  CHECK(r.verdict.verdict == Verdict::Unstable);
}

}  // TEST_SUITE
