#include "revroa/lyapunov.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <string>

#include "revroa/errors.hpp"

namespace revroa {

Eigen::Matrix2d solve_lyapunov_2x2(const Eigen::Matrix2d& a, const Eigen::Matrix2d& q) {
  if (!is_hurwitz(a, 1e-12)) throw NotHurwitz("matrix has an eigenvalue with real part >= -1e-12");
  const double a11 = a(0, 0), a12 = a(0, 1), a21 = a(1, 0), a22 = a(1, 1);
  // Unknowns (P11, P12, P22) of the symmetric solution.
  Eigen::Matrix3d m;
  m << 2.0 * a11, 2.0 * a21, 0.0,
       a12, a11 + a22, a21,
       0.0, 2.0 * a12, 2.0 * a22;
  const Eigen::Vector3d rhs(-q(0, 0), -0.5 * (q(0, 1) + q(1, 0)), -q(1, 1));
  const Eigen::Vector3d sol = m.fullPivLu().solve(rhs);
  Eigen::Matrix2d p;
  p << sol(0), sol(1), sol(1), sol(2);
  return p;
}

double LyapunovSeed::value(State x) const {
  const Eigen::Vector2d d(x.x1 - x_eq.x1, x.x2 - x_eq.x2);
  return d.dot(p * d);
}

double LyapunovSeed::max_radius() const {
  const double lambda_min = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(p).eigenvalues()(0);
  return std::sqrt(level / lambda_min);
}

State seed_point(const LyapunovSeed& seed, double theta) {
  const Eigen::Vector2d u(std::cos(theta), std::sin(theta));
  const double r = std::sqrt(seed.level / u.dot(seed.p * u));
  return {seed.x_eq.x1 + r * u(0), seed.x_eq.x2 + r * u(1)};
}

double level_for_semi_axis(const Eigen::Matrix2d& p, double semi_axis) {
  const double lambda_min = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(p).eigenvalues()(0);
  return lambda_min * semi_axis * semi_axis;
}

namespace {

bool level_is_decreasing(const LyapunovSeed& seed, const Scenario& sc, const SeedOptions& opts) {
  const Segment post = sc.steady_segment(Phase::PostFault);
  const double t0 = sc.ramp_end();
  IntegratorConfig cfg = opts.integrator;
  cfg.record_steps = true;
  cfg.max_step = std::min(cfg.max_step, opts.check_horizon / 20.0);
  for (int i = 0; i < opts.n_check; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / opts.n_check;
    const auto traj = integrate_forward(seed_point(seed, theta), t0, t0 + opts.check_horizon, sc, cfg);
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
      const State x = traj.states[k];
      const State f = rhs(traj.times[k], x, post, sc.params, sc.params.sat_mode);
      const Eigen::Vector2d d(x.x1 - seed.x_eq.x1, x.x2 - seed.x_eq.x2);
      const double v_dot = 2.0 * d.dot(seed.p * Eigen::Vector2d(f.x1, f.x2));
      if (!(v_dot < 0.0) && d.norm() > 0.0) return false;
    }
  }
  return true;
}

}  // namespace

LyapunovSeed build_seed(const Scenario& sc, double level, int n_check, const SeedOptions& opts) {
  if (!(level > 0.0)) throw ConfigError("seed level must be > 0");
  if (n_check < 1) throw ConfigError("n_check must be >= 1");
  LyapunovSeed seed;
  seed.x_eq = equilibrium(sc, Phase::PostFault);
  const Segment post = sc.steady_segment(Phase::PostFault);
  const Eigen::Matrix2d a = jacobian(seed.x_eq, post.t_begin, post, sc.params, sc.params.sat_mode);
  seed.p = solve_lyapunov_2x2(a, Eigen::Matrix2d::Identity());
  seed.level = level;

  SeedOptions check = opts;
  check.n_check = n_check;
  for (int halving = 0; halving <= opts.max_halvings; ++halving) {
    seed.halvings = halving;
    if (level_is_decreasing(seed, sc, check)) return seed;
    seed.level *= 0.5;
  }
  throw SeedTooLarge("Lyapunov level failed validation after " + std::to_string(opts.max_halvings) +
                     " halvings");
}

LyapunovSeed build_seed(const Scenario& sc, const SeedOptions& opts) {
  const State x_eq = equilibrium(sc, Phase::PostFault);
  const Segment post = sc.steady_segment(Phase::PostFault);
  const Eigen::Matrix2d a = jacobian(x_eq, post.t_begin, post, sc.params, sc.params.sat_mode);
  const Eigen::Matrix2d p = solve_lyapunov_2x2(a, Eigen::Matrix2d::Identity());
  return build_seed(sc, level_for_semi_axis(p, opts.semi_axis), opts.n_check, opts);
}

}  // namespace revroa
