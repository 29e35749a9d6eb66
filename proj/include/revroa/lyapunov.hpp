#pragma once

#include <Eigen/Core>

#include "revroa/model.hpp"
#include "revroa/ode.hpp"

namespace revroa {

/// Unique symmetric P with A^T P + P A = -Q. Throws NotHurwitz unless both
/// eigenvalues of A have real part < -1e-12.
Eigen::Matrix2d solve_lyapunov_2x2(const Eigen::Matrix2d& a, const Eigen::Matrix2d& q);

/// Level set {x : (x - x_eq)^T P (x - x_eq) = level} around the post-fault
/// equilibrium. Serves as reverse-time initial set and as the "settled" band.
struct LyapunovSeed {
  Eigen::Matrix2d p = Eigen::Matrix2d::Identity();
  double level = 0.0;
  State x_eq;
  int halvings = 0;

  double value(State x) const;
  bool inside(State x) const { return value(x) <= level; }
  /// Largest distance of the boundary from x_eq.
  double max_radius() const;
};

State seed_point(const LyapunovSeed& seed, double theta);

struct SeedOptions {
  double semi_axis = 0.05;  ///< initial largest semi-axis before validation
  int n_check = 64;
  double check_horizon = 0.1;  ///< [s]
  int max_halvings = 20;
  IntegratorConfig integrator;
};

/// Level whose ellipse has the given largest semi-axis.
double level_for_semi_axis(const Eigen::Matrix2d& p, double semi_axis);

/// Linearises the post-fault steady dynamics, solves the Lyapunov equation
/// with Q = I and validates `level` by checking V decreases along short
/// forward runs from n_check boundary points, halving on failure.
LyapunovSeed build_seed(const Scenario& sc, double level, int n_check,
                        const SeedOptions& opts = {});
LyapunovSeed build_seed(const Scenario& sc, const SeedOptions& opts = {});

}  // namespace revroa
