#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "revroa/errors.hpp"
#include "revroa/model.hpp"

namespace revroa {

enum class LossKind { Homogeneous, Euclidean, Curvature };

std::string_view to_string(LossKind kind);
LossKind parse_loss_kind(std::string_view text);

struct SamplerConfig {
  LossKind loss_kind = LossKind::Curvature;
  double loss_goal = 0.03;
  std::size_t n_min = 16;
  std::size_t n_max = 512;
  /// Midpoints evaluated per refinement round. Part of the configuration, not
  /// the worker count, so results do not depend on parallelism.
  std::size_t batch = 1;

  void validate() const;
};

struct Sample {
  double theta = 0.0;
  State endpoint;
  std::size_t insertion_index = 0;
};

enum class Termination { GoalMet, BudgetExhausted };

std::string_view to_string(Termination t);

/// Samples ordered by theta in [0, 2pi). interval_loss[i] belongs to the
/// interval from sample i to sample i+1 (cyclically).
struct SampleSet {
  std::vector<Sample> samples;
  std::vector<double> interval_loss;
  Termination termination = Termination::GoalMet;
  double max_loss = 0.0;

  std::size_t size() const { return samples.size(); }
  std::vector<State> endpoints() const;
};

/// Per-axis extents of the endpoints' bounding box; zero extents become 1.
struct OutputScale {
  double x1 = 1.0;
  double x2 = 1.0;
};

OutputScale bounding_scale(const std::vector<Sample>& samples);

/// Loss of the interval (left, right). `prev` precedes left and `next`
/// follows right on the cycle; only the curvature loss reads them.
double interval_loss(LossKind kind, const Sample& left, const Sample& right, const Sample& prev,
                     const Sample& next, OutputScale scale);

std::vector<double> interval_losses(LossKind kind, const std::vector<Sample>& samples);

/// Thrown when the sampled function fails; carries the offending angle.
class SampleEvaluationError : public Error {
 public:
  SampleEvaluationError(const std::string& what, double theta) : Error(what), theta_(theta) {}
  double theta() const noexcept { return theta_; }

 private:
  double theta_;
};

using BoundaryFunction = std::function<State(double theta)>;

/// Greedy bisection of the worst interval until every interval loss is below
/// the goal or n_max samples exist. Evaluations of a round run on `jobs`
/// workers (0 = hardware concurrency).
SampleSet run_sampler(const BoundaryFunction& f, const SamplerConfig& cfg, unsigned jobs = 1);

/// Columns theta, delta, ddelta, insertion_index, interval_loss.
void write_samples_csv(std::ostream& out, const SampleSet& set, const std::vector<std::string>& header_comments = {});

}  // namespace revroa
