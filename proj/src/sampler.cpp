#include "revroa/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>

#include "revroa/ode.hpp"
#include "revroa/parallel.hpp"

namespace revroa {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kEuclidWeight = 0.02;
constexpr double kHorizontalWeight = 0.02;
}

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::Homogeneous: return "homogeneous";
    case LossKind::Euclidean: return "euclidean";
    case LossKind::Curvature: return "curvature";
  }
  return "";
}

LossKind parse_loss_kind(std::string_view text) {
  if (text == "homogeneous") return LossKind::Homogeneous;
  if (text == "euclidean") return LossKind::Euclidean;
  if (text == "curvature") return LossKind::Curvature;
  throw ConfigError("unknown loss_kind '" + std::string(text) + "' (expected homogeneous|euclidean|curvature)");
}

std::string_view to_string(Termination t) { return t == Termination::GoalMet ? "GoalMet" : "BudgetExhausted"; }

void SamplerConfig::validate() const {
  if (!(loss_goal > 0.0)) throw ConfigError("loss_goal must be > 0");
  if (n_min < 4) throw ConfigError("n_min must be >= 4");
  if (n_max < n_min) throw ConfigError("n_max must be >= n_min");
  if (batch < 1) throw ConfigError("batch must be >= 1");
}

std::vector<State> SampleSet::endpoints() const {
  std::vector<State> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.endpoint);
  return out;
}

OutputScale bounding_scale(const std::vector<Sample>& samples) {
  if (samples.empty()) return {};
  double lo1 = samples.front().endpoint.x1, hi1 = lo1;
  double lo2 = samples.front().endpoint.x2, hi2 = lo2;
  for (const auto& s : samples) {
    lo1 = std::min(lo1, s.endpoint.x1);
    hi1 = std::max(hi1, s.endpoint.x1);
    lo2 = std::min(lo2, s.endpoint.x2);
    hi2 = std::max(hi2, s.endpoint.x2);
  }
  return {hi1 > lo1 ? hi1 - lo1 : 1.0, hi2 > lo2 ? hi2 - lo2 : 1.0};
}

double interval_loss(LossKind kind, const Sample& left, const Sample& right, const Sample& prev,
                     const Sample& next, OutputScale scale) {
  auto scaled = [scale](State s) { return State{s.x1 / scale.x1, s.x2 / scale.x2}; };
  switch (kind) {
    case LossKind::Homogeneous: {
      double width = right.theta - left.theta;
      if (width <= 0.0) width += kTwoPi;
      return width / kTwoPi;
    }
    case LossKind::Euclidean:
      return norm(scaled(right.endpoint) - scaled(left.endpoint));
    case LossKind::Curvature: {
      // Triangles live in (theta / 2pi, delta, ddelta); theta is unwrapped
      // across the seam so neighbours stay ordered.
      struct P3 {
        double u, a, b;
      };
      auto lift = [&](const Sample& s, double u) {
        const State y = scaled(s.endpoint);
        return P3{u, y.x1, y.x2};
      };
      const double u_l = left.theta / kTwoPi;
      double u_r = right.theta / kTwoPi;
      if (u_r <= u_l) u_r += 1.0;
      double u_p = prev.theta / kTwoPi;
      if (u_p >= u_l) u_p -= 1.0;
      double u_n = next.theta / kTwoPi;
      while (u_n <= u_r) u_n += 1.0;
      auto area = [](P3 p, P3 q, P3 r) {
        const double x1 = q.u - p.u, y1 = q.a - p.a, z1 = q.b - p.b;
        const double x2 = r.u - p.u, y2 = r.a - p.a, z2 = r.b - p.b;
        const double cx = y1 * z2 - z1 * y2, cy = z1 * x2 - x1 * z2, cz = x1 * y2 - y1 * x2;
        return 0.5 * std::sqrt(cx * cx + cy * cy + cz * cz);
      };
      const P3 l = lift(left, u_l), r = lift(right, u_r);
      const double tri = 0.5 * (area(lift(prev, u_p), l, r) + area(l, r, lift(next, u_n)));
      const double du = u_r - u_l;
      const double chord = std::max(std::hypot(du, r.a - l.a), std::hypot(du, r.b - l.b));
      return std::sqrt(tri) + kEuclidWeight * chord + kHorizontalWeight * du;
    }
  }
  return 0.0;
}

std::vector<double> interval_losses(LossKind kind, const std::vector<Sample>& samples) {
  const std::size_t n = samples.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  const OutputScale scale = bounding_scale(samples);
  for (std::size_t i = 0; i < n; ++i) {
    const Sample& left = samples[i];
    const Sample& right = samples[(i + 1) % n];
    const Sample& prev = samples[(i + n - 1) % n];
    const Sample& next = samples[(i + 2) % n];
    out[i] = interval_loss(kind, left, right, prev, next, scale);
  }
  return out;
}

namespace {

double interval_end(const std::vector<Sample>& s, std::size_t i) {
  return i + 1 < s.size() ? s[i + 1].theta : s.front().theta + kTwoPi;
}

void evaluate(const BoundaryFunction& f, std::vector<Sample>& batch, unsigned jobs) {
  parallel_for(batch.size(), jobs, [&](std::size_t i) {
    try {
      batch[i].endpoint = f(batch[i].theta);
    } catch (const std::exception& e) {
      throw SampleEvaluationError(std::string(e.what()) + " (theta = " + format_double(batch[i].theta) + ")",
                                  batch[i].theta);
    }
  });
}

}  // namespace

SampleSet run_sampler(const BoundaryFunction& f, const SamplerConfig& cfg, unsigned jobs) {
  cfg.validate();
  SampleSet set;
  std::vector<Sample> initial(cfg.n_min);
  for (std::size_t i = 0; i < cfg.n_min; ++i) {
    initial[i].theta = kTwoPi * static_cast<double>(i) / static_cast<double>(cfg.n_min);
    initial[i].insertion_index = i;
  }
  evaluate(f, initial, jobs);
  set.samples = std::move(initial);

  for (;;) {
    auto losses = interval_losses(cfg.loss_kind, set.samples);
    // Intervals narrower than the angle resolution cannot be split further.
    for (std::size_t i = 0; i < losses.size(); ++i) {
      const double a = set.samples[i].theta;
      const double mid = 0.5 * (a + interval_end(set.samples, i));
      if (!(mid > a && mid < interval_end(set.samples, i))) losses[i] = 0.0;
    }
    set.interval_loss = losses;
    set.max_loss = losses.empty() ? 0.0 : *std::max_element(losses.begin(), losses.end());
    if (set.max_loss < cfg.loss_goal) {
      set.termination = Termination::GoalMet;
      break;
    }
    if (set.samples.size() >= cfg.n_max) {
      set.termination = Termination::BudgetExhausted;
      break;
    }
    std::vector<std::size_t> order(losses.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t take = std::min({cfg.batch, cfg.n_max - set.samples.size(), order.size()});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                      [&](std::size_t a, std::size_t b) { return losses[a] > losses[b] || (losses[a] == losses[b] && a < b); });

    std::vector<Sample> fresh;
    for (std::size_t k = 0; k < take; ++k) {
      const std::size_t i = order[k];
      if (!(losses[i] >= cfg.loss_goal)) break;
      Sample s;
      s.theta = 0.5 * (set.samples[i].theta + interval_end(set.samples, i));
      s.insertion_index = set.samples.size() + fresh.size();
      fresh.push_back(s);
    }
    evaluate(f, fresh, jobs);
    for (auto& s : fresh) {
      const auto pos = std::upper_bound(set.samples.begin(), set.samples.end(), s.theta,
                                        [](double th, const Sample& x) { return th < x.theta; });
      set.samples.insert(pos, s);
    }
  }
  return set;
}

void write_samples_csv(std::ostream& out, const SampleSet& set, const std::vector<std::string>& header_comments) {
  for (const auto& line : header_comments) out << "# " << line << '\n';
  out << "# termination: " << to_string(set.termination) << ", max interval loss " << format_double(set.max_loss)
      << '\n';
  out << "theta_rad,delta_rad,ddelta_rad_per_s,insertion_index,interval_loss\n";
  for (std::size_t i = 0; i < set.samples.size(); ++i) {
    const auto& s = set.samples[i];
    out << format_double(s.theta) << ',' << format_double(s.endpoint.x1) << ',' << format_double(s.endpoint.x2) << ','
        << s.insertion_index << ',' << format_double(i < set.interval_loss.size() ? set.interval_loss[i] : 0.0)
        << '\n';
  }
}

}  // namespace revroa
