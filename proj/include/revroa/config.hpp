#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "revroa/assessor.hpp"
#include "revroa/lyapunov.hpp"
#include "revroa/model.hpp"
#include "revroa/ode.hpp"
#include "revroa/sampler.hpp"

namespace revroa {

struct GridSettings {
  double delta_half_width = 3.0 * std::numbers::pi;  ///< around the post-fault equilibrium [rad]
  double ddelta_min = -20.0 * std::numbers::pi;
  double ddelta_max = 20.0 * std::numbers::pi;
  std::size_t n_delta = 80;
  std::size_t n_ddelta = 40;
};

struct TlroaSettings {
  double t_back = 1.0;
  SamplerConfig sampler;
  double seed_semi_axis = 0.05;
  int seed_checks = 64;
};

struct AssessSettings {
  double t_clear = 0.15;
  SweepRange sweep{0.1, 1.0, 0.01};
  int k_max = 2;
};

/// Everything a CLI run needs. Parsed from a sectioned `key = value` file in
/// which every dimensional key carries its unit in the name.
struct RunConfig {
  Scenario scenario = Scenario::reference();
  IntegratorConfig integrator;
  GridSettings grid;
  TlroaSettings tlroa;
  AssessSettings assess;

  void validate() const;
  SeedOptions seed_options() const;
};

/// Parses config text. Unknown sections or keys, duplicates, malformed
/// numbers and conflicting unit variants raise ConfigError carrying the line.
RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Canonical text form; parse_config(serialize_config(c)) reproduces c exactly.
std::string serialize_config(const RunConfig& cfg);

/// FNV-1a 64 over the canonical text, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);
std::uint64_t fnv1a64(std::string_view bytes);

/// Every accepted key as "section.key", for help output.
std::vector<std::string> config_keys();

}  // namespace revroa
