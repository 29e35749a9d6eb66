#include "revroa/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "revroa/errors.hpp"

namespace revroa {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Entry {
  std::string value;
  int line = 0;  // 0 for command-line overrides
};

using Setter = std::function<void(RunConfig&, const std::string&)>;

struct KeyDef {
  std::string section;
  std::string key;
  std::string quantity;  // keys sharing a quantity are unit variants of each other
  Setter set;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_number(const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) throw ConfigError("expected a number, got '" + text + "'");
  if (!std::isfinite(v)) throw ConfigError("value must be finite, got '" + text + "'");
  return v;
}

long long parse_integer(const std::string& text) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError("expected an integer, got '" + text + "'");
  }
  return v;
}

std::size_t parse_count(const std::string& text) {
  const long long v = parse_integer(text);
  if (v < 0) throw ConfigError("expected a non-negative integer, got '" + text + "'");
  return static_cast<std::size_t>(v);
}

bool parse_switch(const std::string& text) {
  if (text == "on" || text == "true" || text == "yes") return true;
  if (text == "off" || text == "false" || text == "no") return false;
  throw ConfigError("expected on|off, got '" + text + "'");
}

template <class F>
Setter num(F f) {
  return [f](RunConfig& c, const std::string& v) { f(c, parse_number(v)); };
}

const std::vector<KeyDef>& key_table() {
  static const std::vector<KeyDef> table = [] {
    std::vector<KeyDef> t;
    auto add = [&t](std::string section, std::string key, std::string quantity, Setter s) {
      t.push_back({std::move(section), std::move(key), std::move(quantity), std::move(s)});
    };
    auto sys = [](RunConfig& c) -> SystemParams& { return c.scenario.params; };

    add("system", "k_p", "k_p", num([=](RunConfig& c, double v) { sys(c).k_p = v; }));
    add("system", "k_i", "k_i", num([=](RunConfig& c, double v) { sys(c).k_i = v; }));
    add("system", "S_base_VA", "s_base", num([=](RunConfig& c, double v) { sys(c).s_base = v; }));
    add("system", "V_ll_rms_V", "v_ll", num([=](RunConfig& c, double v) { sys(c).v_ll_rms = v; }));
    add("system", "omega_g_rad_per_s", "omega_g", num([=](RunConfig& c, double v) { sys(c).omega_g = v; }));
    add("system", "f_g_Hz", "omega_g", num([=](RunConfig& c, double v) { sys(c).omega_g = kTwoPi * v; }));
    add("system", "omega0_rad_per_s", "omega0", num([=](RunConfig& c, double v) { sys(c).omega0 = v; }));
    add("system", "f0_Hz", "omega0", num([=](RunConfig& c, double v) { sys(c).omega0 = kTwoPi * v; }));
    add("system", "SCR", "scr", num([=](RunConfig& c, double v) { sys(c).scr = v; }));
    add("system", "XR", "xr", num([=](RunConfig& c, double v) { sys(c).xr = v; }));
    add("system", "V_g_prefault_pu", "v_pre", num([=](RunConfig& c, double v) { sys(c).v_g_prefault = v; }));
    add("system", "V_g_fault_pu", "v_fault", num([=](RunConfig& c, double v) { sys(c).v_g_fault = v; }));
    add("system", "V_g_postfault_pu", "v_post", num([=](RunConfig& c, double v) { sys(c).v_g_postfault = v; }));
    add("system", "sat_mode", "sat_mode",
        [=](RunConfig& c, const std::string& v) { sys(c).sat_mode = parse_sat_mode(v); });
    add("system", "sat_limit_rad_per_s", "sat_limit", num([=](RunConfig& c, double v) { sys(c).sat_limit = v; }));
    add("system", "sat_limit_Hz", "sat_limit", num([=](RunConfig& c, double v) { sys(c).sat_limit = kTwoPi * v; }));

    add("scenario", "i_d_prefault_pu", "i_d_pre", num([](RunConfig& c, double v) { c.scenario.i_d_prefault = v; }));
    add("scenario", "i_q_prefault_pu", "i_q_pre", num([](RunConfig& c, double v) { c.scenario.i_q_prefault = v; }));
    add("scenario", "i_d_fault_pu", "i_d_fault", num([](RunConfig& c, double v) { c.scenario.i_d_fault = v; }));
    add("scenario", "i_q_fault_pu", "i_q_fault", num([](RunConfig& c, double v) { c.scenario.i_q_fault = v; }));
    add("scenario", "i_d_target_pu", "i_d_target", num([](RunConfig& c, double v) { c.scenario.i_d_target = v; }));
    add("scenario", "i_max_pu", "i_max", num([](RunConfig& c, double v) { c.scenario.i_max = v; }));
    add("scenario", "ramp", "ramp",
        [](RunConfig& c, const std::string& v) { c.scenario.ramp_enabled = parse_switch(v); });
    add("scenario", "ramp_rate_pu_per_s", "ramp_rate", num([](RunConfig& c, double v) { c.scenario.ramp_rate = v; }));
    // Applied after the system section, so the current base is final.
    add("scenario", "ramp_rate_kA_per_s", "ramp_rate", num([](RunConfig& c, double v) {
          c.scenario.ramp_rate = ramp_kA_per_s_to_pu(v, c.scenario.params);
        }));
    add("scenario", "t_fault_start_s", "t_fs", num([](RunConfig& c, double v) { c.scenario.t_fault_start = v; }));
    add("scenario", "t_fault_clear_s", "t_fc", num([](RunConfig& c, double v) { c.scenario.t_fault_clear = v; }));

    add("integrator", "rel_tol", "rel_tol", num([](RunConfig& c, double v) { c.integrator.rel_tol = v; }));
    add("integrator", "abs_tol", "abs_tol", num([](RunConfig& c, double v) { c.integrator.abs_tol = v; }));
    add("integrator", "max_step_s", "max_step", num([](RunConfig& c, double v) { c.integrator.max_step = v; }));
    add("integrator", "min_step_s", "min_step", num([](RunConfig& c, double v) { c.integrator.min_step = v; }));
    add("integrator", "divergence_radius_rad", "div",
        num([](RunConfig& c, double v) { c.integrator.divergence_radius = v; }));
    add("integrator", "max_time_s", "max_time", num([](RunConfig& c, double v) { c.integrator.max_time = v; }));

    add("grid", "delta_half_width_rad", "half_width",
        num([](RunConfig& c, double v) { c.grid.delta_half_width = v; }));
    add("grid", "ddelta_min_rad_per_s", "w_min", num([](RunConfig& c, double v) { c.grid.ddelta_min = v; }));
    add("grid", "ddelta_max_rad_per_s", "w_max", num([](RunConfig& c, double v) { c.grid.ddelta_max = v; }));
    add("grid", "n_delta", "n_delta", [](RunConfig& c, const std::string& v) { c.grid.n_delta = parse_count(v); });
    add("grid", "n_ddelta", "n_ddelta", [](RunConfig& c, const std::string& v) { c.grid.n_ddelta = parse_count(v); });

    add("tlroa", "t_back_s", "t_back", num([](RunConfig& c, double v) { c.tlroa.t_back = v; }));
    add("tlroa", "loss_kind", "loss_kind",
        [](RunConfig& c, const std::string& v) { c.tlroa.sampler.loss_kind = parse_loss_kind(v); });
    add("tlroa", "loss_goal", "loss_goal", num([](RunConfig& c, double v) { c.tlroa.sampler.loss_goal = v; }));
    add("tlroa", "n_min", "n_min", [](RunConfig& c, const std::string& v) { c.tlroa.sampler.n_min = parse_count(v); });
    add("tlroa", "n_max", "n_max", [](RunConfig& c, const std::string& v) { c.tlroa.sampler.n_max = parse_count(v); });
    add("tlroa", "batch", "batch", [](RunConfig& c, const std::string& v) { c.tlroa.sampler.batch = parse_count(v); });
    add("tlroa", "seed_semi_axis", "semi_axis", num([](RunConfig& c, double v) { c.tlroa.seed_semi_axis = v; }));
    add("tlroa", "seed_checks", "seed_checks",
        [](RunConfig& c, const std::string& v) { c.tlroa.seed_checks = static_cast<int>(parse_count(v)); });

    add("assess", "t_clear_s", "t_clear", num([](RunConfig& c, double v) { c.assess.t_clear = v; }));
    add("assess", "sweep_start_s", "sweep_start", num([](RunConfig& c, double v) { c.assess.sweep.t_begin = v; }));
    add("assess", "sweep_stop_s", "sweep_stop", num([](RunConfig& c, double v) { c.assess.sweep.t_end = v; }));
    add("assess", "sweep_step_s", "sweep_step", num([](RunConfig& c, double v) { c.assess.sweep.dt = v; }));
    add("assess", "k_max", "k_max",
        [](RunConfig& c, const std::string& v) { c.assess.k_max = static_cast<int>(parse_count(v)); });
    return t;
  }();
  return table;
}

std::optional<std::size_t> find_key(std::string_view section, std::string_view key) {
  const auto& t = key_table();
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i].section == section && t[i].key == key) return i;
  }
  return std::nullopt;
}

std::size_t resolve_override_key(const std::string& name) {
  const auto dot = name.find('.');
  if (dot != std::string::npos) {
    if (auto i = find_key(name.substr(0, dot), name.substr(dot + 1))) return *i;
    throw ConfigError("unknown key '" + name + "' in --set");
  }
  std::optional<std::size_t> hit;
  const auto& t = key_table();
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i].key != name) continue;
    if (hit) throw ConfigError("key '" + name + "' is ambiguous in --set; qualify it as section.key");
    hit = i;
  }
  if (!hit) throw ConfigError("unknown key '" + name + "' in --set");
  return *hit;
}

// Removes any unit variant of table[idx] before inserting it.
void place(std::map<std::size_t, Entry>& entries, std::size_t idx, Entry e) {
  const auto& t = key_table();
  for (auto it = entries.begin(); it != entries.end();) {
    if (t[it->first].section == t[idx].section && t[it->first].quantity == t[idx].quantity) {
      it = entries.erase(it);
    } else {
      ++it;
    }
  }
  entries[idx] = std::move(e);
}

}  // namespace

void RunConfig::validate() const {
  scenario.validate();
  integrator.validate();
  tlroa.sampler.validate();
  if (!(grid.delta_half_width > 0.0)) throw ConfigError("grid.delta_half_width_rad must be > 0");
  if (!(grid.ddelta_max > grid.ddelta_min)) throw ConfigError("grid.ddelta_max_rad_per_s must exceed ddelta_min");
  if (grid.n_delta == 0 || grid.n_ddelta == 0) throw ConfigError("grid resolution must be positive");
  if (tlroa.t_back < 0.0) throw ConfigError("tlroa.t_back_s must be >= 0");
  if (!(tlroa.seed_semi_axis > 0.0)) throw ConfigError("tlroa.seed_semi_axis must be > 0");
  if (tlroa.seed_checks < 1) throw ConfigError("tlroa.seed_checks must be >= 1");
  assess.sweep.validate();
  if (assess.t_clear < scenario.t_fault_start) throw ConfigError("assess.t_clear_s must not precede the fault start");
  if (assess.sweep.t_begin < scenario.t_fault_start) {
    throw ConfigError("assess.sweep_start_s must not precede the fault start");
  }
}

SeedOptions RunConfig::seed_options() const {
  SeedOptions o;
  o.semi_axis = tlroa.seed_semi_axis;
  o.n_check = tlroa.seed_checks;
  o.integrator = integrator;
  return o;
}

RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides) {
  std::map<std::size_t, Entry> entries;
  const auto& table = key_table();
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find_first_of("#;");
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", line_no);
      section = trim(line.substr(1, line.size() - 2));
      const bool known = std::any_of(table.begin(), table.end(), [&](const KeyDef& k) { return k.section == section; });
      if (!known) throw ConfigError("unknown section [" + section + "]", line_no);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError("key '" + key + "' appears before any [section]", line_no);
    const auto idx = find_key(section, key);
    if (!idx) throw ConfigError("unknown key '" + key + "' in [" + section + "]", line_no);
    if (value.empty()) throw ConfigError("key '" + key + "' has no value", line_no);
    for (const auto& [other, e] : entries) {
      if (table[other].section != section || table[other].quantity != table[*idx].quantity) continue;
      if (other == *idx) {
        throw ConfigError("duplicate key '" + key + "' (first set on line " + std::to_string(e.line) + ")", line_no);
      }
      throw ConfigError("'" + key + "' conflicts with '" + table[other].key + "' on line " + std::to_string(e.line) +
                            "; give exactly one unit variant",
                        line_no);
    }
    entries[*idx] = {value, line_no};
  }

  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + ov + "'");
    const std::string value = trim(ov.substr(eq + 1));
    if (value.empty()) throw ConfigError("--set '" + ov + "' has no value");
    place(entries, resolve_override_key(trim(ov.substr(0, eq))), {value, 0});
  }

  RunConfig cfg;
  cfg.scenario.params.update_impedance();
  // Table order, not file order: system keys land before the kA/s ramp conversion.
  bool impedance_done = false;
  for (const auto& [idx, e] : entries) {
    const KeyDef& def = table[idx];
    if (def.section != "system" && !impedance_done) {
      cfg.scenario.params.update_impedance();
      impedance_done = true;
    }
    try {
      def.set(cfg, e.value);
    } catch (const ConfigError& err) {
      const std::string where = e.line > 0 ? std::string() : "--set " + def.key + ": ";
      throw ConfigError(where + def.section + "." + def.key + ": " + err.what(), e.line);
    }
  }
  cfg.scenario.params.update_impedance();
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  auto kv = [&out](const char* key, const std::string& value) { out << key << " = " << value << '\n'; };
  auto num = [&kv](const char* key, double v) { kv(key, format_double(v)); };
  auto cnt = [&kv](const char* key, std::size_t v) { kv(key, std::to_string(v)); };
  const auto& p = c.scenario.params;
  out << "[system]\n";
  num("k_p", p.k_p);
  num("k_i", p.k_i);
  num("S_base_VA", p.s_base);
  num("V_ll_rms_V", p.v_ll_rms);
  num("omega_g_rad_per_s", p.omega_g);
  num("omega0_rad_per_s", p.omega0);
  num("SCR", p.scr);
  num("XR", p.xr);
  num("V_g_prefault_pu", p.v_g_prefault);
  num("V_g_fault_pu", p.v_g_fault);
  num("V_g_postfault_pu", p.v_g_postfault);
  kv("sat_mode", std::string(to_string(p.sat_mode)));
  num("sat_limit_rad_per_s", p.sat_limit);
  const auto& s = c.scenario;
  out << "\n[scenario]\n";
  num("i_d_prefault_pu", s.i_d_prefault);
  num("i_q_prefault_pu", s.i_q_prefault);
  num("i_d_fault_pu", s.i_d_fault);
  num("i_q_fault_pu", s.i_q_fault);
  num("i_d_target_pu", s.i_d_target);
  num("i_max_pu", s.i_max);
  kv("ramp", s.ramp_enabled ? "on" : "off");
  num("ramp_rate_pu_per_s", s.ramp_rate);
  num("t_fault_start_s", s.t_fault_start);
  num("t_fault_clear_s", s.t_fault_clear);
  const auto& ic = c.integrator;
  out << "\n[integrator]\n";
  num("rel_tol", ic.rel_tol);
  num("abs_tol", ic.abs_tol);
  num("max_step_s", ic.max_step);
  num("min_step_s", ic.min_step);
  num("divergence_radius_rad", ic.divergence_radius);
  num("max_time_s", ic.max_time);
  out << "\n[grid]\n";
  num("delta_half_width_rad", c.grid.delta_half_width);
  num("ddelta_min_rad_per_s", c.grid.ddelta_min);
  num("ddelta_max_rad_per_s", c.grid.ddelta_max);
  cnt("n_delta", c.grid.n_delta);
  cnt("n_ddelta", c.grid.n_ddelta);
  out << "\n[tlroa]\n";
  num("t_back_s", c.tlroa.t_back);
  kv("loss_kind", std::string(to_string(c.tlroa.sampler.loss_kind)));
  num("loss_goal", c.tlroa.sampler.loss_goal);
  cnt("n_min", c.tlroa.sampler.n_min);
  cnt("n_max", c.tlroa.sampler.n_max);
  cnt("batch", c.tlroa.sampler.batch);
  num("seed_semi_axis", c.tlroa.seed_semi_axis);
  cnt("seed_checks", static_cast<std::size_t>(c.tlroa.seed_checks));
  out << "\n[assess]\n";
  num("t_clear_s", c.assess.t_clear);
  num("sweep_start_s", c.assess.sweep.t_begin);
  num("sweep_stop_s", c.assess.sweep.t_end);
  num("sweep_step_s", c.assess.sweep.dt);
  cnt("k_max", static_cast<std::size_t>(c.assess.k_max));
  return out.str();
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const RunConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(serialize_config(cfg))));
  return buf;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& k : key_table()) out.push_back(k.section + "." + k.key);
  return out;
}

}  // namespace revroa
