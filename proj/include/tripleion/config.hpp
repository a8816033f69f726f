#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tripleion/errors.hpp"
#include "tripleion/ensemble.hpp"
#include "tripleion/integrator.hpp"
#include "tripleion/sampling.hpp"

namespace tripleion {

/// Flat run configuration. Physical quantities in atomic units.
struct RunConfig {
  Subspace subspace = Subspace::c3v;
  double energy = -0.5;          // E
  double t0_frac = 0.25;         // t0 / T_d
  double amplitude = 0.207;      // F
  double omega = 0.057;          // omega_au
  double pulse_cycles = 20.0;    // T_d = pulse_cycles * 2 pi / omega
  std::size_t n_traj = 80000;
  std::uint64_t seed = 1;
  SamplingMeasure measure = SamplingMeasure::product;
  PropagationControls controls;
  double bin_width = 0.4;
  std::string out;       ///< simulate: outcome list (JSON)
  std::string hist_out;  ///< simulate/histogram: histogram (CSV)

  EnsembleConfig ensemble() const {
    EnsembleConfig c;
    c.subspace = subspace;
    c.energy = energy;
    c.t0_fraction = t0_frac;
    c.field = {amplitude, omega, duration_from_cycles(omega, pulse_cycles), 0.0};
    c.n_traj = n_traj;
    c.seed = seed;
    c.measure = measure;
    return c;
  }
};

namespace detail {
inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

inline double parse_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x))
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  return x;
}

template <class Int>
Int parse_integer(const std::string& key, const std::string& v) {
  Int x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("key '" + key + "': expected a non-negative integer, got '" + v + "'");
  return x;
}

inline std::string format_double(double x) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

struct KeySpec {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

inline const std::map<std::string, KeySpec>& key_table() {
  static const std::map<std::string, KeySpec> table = [] {
    std::map<std::string, KeySpec> t;
    auto real = [&t](const std::string& key, double RunConfig::*field) {
      t[key] = {[key, field](RunConfig& c, const std::string& v) { c.*field = parse_double(key, v); },
                [field](const RunConfig& c) { return format_double(c.*field); }};
    };
    auto control = [&t](const std::string& key, auto getter) {
      t[key] = {[key, getter](RunConfig& c, const std::string& v) { getter(c) = parse_double(key, v); },
                [getter](const RunConfig& c) { return format_double(getter(const_cast<RunConfig&>(c))); }};
    };
    auto text = [&t](const std::string& key, std::string RunConfig::*field) {
      t[key] = {[field](RunConfig& c, const std::string& v) { c.*field = v; },
                [field](const RunConfig& c) { return c.*field; }};
    };
    t["subspace"] = {[](RunConfig& c, const std::string& v) {
                       if (v == "c3v") c.subspace = Subspace::c3v;
                       else if (v == "c2v") c.subspace = Subspace::c2v;
                       else throw ConfigError("key 'subspace': expected c3v or c2v, got '" + v + "'");
                     },
                     [](const RunConfig& c) { return to_string(c.subspace); }};
    t["measure"] = {[](RunConfig& c, const std::string& v) {
                      if (v == "product") c.measure = SamplingMeasure::product;
                      else if (v == "shell") c.measure = SamplingMeasure::shell;
                      else throw ConfigError("key 'measure': expected product or shell, got '" + v + "'");
                    },
                    [](const RunConfig& c) { return to_string(c.measure); }};
    real("E", &RunConfig::energy);
    real("t0_frac", &RunConfig::t0_frac);
    real("F", &RunConfig::amplitude);
    real("omega_au", &RunConfig::omega);
    real("pulse_cycles", &RunConfig::pulse_cycles);
    real("bin_width", &RunConfig::bin_width);
    t["n_traj"] = {[](RunConfig& c, const std::string& v) { c.n_traj = parse_integer<std::size_t>("n_traj", v); },
                   [](const RunConfig& c) { return std::to_string(c.n_traj); }};
    t["seed"] = {[](RunConfig& c, const std::string& v) { c.seed = parse_integer<std::uint64_t>("seed", v); },
                 [](const RunConfig& c) { return std::to_string(c.seed); }};
    control("rel_tol", [](RunConfig& c) -> double& { return c.controls.step.rel_tol; });
    control("abs_tol", [](RunConfig& c) -> double& { return c.controls.step.abs_tol; });
    control("min_step", [](RunConfig& c) -> double& { return c.controls.step.min_step; });
    control("r_escape_factor", [](RunConfig& c) -> double& { return c.controls.r_escape_factor; });
    control("t_max_factor", [](RunConfig& c) -> double& { return c.controls.t_max_factor; });
    control("capture_energy", [](RunConfig& c) -> double& { return c.controls.capture_energy; });
    text("out", &RunConfig::out);
    text("hist_out", &RunConfig::hist_out);
    return t;
  }();
  return table;
}
}  // namespace detail

inline std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : detail::key_table()) keys.push_back(k);
  return keys;
}

/// Sets one key; unknown keys and malformed values throw ConfigError.
inline void set_config_value(RunConfig& c, const std::string& key, const std::string& value) {
  const auto& table = detail::key_table();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown key '" + key + "'");
  it->second.set(c, value);
}

/// Resolved configuration as ordered key -> value strings.
inline std::map<std::string, std::string> config_values(const RunConfig& c) {
  std::map<std::string, std::string> out;
  for (const auto& [k, spec] : detail::key_table()) out[k] = spec.get(c);
  return out;
}

/// Applies a `key=value` assignment (command line `--set`).
inline void apply_assignment(RunConfig& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + assignment + "'");
  set_config_value(c, detail::trim(std::string_view(assignment).substr(0, eq)),
                   detail::trim(std::string_view(assignment).substr(eq + 1)));
}

/// Parses `key = value` lines; '#' starts a comment. Errors carry
/// "<source>:<line>:".
inline void parse_config(RunConfig& c, std::istream& in, const std::string& source = "<config>") {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    const std::string body = detail::trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    try {
      const auto eq = body.find('=');
      if (eq == std::string::npos) throw ConfigError("expected key = value");
      const std::string key = detail::trim(std::string_view(body).substr(0, eq));
      if (key.empty()) throw ConfigError("missing key before '='");
      set_config_value(c, key, detail::trim(std::string_view(body).substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(number) + ": " + e.what());
    }
  }
}

inline RunConfig parse_config_string(const std::string& text, const std::string& source = "<string>") {
  RunConfig c;
  std::istringstream in(text);
  parse_config(c, in, source);
  return c;
}

inline void load_config_file(RunConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  parse_config(c, in, path);
}

/// Environment variable overriding `key`, e.g. TRIPLEION_T0_FRAC for t0_frac.
inline std::string env_name(const std::string& key) {
  std::string name = "TRIPLEION_";
  for (const char ch : key) name += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return name;
}

/// Applies every TRIPLEION_<KEY> variable found by `lookup` (getenv by default).
inline void apply_environment(RunConfig& c,
                              const std::function<const char*(const char*)>& lookup = [](const char* n) {
                                return std::getenv(n);
                              }) {
  for (const auto& key : config_keys()) {
    const std::string name = env_name(key);
    if (const char* v = lookup(name.c_str())) {
      try {
        set_config_value(c, key, detail::trim(v));
      } catch (const ConfigError& e) {
        throw ConfigError(name + ": " + e.what());
      }
    }
  }
}

}  // namespace tripleion
