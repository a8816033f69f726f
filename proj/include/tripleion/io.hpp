#pragma once

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tripleion/config.hpp"
#include "tripleion/ensemble.hpp"
#include "tripleion/errors.hpp"
#include "tripleion/integrator.hpp"
#include "tripleion/saddles.hpp"
#include "tripleion/stability.hpp"

namespace tripleion {

using json = nlohmann::ordered_json;

/// Version of the JSON and CSV layouts written by this library.
inline constexpr int kFormatVersion = 1;

inline std::vector<std::string> coordinate_names(SaddleKind k) {
  if (k == SaddleKind::c2v) return {"x", "z", "z1"};
  return {"R", "Z"};
}

inline json to_json(const SaddleInfo& s) {
  json coords = json::object();
  const auto names = coordinate_names(s.kind);
  for (std::size_t i = 0; i < s.coordinates.size() && i < names.size(); ++i) coords[names[i]] = s.coordinates[i];
  return {{"type", to_string(s.kind)}, {"N", s.electrons},          {"field", s.field},
          {"coordinates", coords},     {"V_s", s.energy},           {"residual", s.residual},
          {"morse_index", s.morse_index}};
}

inline json to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline json to_json(const StabilityReport& r) {
  json modes = json::array();
  for (const auto& m : r.modes) {
    json vectors = json::array();
    for (const auto& v : m.vectors) vectors.push_back(to_json(v));
    json jm = {{"eigenvalue", m.eigenvalue}, {"multiplicity", m.multiplicity}, {"tag", to_string(m.tag)}};
    if (is_unstable(m.tag)) jm["lyapunov"] = m.exponent;
    else if (m.tag != ModeTag::neutral) jm["frequency"] = m.exponent;
    jm["vectors"] = vectors;
    modes.push_back(jm);
  }
  json lyapunov = json::array();
  for (const auto& m : r.modes)
    if (is_unstable(m.tag))
      for (int k = 0; k < m.multiplicity; ++k) lyapunov.push_back({{"tag", to_string(m.tag)}, {"exponent", m.exponent}});
  json out = {{"subspace", to_string(r.subspace)},
              {"scope", to_string(r.scope)},
              {"saddle", to_json(r.saddle)},
              {"coordinates", r.coordinates},
              {"modes", modes},
              {"lyapunov", lyapunov}};
  out["wannier_alpha"] = r.wannier_alpha ? json(*r.wannier_alpha) : json(nullptr);
  return out;
}

inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json to_json(const TrajectoryOutcome& o, std::size_t index) {
  return {{"index", index},
          {"outcome", to_string(o.outcome)},
          {"p_ion_parallel", finite_or_null(o.p_ion_parallel)},
          {"t_end", o.t_end},
          {"energy_drift", finite_or_null(o.energy_drift)},
          {"min_distance", finite_or_null(o.min_distance)},
          {"steps", o.steps},
          {"collisions", o.collisions},
          {"phase", o.phase},
          {"final_state", o.final_state}};
}

inline TrajectoryOutcome outcome_from_json(const json& j, Subspace subspace) {
  TrajectoryOutcome o;
  o.subspace = subspace;
  o.outcome = outcome_from_string(j.at("outcome").get<std::string>());
  const auto number = [&](const char* key) {
    const auto& v = j.at(key);
    return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
  };
  o.p_ion_parallel = number("p_ion_parallel");
  o.t_end = number("t_end");
  o.energy_drift = number("energy_drift");
  o.min_distance = number("min_distance");
  o.steps = j.at("steps").get<std::size_t>();
  o.collisions = j.value("collisions", std::size_t{0});
  o.phase = number("phase");
  o.final_state = j.at("final_state").get<std::vector<double>>();
  return o;
}

inline json to_json(const RunConfig& c) {
  json out = json::object();
  for (const auto& [k, v] : config_values(c)) out[k] = v;
  return out;
}

/// Rebuilds a configuration from the string map written by to_json(RunConfig).
inline RunConfig config_from_json(const json& j) {
  RunConfig c;
  for (const auto& [k, v] : j.items()) set_config_value(c, k, v.is_string() ? v.get<std::string>() : v.dump());
  return c;
}

inline json to_json(const OutcomeTally& t) {
  return {{"triple", t.triple},
          {"double", t.double_ionization},
          {"single", t.single_ionization},
          {"bound", t.bound},
          {"rejected", t.rejected},
          {"rejected_fraction", t.rejected_fraction()}};
}

/// Full `simulate` result document.
inline json results_json(const RunConfig& config, const std::vector<TrajectoryOutcome>& outcomes) {
  json list = json::array();
  for (std::size_t i = 0; i < outcomes.size(); ++i) list.push_back(to_json(outcomes[i], i));
  return {{"format_version", kFormatVersion},
          {"config", to_json(config)},
          {"tally", to_json(tally(outcomes))},
          {"outcomes", list}};
}

struct LoadedResults {
  RunConfig config;
  std::vector<TrajectoryOutcome> outcomes;
};

inline LoadedResults results_from_json(const json& j) {
  if (j.value("format_version", -1) != kFormatVersion) throw ConfigError("unsupported results format_version");
  LoadedResults r;
  r.config = config_from_json(j.at("config"));
  for (const auto& o : j.at("outcomes")) r.outcomes.push_back(outcome_from_json(o, r.config.subspace));
  return r;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

// Histogram CSV: '#'-prefixed metadata lines (key=value, resolved run
// configuration as config.<key>=value), then the header
// bin_center,count,density and one row per bin.

struct LoadedHistogram {
  RunConfig config;
  MomentumHistogram histogram;
};

inline void write_histogram_csv(std::ostream& out, const MomentumHistogram& h, const RunConfig& config) {
  out << "# format_version=" << kFormatVersion << "\n";
  for (const auto& [k, v] : config_values(config)) out << "# config." << k << "=" << v << "\n";
  out << "# bin_width=" << detail::format_double(h.bin_width()) << "\n";
  out << "# n_total=" << h.n_total << "\n";
  out << "# n_triple=" << h.n_triple << "\n";
  out << "# n_rejected=" << h.n_rejected << "\n";
  out << "# p_max_estimate=" << detail::format_double(h.p_max_estimate) << "\n";
  if (h.warning) out << "# warning=no triple ionization events\n";
  out << "bin_center,count,density\n";
  const auto d = h.density();
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    out << detail::format_double(h.center(i)) << "," << h.counts[i] << "," << detail::format_double(d[i]) << "\n";
}

inline LoadedHistogram read_histogram_csv(std::istream& in, const std::string& source = "<csv>") {
  LoadedHistogram result;
  MomentumHistogram& h = result.histogram;
  std::vector<double> centers;
  std::string line;
  std::size_t number = 0;
  bool header = false;
  double width = 0.0;
  bool have_pmax = false;
  while (std::getline(in, line)) {
    ++number;
    const std::string body = detail::trim(line);
    if (body.empty()) continue;
    const auto fail = [&](const std::string& what) {
      return ConfigError(source + ":" + std::to_string(number) + ": " + what);
    };
    if (body[0] == '#') {
      const auto eq = body.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = detail::trim(std::string_view(body).substr(1, eq - 1));
      const std::string value = detail::trim(std::string_view(body).substr(eq + 1));
      try {
        if (key.rfind("config.", 0) == 0) set_config_value(result.config, key.substr(7), value);
        else if (key == "format_version" && detail::parse_integer<int>(key, value) != kFormatVersion)
          throw ConfigError("unsupported format_version " + value);
        else if (key == "bin_width") width = detail::parse_double(key, value);
        else if (key == "n_total") h.n_total = detail::parse_integer<std::size_t>(key, value);
        else if (key == "n_rejected") h.n_rejected = detail::parse_integer<std::size_t>(key, value);
        else if (key == "p_max_estimate") h.p_max_estimate = detail::parse_double(key, value), have_pmax = true;
        else if (key == "warning") h.warning = true;
      } catch (const ConfigError& e) {
        throw fail(e.what());
      }
      continue;
    }
    if (!header) {
      if (body != "bin_center,count,density") throw fail("expected header bin_center,count,density");
      header = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(body);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(detail::trim(cell));
    if (cells.size() != 3) throw fail("expected 3 columns");
    try {
      centers.push_back(detail::parse_double("bin_center", cells[0]));
      h.counts.push_back(detail::parse_integer<std::size_t>("count", cells[1]));
    } catch (const ConfigError& e) {
      throw fail(e.what());
    }
  }
  if (centers.empty()) throw ConfigError(source + ": no histogram rows");
  if (!(width > 0.0)) width = centers.size() > 1 ? centers[1] - centers[0] : result.config.bin_width;
  for (const double c : centers) h.bin_edges.push_back(c - 0.5 * width);
  h.bin_edges.push_back(centers.back() + 0.5 * width);
  for (const auto c : h.counts) h.n_triple += c;
  if (h.n_total == 0) h.n_total = h.n_triple;
  h.config = result.config.ensemble();
  if (!have_pmax) h.p_max_estimate = p_max_estimate(h.config);
  return result;
}

inline json to_json(const ShapeMetrics& m) {
  return {{"format_version", kFormatVersion},
          {"n_maxima", m.n_maxima},
          {"maxima", m.maxima},
          {"central_minimum_depth", m.central_minimum_depth},
          {"half_width", m.half_width},
          {"hwhm", m.hwhm},
          {"extent", m.extent},
          {"center_to_edge", finite_or_null(m.center_to_edge)}};
}

inline json to_json(const SymmetryCheck& c) {
  return {{"t0_frac", c.t0_fraction},        {"mirrored_t0_frac", c.mirrored_fraction},
          {"n_triple", c.n_triple},          {"n_triple_mirrored", c.n_triple_mirrored},
          {"ks_distance", c.ks_distance},    {"threshold", c.threshold},
          {"pass", c.pass}};
}

}  // namespace tripleion
