// Command-line front end: saddles, stability, ensembles, histograms.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "tripleion/tripleion.hpp"

namespace ti = tripleion;
using ti::json;

namespace {

struct Common {
  std::string config_file;
  std::vector<std::string> assignments;
  unsigned threads = ti::default_thread_count();
  bool quiet = false;
};

// defaults < config file < TRIPLEION_* environment < --set
ti::RunConfig resolve(const Common& common) {
  ti::RunConfig c;
  if (!common.config_file.empty()) ti::load_config_file(c, common.config_file);
  ti::apply_environment(c);
  for (const auto& a : common.assignments) ti::apply_assignment(c, a);
  return c;
}

void emit(const json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw ti::ConfigError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

ti::ProgressCallback progress_printer(bool quiet) {
  if (quiet) return {};
  return [](std::size_t done, std::size_t total) {
    std::fprintf(stderr, "\r%zu / %zu trajectories", done, total);
    if (done == total) std::fputc('\n', stderr);
  };
}

ti::Subspace parse_subspace(const std::string& s) {
  if (s == "c3v") return ti::Subspace::c3v;
  if (s == "c2v") return ti::Subspace::c2v;
  throw ti::ConfigError("subspace must be c3v or c2v");
}

ti::RingRepulsion parse_ring_model(const std::string& s) {
  if (s == "nearest") return ti::RingRepulsion::nearest_neighbour_pairs;
  if (s == "pairwise") return ti::RingRepulsion::exact_pairwise;
  throw ti::ConfigError("ring model must be nearest or pairwise");
}

void write_histogram(const ti::MomentumHistogram& h, const ti::RunConfig& config, const std::string& path) {
  if (path.empty() || path == "-") {
    ti::write_histogram_csv(std::cout, h, config);
    return;
  }
  std::ofstream out(path);
  if (!out) throw ti::ConfigError("cannot write '" + path + "'");
  ti::write_histogram_csv(out, h, config);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Triple ionization in symmetric subspaces: saddles, stability and ion momentum ensembles"};
  app.require_subcommand(1);
  Common common;

  const auto add_run_options = [&common](CLI::App* sub) {
    sub->add_option("--config", common.config_file, "key = value configuration file")->check(CLI::ExistingFile);
    sub->add_option("--set", common.assignments, "override a configuration key (key=value), repeatable");
    sub->add_option("--threads", common.threads, "worker threads (results do not depend on it)")
        ->check(CLI::Range(1u, 4096u));
    sub->add_flag("--quiet", common.quiet, "no progress output");
  };

  std::string subspace = "c3v", scope = "subspace", ring_model = "nearest", in_path, out_path;
  double field = 1.0;
  int electrons = 3, n_max = 20;
  double bin_width = 0.0, threshold = 0.05;

  auto* saddle = app.add_subcommand("saddle", "saddle point of a symmetric subspace (JSON)");
  saddle->add_option("--subspace", subspace, "c3v, c2v or ring")->check(CLI::IsMember({"c3v", "c2v", "ring"}));
  saddle->add_option("--field", field, "field strength f (scaled units; 1 = unit field)");
  saddle->add_option("--n", electrons, "electrons on the ring (ring only)");
  saddle->add_option("--ring-model", ring_model, "ring repulsion: nearest or pairwise")
      ->check(CLI::IsMember({"nearest", "pairwise"}));

  auto* scan = app.add_subcommand("ring-scan", "ring saddles for N = 2..n-max (CSV)");
  scan->add_option("--n-max", n_max, "largest N")->check(CLI::Range(2, 1000));
  scan->add_option("--field", field, "field strength f");
  scan->add_option("--ring-model", ring_model, "ring repulsion: nearest or pairwise")
      ->check(CLI::IsMember({"nearest", "pairwise"}));

  auto* stability = app.add_subcommand("stability", "normal modes at a saddle (JSON)");
  stability->add_option("--subspace", subspace, "c3v or c2v")->check(CLI::IsMember({"c3v", "c2v"}));
  stability->add_option("--scope", scope, "subspace or full")->check(CLI::IsMember({"subspace", "full"}));
  stability->add_option("--field", field, "field strength f");

  auto* wannier = app.add_subcommand("wannier", "threshold exponents alpha3 and alpha2 (JSON)");

  auto* simulate = app.add_subcommand("simulate", "run an ensemble (JSON outcome list)");
  add_run_options(simulate);
  simulate->add_option("--out", out_path, "results file (overrides the out key; '-' for stdout)");

  auto* hist = app.add_subcommand("histogram", "ion momentum histogram from a results file (CSV)");
  hist->add_option("--in", in_path, "results JSON from simulate")->required()->check(CLI::ExistingFile);
  hist->add_option("--out", out_path, "CSV path ('-' or empty for stdout)");
  hist->add_option("--bin-width", bin_width, "bin width in a.u. (default: the run's bin_width)");

  auto* shape = app.add_subcommand("shape", "shape metrics of a histogram CSV (JSON)");
  shape->add_option("--in", in_path, "histogram CSV")->required()->check(CLI::ExistingFile);
  shape->add_option("--out", out_path, "JSON path (default stdout)");

  auto* t0check = app.add_subcommand("t0-check", "KS comparison of ensembles started at t0 and T_d - t0 (JSON)");
  add_run_options(t0check);
  t0check->add_option("--threshold", threshold, "KS distance below which the check passes");
  t0check->add_option("--out", out_path, "JSON path (default stdout)");

  auto* selftest = app.add_subcommand("selftest", "fast invariant checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (saddle->parsed()) {
      ti::SaddleInfo s;
      if (subspace == "c3v") {
        s = ti::saddle_c3v(field);
      } else if (subspace == "c2v") {
        s = ti::saddle_c2v(field);
      } else {
        auto r = ti::saddle_ring(electrons, field, parse_ring_model(ring_model));
        if (!r) throw ti::DomainError("no ring saddle for N=" + std::to_string(electrons));
        s = *r;
      }
      json j = ti::to_json(s);
      j["format_version"] = ti::kFormatVersion;
      j["config"] = {{"subspace", subspace}, {"field", field}};
      if (subspace == "ring") j["config"]["ring_model"] = ring_model;
      emit(j, "");
    } else if (scan->parsed()) {
      std::cout << "N,exists,R_s,Z_s,V_s\n";
      for (const auto& row : ti::ring_scan(n_max, field, parse_ring_model(ring_model))) {
        if (row.saddle)
          std::cout << row.electrons << ",1," << ti::detail::format_double(row.saddle->coordinates[0]) << ","
                    << ti::detail::format_double(row.saddle->coordinates[1]) << ","
                    << ti::detail::format_double(row.saddle->energy) << "\n";
        else
          std::cout << row.electrons << ",0,,,\n";
      }
    } else if (stability->parsed()) {
      const auto report =
          ti::analyze(parse_subspace(subspace), scope == "full" ? ti::Scope::full : ti::Scope::subspace, field);
      json j = ti::to_json(report);
      j["format_version"] = ti::kFormatVersion;
      j["config"] = {{"subspace", subspace}, {"scope", scope}, {"field", field}};
      emit(j, "");
    } else if (wannier->parsed()) {
      const auto c3 = ti::analyze(ti::Subspace::c3v, ti::Scope::full);
      const auto c2 = ti::analyze(ti::Subspace::c2v, ti::Scope::full);
      emit({{"format_version", ti::kFormatVersion},
            {"alpha3", *c3.wannier_alpha},
            {"alpha2", *c2.wannier_alpha}},
           "");
    } else if (simulate->parsed()) {
      ti::RunConfig config = resolve(common);
      if (!out_path.empty()) config.out = out_path;
      const auto ensemble = config.ensemble();
      const auto outcomes = ti::run_ensemble(ensemble, config.controls, common.threads, progress_printer(common.quiet));
      emit(ti::results_json(config, outcomes), config.out);
      if (!config.hist_out.empty())
        write_histogram(ti::histogram(outcomes, ensemble, config.bin_width), config, config.hist_out);
      const auto t = ti::tally(outcomes);
      if (!common.quiet)
        std::fprintf(stderr, "triple %zu double %zu single %zu bound %zu rejected %zu (%.2f%%)\n", t.triple,
                     t.double_ionization, t.single_ionization, t.bound, t.rejected, 100.0 * t.rejected_fraction());
    } else if (hist->parsed()) {
      const auto loaded = ti::results_from_json(ti::read_json_file(in_path));
      const double width = bin_width > 0.0 ? bin_width : loaded.config.bin_width;
      const auto h = ti::histogram(loaded.outcomes, loaded.config.ensemble(), width);
      if (h.warning) std::fprintf(stderr, "warning: no triple ionization events\n");
      ti::RunConfig config = loaded.config;
      config.bin_width = width;
      write_histogram(h, config, out_path);
    } else if (shape->parsed()) {
      std::ifstream in(in_path);
      const auto loaded = ti::read_histogram_csv(in, in_path);
      json j = ti::to_json(ti::shape_metrics(loaded.histogram));
      j["n_triple"] = loaded.histogram.n_triple;
      j["p_max_estimate"] = loaded.histogram.p_max_estimate;
      j["config"] = ti::to_json(loaded.config);
      emit(j, out_path);
    } else if (t0check->parsed()) {
      const ti::RunConfig config = resolve(common);
      const auto ensemble = config.ensemble();
      if (ensemble.t0_fraction == 0.5) throw ti::DomainError("t0-check needs t0_frac != 0.5");
      auto mirrored = ensemble;
      mirrored.t0_fraction = 1.0 - ensemble.t0_fraction;
      const auto a = ti::run_ensemble(ensemble, config.controls, common.threads, progress_printer(common.quiet));
      const auto b = ti::run_ensemble(mirrored, config.controls, common.threads, progress_printer(common.quiet));
      auto check = ti::t0_symmetry_check(a, b, threshold);
      check.t0_fraction = ensemble.t0_fraction;
      check.mirrored_fraction = mirrored.t0_fraction;
      json j = ti::to_json(check);
      j["format_version"] = ti::kFormatVersion;
      j["tally"] = ti::to_json(ti::tally(a));
      j["tally_mirrored"] = ti::to_json(ti::tally(b));
      j["config"] = ti::to_json(config);
      emit(j, out_path);
      return check.pass ? 0 : 1;
    } else if (selftest->parsed()) {
      bool ok = true;
      for (const auto& c : ti::run_selftest()) {
        std::printf("%s  %-40s %.3g (limit %.3g)\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value, c.limit);
        ok = ok && c.pass;
      }
      return ok ? 0 : 1;
    }
  } catch (const ti::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
