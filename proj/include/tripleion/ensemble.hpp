#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <numbers>
#include <optional>
#include <thread>
#include <vector>

#include "tripleion/errors.hpp"
#include "tripleion/fields.hpp"
#include "tripleion/integrator.hpp"
#include "tripleion/sampling.hpp"

namespace tripleion {

struct OutcomeTally {
  std::size_t triple = 0;
  std::size_t double_ionization = 0;
  std::size_t single_ionization = 0;
  std::size_t bound = 0;
  std::size_t rejected = 0;

  std::size_t total() const { return triple + double_ionization + single_ionization + bound + rejected; }
  double rejected_fraction() const { return total() ? double(rejected) / double(total()) : 0.0; }
  /// Triple fraction among accepted (non-rejected) trajectories.
  double triple_fraction() const {
    const std::size_t accepted = total() - rejected;
    return accepted ? double(triple) / double(accepted) : 0.0;
  }
};

inline OutcomeTally tally(const std::vector<TrajectoryOutcome>& outcomes) {
  OutcomeTally t;
  for (const auto& o : outcomes) {
    switch (o.outcome) {
      case Outcome::triple: ++t.triple; break;
      case Outcome::double_ionization: ++t.double_ionization; break;
      case Outcome::single_ionization: ++t.single_ionization; break;
      case Outcome::bound: ++t.bound; break;
      case Outcome::rejected: ++t.rejected; break;
    }
  }
  return t;
}

/// Called with (completed, total) roughly every percent of an ensemble.
using ProgressCallback = std::function<void(std::size_t, std::size_t)>;

inline unsigned default_thread_count() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Propagates trajectory `index` of the ensemble described by `config`.
template <class Sampler>
TrajectoryOutcome run_trajectory(const Sampler& sampler, const EnsembleConfig& config,
                                 const PropagationControls& controls, std::size_t index) {
  const auto ic = sampler(index);
  FieldParams params = config.field;
  params.phase = ic.phase;
  return propagate(ic.state, params, controls);
}

namespace detail {
template <class Sampler>
std::vector<TrajectoryOutcome> run_parallel(const Sampler& sampler, const EnsembleConfig& config,
                                            const PropagationControls& controls, unsigned threads,
                                            const ProgressCallback& progress) {
  const std::size_t n = config.n_traj;
  std::vector<TrajectoryOutcome> out(n);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex mutex;
  const std::size_t report_every = std::max<std::size_t>(1, n / 100);

  auto worker = [&] {
    try {
      for (std::size_t i = next++; i < n && !failed; i = next++) {
        out[i] = run_trajectory(sampler, config, controls, i);
        const std::size_t d = ++done;
        if (progress && (d % report_every == 0 || d == n)) {
          std::lock_guard lock(mutex);
          progress(d, n);
        }
      }
    } catch (...) {
      std::lock_guard lock(mutex);
      if (!error) error = std::current_exception();
      failed = true;
    }
  };

  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::min<std::size_t>(n, 1u << 16))));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return out;
}
}  // namespace detail

/// Runs `config.n_traj` trajectories. The result is ordered by trajectory
/// index and does not depend on `threads`.
inline std::vector<TrajectoryOutcome> run_ensemble(const EnsembleConfig& config,
                                                   const PropagationControls& controls = {},
                                                   unsigned threads = default_thread_count(),
                                                   const ProgressCallback& progress = {}) {
  config.validate();
  if (config.subspace == Subspace::c3v)
    return detail::run_parallel(C3vSampler(config), config, controls, threads, progress);
  return detail::run_parallel(C2vSampler(config), config, controls, threads, progress);
}

/// Width estimate 3 F f_p(t0) / omega for three electrons driven by the field.
inline double p_max_estimate(const EnsembleConfig& config) {
  return 3.0 * config.field.amplitude * pulse_profile(config.field, config.start_time()) / config.field.omega;
}

struct MomentumHistogram {
  std::vector<double> bin_edges;
  std::vector<std::size_t> counts;
  std::size_t n_total = 0;
  std::size_t n_triple = 0;
  std::size_t n_rejected = 0;
  double p_max_estimate = 0.0;
  EnsembleConfig config;
  bool warning = false;  ///< set when no trajectory ionized triply

  double bin_width() const { return bin_edges.size() > 1 ? bin_edges[1] - bin_edges[0] : 0.0; }
  double center(std::size_t i) const { return 0.5 * (bin_edges[i] + bin_edges[i + 1]); }
  /// Normalized density; integrates to 1 when n_triple > 0.
  std::vector<double> density() const {
    std::vector<double> d(counts.size(), 0.0);
    if (n_triple == 0) return d;
    const double norm = 1.0 / (double(n_triple) * bin_width());
    for (std::size_t i = 0; i < counts.size(); ++i) d[i] = double(counts[i]) * norm;
    return d;
  }
};

/// Bins the triple-ionization ion momenta. Bins are centred on zero and cover
/// at least +-1.2 p_max_estimate; the range grows to include every sample.
inline MomentumHistogram histogram(const std::vector<TrajectoryOutcome>& outcomes, const EnsembleConfig& config,
                                   double bin_width = 0.4) {
  if (outcomes.empty()) throw DomainError("histogram of an empty outcome list");
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) throw DomainError("bin width must be > 0");
  MomentumHistogram h;
  h.config = config;
  h.p_max_estimate = p_max_estimate(config);
  h.n_total = outcomes.size();
  double reach = 1.2 * h.p_max_estimate;
  for (const auto& o : outcomes) {
    if (o.outcome == Outcome::rejected) ++h.n_rejected;
    if (o.outcome != Outcome::triple) continue;
    ++h.n_triple;
    reach = std::max(reach, std::abs(o.p_ion_parallel));
  }
  const auto half_bins = static_cast<long>(std::ceil(reach / bin_width - 0.5));
  const std::size_t n_bins = static_cast<std::size_t>(2 * half_bins + 1);
  h.bin_edges.resize(n_bins + 1);
  for (std::size_t i = 0; i <= n_bins; ++i) h.bin_edges[i] = (double(i) - double(half_bins) - 0.5) * bin_width;
  h.counts.assign(n_bins, 0);
  for (const auto& o : outcomes) {
    if (o.outcome != Outcome::triple) continue;
    const auto k = static_cast<long>(std::floor(o.p_ion_parallel / bin_width + 0.5)) + half_bins;
    h.counts[static_cast<std::size_t>(std::clamp<long>(k, 0, long(n_bins) - 1))] += 1;
  }
  h.warning = h.n_triple == 0;
  return h;
}

struct ShapeOptions {
  /// Minimum triple count for meaningful shape statistics.
  std::size_t min_triple = 1000;
  /// Family-wise significance (in Gaussian standard deviations) of a counted
  /// maximum. Each candidate is tested at the per-bin level that keeps the
  /// whole histogram at this level, since height and base are both extremes
  /// picked from many noisy bins.
  double significance = 3.0;
  /// Fraction of triple counts inside the reported half width.
  double support_fraction = 0.99;
  /// Edge region |p| >= edge_fraction * p_max_estimate for edge maxima.
  double edge_fraction = 0.5;
};

struct ShapeMetrics {
  std::size_t n_maxima = 0;
  std::vector<double> maxima;  ///< momenta of the counted maxima
  double central_minimum_depth = 0.0;
  /// Smallest symmetric bound |p| <= half_width (at bin edges) holding
  /// support_fraction of the triple events; the distribution's width.
  double half_width = 0.0;
  double hwhm = 0.0;        ///< outermost half-maximum crossings of the smoothed density
  double extent = 0.0;      ///< largest |bin edge| of a non-empty bin
  double center_to_edge = 0.0;  ///< smoothed density at p = 0 over the largest edge-region value
};

/// 3-bin moving average; the histogram always ends in empty bins so the
/// borders are padded with zeros.
inline std::vector<double> smooth3(const std::vector<std::size_t>& counts) {
  const std::size_t n = counts.size();
  std::vector<double> s(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = double(counts[i]);
    if (i > 0) sum += double(counts[i - 1]);
    if (i + 1 < n) sum += double(counts[i + 1]);
    s[i] = sum / 3.0;
  }
  return s;
}

namespace detail {
/// One-sided Gaussian quantile matching `sigmas` family-wise over `tests`
/// comparisons (Bonferroni).
inline double corrected_sigmas(double sigmas, std::size_t tests) {
  if (tests <= 1) return sigmas;
  const double p = 0.5 * std::erfc(sigmas / std::sqrt(2.0)) / double(tests);
  double lo = sigmas, hi = 40.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (0.5 * std::erfc(mid / std::sqrt(2.0)) > p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Indices of local maxima of `s` (plateaus reported at their centre) with
/// their topographic prominence.
inline std::vector<std::pair<std::size_t, double>> prominent_peaks(const std::vector<double>& s,
                                                                   double significance) {
  const std::size_t n = s.size();
  const double z = corrected_sigmas(significance, n);
  std::vector<std::pair<std::size_t, double>> peaks;
  std::size_t i = 1;
  while (i + 1 < n) {
    if (s[i] > s[i - 1]) {
      std::size_t j = i;
      while (j + 1 < n && s[j + 1] == s[i]) ++j;
      if (j + 1 < n && s[j + 1] < s[i]) {
        const std::size_t peak = (i + j) / 2;
        const double height = s[peak];
        double left = height;
        for (std::size_t k = i; k-- > 0;) {
          if (s[k] > height) break;
          left = std::min(left, s[k]);
        }
        double right = height;
        for (std::size_t k = j + 1; k < n; ++k) {
          if (s[k] > height) break;
          right = std::min(right, s[k]);
        }
        const double base = std::max(left, right);
        const double prominence = height - base;
        // Variance of a 3-bin average of Poisson counts is mean / 3.
        const double sigma = std::sqrt((height + base) / 3.0);
        if (prominence > z * sigma) peaks.emplace_back(peak, prominence);
      }
      i = j + 1;
    } else {
      ++i;
    }
  }
  return peaks;
}
}  // namespace detail

inline ShapeMetrics shape_metrics(const MomentumHistogram& h, const ShapeOptions& options = {}) {
  if (h.n_triple < options.min_triple)
    throw DomainError("shape metrics need at least " + std::to_string(options.min_triple) +
                      " triple-ionization events, got " + std::to_string(h.n_triple));
  const std::vector<double> s = smooth3(h.counts);
  const std::size_t n = s.size();
  const std::size_t zero = n / 2;
  ShapeMetrics m;

  for (const auto& [idx, prom] : detail::prominent_peaks(s, options.significance)) m.maxima.push_back(h.center(idx));
  m.n_maxima = m.maxima.size();

  const double top = *std::max_element(s.begin(), s.end());
  m.central_minimum_depth = 1.0 - s[zero] / top;

  // Outermost half-maximum crossings, linearly interpolated.
  std::size_t lo = 0, hi = n - 1;
  while (s[lo] < 0.5 * top) ++lo;
  while (s[hi] < 0.5 * top) --hi;
  const auto crossing = [&](std::size_t inside, std::size_t outside) {
    const double f = (s[inside] - 0.5 * top) / (s[inside] - s[outside]);
    return h.center(inside) + f * (h.center(outside) - h.center(inside));
  };
  const double left = lo > 0 ? crossing(lo, lo - 1) : h.center(lo);
  const double right = hi + 1 < n ? crossing(hi, hi + 1) : h.center(hi);
  m.hwhm = 0.5 * (right - left);

  const double w = h.bin_width();
  std::size_t inside = h.counts[zero];
  std::size_t k = 0;
  const double target = options.support_fraction * double(h.n_triple);
  while (double(inside) < target && k < zero) {
    ++k;
    inside += h.counts[zero - k] + h.counts[zero + k];
  }
  m.half_width = (double(k) + 0.5) * w;
  for (std::size_t i = 0; i < n; ++i)
    if (h.counts[i] > 0) m.extent = std::max({m.extent, std::abs(h.bin_edges[i]), std::abs(h.bin_edges[i + 1])});

  double edge = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(h.center(i)) >= options.edge_fraction * h.p_max_estimate) edge = std::max(edge, s[i]);
  m.center_to_edge = edge > 0.0 ? s[zero] / edge : std::numeric_limits<double>::infinity();
  return m;
}

/// Two-sample Kolmogorov-Smirnov distance sup |F_a - F_b|.
inline double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("KS distance of an empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = double(a.size()), nb = double(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(double(i) / na - double(j) / nb));
  }
  return d;
}

inline std::vector<double> triple_momenta(const std::vector<TrajectoryOutcome>& outcomes) {
  std::vector<double> p;
  for (const auto& o : outcomes)
    if (o.outcome == Outcome::triple) p.push_back(o.p_ion_parallel);
  return p;
}

struct SymmetryCheck {
  double t0_fraction = 0.0;
  double mirrored_fraction = 0.0;
  std::size_t n_triple = 0;
  std::size_t n_triple_mirrored = 0;
  double ks_distance = 0.0;
  double threshold = 0.05;
  bool pass = false;
};

/// Compares ion-momentum samples of ensembles started at t0 and T_d - t0.
inline SymmetryCheck t0_symmetry_check(const std::vector<TrajectoryOutcome>& at_t0,
                                       const std::vector<TrajectoryOutcome>& mirrored, double threshold = 0.05,
                                       std::size_t min_triple = 1000) {
  SymmetryCheck r;
  r.threshold = threshold;
  const auto a = triple_momenta(at_t0);
  const auto b = triple_momenta(mirrored);
  r.n_triple = a.size();
  r.n_triple_mirrored = b.size();
  if (a.size() < min_triple || b.size() < min_triple)
    throw DomainError("t0 symmetry check needs at least " + std::to_string(min_triple) +
                      " triple-ionization events per ensemble");
  r.ks_distance = ks_distance(a, b);
  r.pass = r.ks_distance < threshold;
  return r;
}

inline SymmetryCheck t0_symmetry_check(const EnsembleConfig& config, const PropagationControls& controls = {},
                                       unsigned threads = default_thread_count(), double threshold = 0.05) {
  if (config.t0_fraction == 0.5) throw DomainError("t0 symmetry check needs t0_frac != 0.5");
  EnsembleConfig mirrored = config;
  mirrored.t0_fraction = 1.0 - config.t0_fraction;
  SymmetryCheck r = t0_symmetry_check(run_ensemble(config, controls, threads),
                                      run_ensemble(mirrored, controls, threads), threshold);
  r.t0_fraction = config.t0_fraction;
  r.mirrored_fraction = mirrored.t0_fraction;
  return r;
}

}  // namespace tripleion
