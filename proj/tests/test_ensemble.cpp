#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "tripleion/ensemble.hpp"

using namespace tripleion;

namespace {
EnsembleConfig config(double t0 = 0.25) {
  EnsembleConfig c;
  c.subspace = Subspace::c3v;
  c.energy = -0.5;
  c.t0_fraction = t0;
  c.field = {0.207, 0.057, duration_from_cycles(0.057, 20.0), 0.0};
  c.n_traj = 30;
  c.seed = 9;
  return c;
}

TrajectoryOutcome triple(double p) {
  TrajectoryOutcome o;
  o.outcome = Outcome::triple;
  o.p_ion_parallel = p;
  return o;
}

TrajectoryOutcome other(Outcome k) {
  TrajectoryOutcome o;
  o.outcome = k;
  return o;
}

// Deterministic samples from a mixture of normals.
std::vector<TrajectoryOutcome> mixture(std::vector<double> centers, double sigma, std::size_t n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  std::vector<TrajectoryOutcome> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(triple(centers[i % centers.size()] + normal(gen)));
  return out;
}
}  // namespace

TEST(Ensemble, TallyCounts) {
  std::vector<TrajectoryOutcome> v{triple(1), triple(2), other(Outcome::bound), other(Outcome::rejected),
                                   other(Outcome::double_ionization), other(Outcome::single_ionization)};
  const auto t = tally(v);
  EXPECT_EQ(t.triple, 2u);
  EXPECT_EQ(t.bound, 1u);
  EXPECT_EQ(t.rejected, 1u);
  EXPECT_EQ(t.total(), 6u);
  EXPECT_DOUBLE_EQ(t.rejected_fraction(), 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(t.triple_fraction(), 2.0 / 5.0);
}

TEST(Ensemble, PmaxEstimateFormula) {
  const auto c = config(0.25);
  EXPECT_NEAR(p_max_estimate(c), 3.0 * 0.207 * 0.5 / 0.057, 1e-12);
}

TEST(Ensemble, HistogramBinsCentredOnZero) {
  const auto c = config();
  std::vector<TrajectoryOutcome> v{triple(0.0), triple(0.19), triple(0.21), triple(-0.21), triple(-3.0),
                                   other(Outcome::rejected), other(Outcome::bound)};
  const auto h = histogram(v, c, 0.4);
  EXPECT_EQ(h.n_total, 7u);
  EXPECT_EQ(h.n_triple, 5u);
  EXPECT_EQ(h.n_rejected, 1u);
  EXPECT_NEAR(h.bin_width(), 0.4, 1e-12);
  const std::size_t zero = h.counts.size() / 2;
  EXPECT_NEAR(h.center(zero), 0.0, 1e-12);
  EXPECT_EQ(h.counts[zero], 2u);
  EXPECT_EQ(h.counts[zero + 1], 1u);
  EXPECT_EQ(h.counts[zero - 1], 1u);
  EXPECT_GE(h.bin_edges.back(), 1.2 * h.p_max_estimate);
  const auto d = h.density();
  EXPECT_NEAR(std::accumulate(d.begin(), d.end(), 0.0) * h.bin_width(), 1.0, 1e-12);
  EXPECT_FALSE(h.warning);
}

TEST(Ensemble, HistogramRangeGrowsToCoverOutliers) {
  const auto h = histogram({triple(40.0)}, config(), 0.4);
  EXPECT_GT(h.bin_edges.back(), 40.0);
  EXPECT_EQ(std::accumulate(h.counts.begin(), h.counts.end(), std::size_t{0}), 1u);
}

TEST(Ensemble, HistogramWithoutTriplesWarns) {
  const auto h = histogram({other(Outcome::bound)}, config());
  EXPECT_TRUE(h.warning);
  EXPECT_EQ(h.n_triple, 0u);
  EXPECT_THROW(histogram({}, config()), DomainError);
  EXPECT_THROW(histogram({triple(1)}, config(), 0.0), DomainError);
}

TEST(Ensemble, ShapeOfDoubleHump) {
  const auto h = histogram(mixture({-4.0, 4.0}, 1.0, 40000, 1), config());
  const auto m = shape_metrics(h);
  EXPECT_EQ(m.n_maxima, 2u);
  ASSERT_EQ(m.maxima.size(), 2u);
  EXPECT_NEAR(m.maxima[0], -4.0, 0.5);
  EXPECT_NEAR(m.maxima[1], 4.0, 0.5);
  EXPECT_GT(m.central_minimum_depth, 0.5);
  // 99% of N(+-4, 1) lies within |p| < 4 + 2.576.
  EXPECT_NEAR(m.half_width, 4.0 + 2.576, 0.4);
  EXPECT_LT(m.center_to_edge, 0.2);
}

TEST(Ensemble, ShapeOfSinglePeak) {
  const auto h = histogram(mixture({0.0}, 2.0, 40000, 2), config());
  const auto m = shape_metrics(h);
  EXPECT_EQ(m.n_maxima, 1u);
  EXPECT_NEAR(m.maxima[0], 0.0, 0.5);
  EXPECT_NEAR(m.hwhm, 2.0 * std::sqrt(2.0 * std::log(2.0)), 0.2);
  EXPECT_NEAR(m.half_width, 2.576 * 2.0, 0.4);
  EXPECT_GT(m.center_to_edge, 1.0);
}

TEST(Ensemble, ShapeNeedsEnoughEvents) {
  const auto h = histogram(mixture({0.0}, 1.0, 100, 3), config());
  EXPECT_THROW(shape_metrics(h), DomainError);
  ShapeOptions relaxed;
  relaxed.min_triple = 50;
  EXPECT_NO_THROW(shape_metrics(h, relaxed));
}

TEST(Ensemble, NoiseDoesNotCreateMaxima) {
  // A flat distribution must not report spurious maxima.
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<TrajectoryOutcome> v;
  for (int i = 0; i < 20000; ++i) v.push_back(triple(u(gen)));
  EXPECT_LE(shape_metrics(histogram(v, config())).n_maxima, 1u);
}

TEST(Ensemble, CorrectedSignificanceMatchesGaussianQuantile) {
  // Oracle: inverse normal CDF at Phi(-3) / tests, Python statistics.NormalDist.
  EXPECT_NEAR(detail::corrected_sigmas(3.0, 1), 3.0, 1e-12);
  EXPECT_NEAR(detail::corrected_sigmas(3.0, 31), 3.924001491226699, 1e-9);
  EXPECT_NEAR(detail::corrected_sigmas(3.0, 61), 4.084042388799657, 1e-9);
  EXPECT_NEAR(detail::corrected_sigmas(3.0, 100), 4.197414437605203, 1e-9);
}

TEST(Ensemble, PlateauNoiseRateIsFamilyWise) {
  // Flat plateau (~900 counts per bin) under two humps at +-9, the shape of a
  // large ensemble started before the pulse peak. The humps are the only
  // maxima; at a 3 sigma family-wise level a third one should show up in
  // about 0.1% of histograms. A per-bin 3 sigma test finds one in ~2%.
  EnsembleConfig c = config(0.4);
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> plateau(-10.0, 10.0);
  std::normal_distribution<double> hump(0.0, 0.8);
  std::bernoulli_distribution side(0.5);
  int spurious = 0;
  const int trials = 300;
  for (int t = 0; t < trials; ++t) {
    std::vector<TrajectoryOutcome> v;
    for (int i = 0; i < 55000; ++i) v.push_back(triple(plateau(gen)));
    for (int i = 0; i < 24000; ++i) v.push_back(triple((side(gen) ? 9.0 : -9.0) + hump(gen)));
    const auto m = shape_metrics(histogram(v, c));
    ASSERT_GE(m.n_maxima, 2u) << t;
    if (m.n_maxima > 2) ++spurious;
  }
  EXPECT_LE(spurious, 2);
}

TEST(Ensemble, KsDistance) {
  EXPECT_DOUBLE_EQ(ks_distance({1, 2, 3}, {1, 2, 3}), 0.0);
  EXPECT_DOUBLE_EQ(ks_distance({1, 2}, {3, 4}), 1.0);
  // Hand computed: F_a jumps at 1,2,3,4; F_b at 2.5 (0.5), 5 (1.0).
  EXPECT_DOUBLE_EQ(ks_distance({1, 2, 3, 4}, {2.5, 5}), 0.5);
  EXPECT_THROW(ks_distance({}, {1.0}), DomainError);
}

TEST(Ensemble, SymmetryCheckOnSamples) {
  const auto a = mixture({-3, 3}, 1.0, 4000, 5), b = mixture({-3, 3}, 1.0, 4000, 6);
  const auto r = t0_symmetry_check(a, b, 0.05);
  EXPECT_TRUE(r.pass);
  const auto c = mixture({-1, 5}, 1.0, 4000, 7);
  EXPECT_FALSE(t0_symmetry_check(a, c, 0.05).pass);
  EXPECT_THROW(t0_symmetry_check(config(0.5)), DomainError);
}

TEST(Ensemble, ResultsIndependentOfThreadCount) {
  const auto c = config();
  const auto one = run_ensemble(c, {}, 1);
  const auto three = run_ensemble(c, {}, 3);
  ASSERT_EQ(one.size(), c.n_traj);
  ASSERT_EQ(three.size(), c.n_traj);
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(one[i].outcome, three[i].outcome);
    EXPECT_EQ(one[i].steps, three[i].steps);
    if (one[i].outcome == Outcome::triple) EXPECT_EQ(one[i].p_ion_parallel, three[i].p_ion_parallel);
  }
}

TEST(Ensemble, C2vResultsIndependentOfThreadCount) {
  auto c = config(0.5);
  c.subspace = Subspace::c2v;
  c.n_traj = 6;
  const auto one = run_ensemble(c, {}, 1);
  const auto two = run_ensemble(c, {}, 2);
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(one[i].outcome, two[i].outcome);
    EXPECT_EQ(one[i].final_state, two[i].final_state);
  }
}

TEST(Ensemble, ProgressReported) {
  auto c = config();
  c.n_traj = 5;
  std::size_t last = 0, calls = 0;
  run_ensemble(c, {}, 1, [&](std::size_t done, std::size_t total) {
    EXPECT_EQ(total, 5u);
    EXPECT_GT(done, last);
    last = done;
    ++calls;
  });
  EXPECT_EQ(last, 5u);
  EXPECT_GT(calls, 0u);
}
