#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "tripleion/sampling.hpp"

using namespace tripleion;

namespace {
EnsembleConfig make(Subspace s, double energy = -0.5, double t0 = 0.25,
                    SamplingMeasure m = SamplingMeasure::product) {
  EnsembleConfig c;
  c.subspace = s;
  c.energy = energy;
  c.t0_fraction = t0;
  c.field = {0.207, 0.057, duration_from_cycles(0.057, 20.0), 0.0};
  c.n_traj = 4000;
  c.seed = 11;
  c.measure = m;
  return c;
}

// Pearson chi-square of `values` in [lo, hi) against a uniform law.
double chi_square_uniform(const std::vector<double>& values, double lo, double hi, int bins) {
  std::vector<double> counts(bins, 0.0);
  for (double v : values) {
    int k = static_cast<int>((v - lo) / (hi - lo) * bins);
    counts[std::clamp(k, 0, bins - 1)] += 1.0;
  }
  const double expected = double(values.size()) / bins;
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  return chi2;
}

// 99.9% quantile of chi-square with 19 degrees of freedom.
constexpr double kChi2Df19 = 43.82;
}  // namespace

TEST(Sampling, C3vEnergyShellIsExact) {
  const auto config = make(Subspace::c3v);
  const C3vSampler sampler(config);
  for (std::size_t i = 0; i < config.n_traj; ++i) {
    const auto ic = sampler(i);
    EXPECT_EQ(ic.state.Z, 0.0);
    EXPECT_GT(ic.state.R, 0.0);
    EXPECT_LE(ic.state.R, sampler.radius_max());
    // Z = 0 makes the field term vanish, so H is field independent.
    const double V = potential_c3v(ic.state.R, 0.0, 0.0);
    EXPECT_NEAR(hamiltonian_c3v(ic.state, 0.3), config.energy, 1e-12 * std::max(1.0, std::abs(V)));
    EXPECT_NEAR(ic.state.t, config.start_time(), 1e-12);
  }
}

TEST(Sampling, C3vAllowedRadius) {
  // V(R, 0) = -(9 - sqrt 3)/R; the saddle radius at peak field caps it.
  const auto low = make(Subspace::c3v, -3.0);
  EXPECT_NEAR(C3vSampler(low).radius_max(), (9.0 - std::sqrt(3.0)) / 3.0, 1e-12);
  const auto high = make(Subspace::c3v, -0.5);
  EXPECT_NEAR(C3vSampler(high).radius_max(), c3v_saddle_radius(0.207), 1e-12);
  EXPECT_LT(c3v_saddle_radius(0.207), (9.0 - std::sqrt(3.0)) / 0.5);
}

TEST(Sampling, C3vMomentumAngleAndPhaseUniform) {
  const auto config = make(Subspace::c3v);
  const C3vSampler sampler(config);
  std::vector<double> angle, phase, radius;
  for (std::size_t i = 0; i < config.n_traj; ++i) {
    const auto ic = sampler(i);
    double a = std::atan2(ic.state.pZ, ic.state.pR);
    if (a < 0) a += 2 * std::numbers::pi;
    angle.push_back(a);
    phase.push_back(ic.phase);
    radius.push_back(ic.state.R);
  }
  EXPECT_LT(chi_square_uniform(angle, 0, 2 * std::numbers::pi, 20), kChi2Df19);
  EXPECT_LT(chi_square_uniform(phase, 0, 2 * std::numbers::pi, 20), kChi2Df19);
  EXPECT_LT(chi_square_uniform(radius, 0, sampler.radius_max(), 20), kChi2Df19);
}

TEST(Sampling, DeterministicPerIndex) {
  const auto config = make(Subspace::c3v);
  const C3vSampler a(config), b(config);
  for (std::size_t i : {0u, 7u, 3999u}) {
    EXPECT_EQ(a(i).state.R, b(i).state.R);
    EXPECT_EQ(a(i).state.pZ, b(i).state.pZ);
    EXPECT_EQ(a(i).phase, b(i).phase);
  }
  auto other = config;
  other.seed = 12;
  EXPECT_NE(C3vSampler(other)(0).state.R, a(0).state.R);
  EXPECT_NE(a(1).state.R, a(0).state.R);
}

TEST(Sampling, C2vEnergyShellAndDistanceCap) {
  for (auto measure : {SamplingMeasure::product, SamplingMeasure::shell}) {
    auto config = make(Subspace::c2v, -0.5, 0.5, measure);
    config.n_traj = 2000;
    const C2vSampler sampler(config);
    EXPECT_NEAR(sampler.distance_cap(), saddle_c2v(0.207).min_distance(), 1e-12);
    std::size_t negative = 0;
    for (std::size_t i = 0; i < config.n_traj; ++i) {
      const auto ic = sampler(i);
      FieldParams fp = config.field;
      fp.phase = ic.phase;
      const double f = fp.amplitude * envelope(fp, config.start_time());
      const auto& s = ic.state;
      const double V = potential_c2v(s.x, s.z, s.z1, f);
      EXPECT_NEAR(hamiltonian_c2v(s, f), config.energy, 1e-12 * std::max(1.0, std::abs(V)));
      EXPECT_LE(std::hypot(s.x, s.z), sampler.distance_cap() * (1 + 1e-12));
      EXPECT_LE(std::abs(s.z1), sampler.distance_cap() * (1 + 1e-12));
      EXPECT_NE(s.x, 0.0);
      if (s.z1 < 0) ++negative;
    }
    // Both mirror halves with equal weight: binomial(2000, 1/2), 5 sigma.
    EXPECT_NEAR(double(negative), 1000.0, 5 * std::sqrt(500.0));
  }
}

TEST(Sampling, C2vMomentumDirectionIsotropicInMassWeightedSpace) {
  auto config = make(Subspace::c2v, -0.5, 0.5);
  config.n_traj = 3000;
  const C2vSampler sampler(config);
  std::vector<double> cosines;
  for (std::size_t i = 0; i < config.n_traj; ++i) {
    const auto s = sampler(i).state;
    const double a = s.px / std::sqrt(2.0), b = s.pz / std::sqrt(2.0), c = s.pz1;
    cosines.push_back(c / std::sqrt(a * a + b * b + c * c));
  }
  // Uniform on the 2-sphere means the polar cosine is uniform on [-1, 1].
  EXPECT_LT(chi_square_uniform(cosines, -1.0, 1.0, 20), kChi2Df19);
}

TEST(Sampling, InvalidConfigurationsRejected) {
  auto c = make(Subspace::c3v);
  c.energy = 0.1;
  EXPECT_THROW(C3vSampler{c}, DomainError);
  c = make(Subspace::c3v);
  c.t0_fraction = 1.0;
  EXPECT_THROW(C3vSampler{c}, DomainError);
  EXPECT_THROW(C2vSampler{make(Subspace::c3v)}, DomainError);
  EXPECT_THROW(C3vSampler{make(Subspace::c2v)}, DomainError);
  c = make(Subspace::c3v);
  c.n_traj = 0;
  EXPECT_THROW(c.validate(), DomainError);
}

TEST(Sampling, BatchHelpersMatchSampler) {
  auto config = make(Subspace::c3v);
  config.n_traj = 5;
  const auto batch = sample_c3v(config);
  ASSERT_EQ(batch.size(), 5u);
  EXPECT_EQ(batch[3].state.R, C3vSampler(config)(3).state.R);
}
