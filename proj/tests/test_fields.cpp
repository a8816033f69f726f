#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "tripleion/fields.hpp"

using namespace tripleion;

namespace {
FieldParams pulse() { return {0.207, 0.057, duration_from_cycles(0.057, 20.0), 0.3}; }
}  // namespace

TEST(Fields, DurationFromCycles) {
  EXPECT_NEAR(duration_from_cycles(0.057, 20.0), 20.0 * 2.0 * std::numbers::pi / 0.057, 1e-9);
}

TEST(Fields, ProfileIsSineSquared) {
  const auto p = pulse();
  EXPECT_DOUBLE_EQ(pulse_profile(p, 0.0), 0.0);
  EXPECT_NEAR(pulse_profile(p, 0.5 * p.duration), 1.0, 1e-15);
  EXPECT_NEAR(pulse_profile(p, 0.25 * p.duration), 0.5, 1e-15);
  EXPECT_NEAR(pulse_profile(p, p.duration), 0.0, 1e-15);
}

TEST(Fields, EnvelopeRateMatchesFiniteDifference) {
  const auto p = pulse();
  for (double frac : {0.05, 0.2, 0.37, 0.5, 0.81}) {
    const double t = frac * p.duration, h = 1e-4;
    const double fd = (envelope(p, t + h) - envelope(p, t - h)) / (2.0 * h);
    EXPECT_NEAR(envelope_rate(p, t), fd, 1e-9) << frac;
  }
}

TEST(Fields, PulsedFieldEvaluateAgreesWithParts) {
  const PulsedField f(pulse());
  for (double frac : {0.1, 0.33, 0.5, 0.9}) {
    const double t = frac * f.params().duration;
    const auto [v, r] = f.evaluate(t);
    EXPECT_NEAR(v, f(t), 1e-15);
    EXPECT_NEAR(r, f.rate(t), 1e-15);
    EXPECT_NEAR(v, 0.207 * envelope(f.params(), t), 1e-15);
  }
}

TEST(Fields, PulsedFieldVanishesOutsidePulse) {
  const PulsedField f(pulse());
  EXPECT_EQ(f(-1.0), 0.0);
  EXPECT_EQ(f(f.params().duration + 1.0), 0.0);
  const auto [v, r] = f.evaluate(f.params().duration * 1.5);
  EXPECT_EQ(v, 0.0);
  EXPECT_EQ(r, 0.0);
  EXPECT_EQ(f.switch_off(), f.params().duration);
}

TEST(Fields, TimeOutsidePulseIsDomainError) {
  const auto p = pulse();
  EXPECT_THROW(pulse_profile(p, -0.1), DomainError);
  EXPECT_THROW(envelope(p, p.duration + 0.1), DomainError);
}

TEST(Fields, InvalidParametersRejected) {
  EXPECT_THROW(PulsedField({0.2, 0.0, 1.0, 0.0}), DomainError);
  EXPECT_THROW(PulsedField({0.2, 1.0, -1.0, 0.0}), DomainError);
  EXPECT_THROW(PulsedField({-0.2, 1.0, 1.0, 0.0}), DomainError);
  EXPECT_THROW(ScaleFactors::for_amplitude(0.0), DomainError);
}

TEST(Fields, ScaleFactorsAreMutuallyConsistent) {
  const double F = 0.207;
  const auto k = ScaleFactors::for_amplitude(F);
  // r p and E t are invariant combinations of the scaling: r' p' = F^{1/4} r p.
  EXPECT_NEAR(k.length * k.momentum, std::pow(F, 0.25), 1e-14);
  EXPECT_NEAR(k.energy * k.time, std::pow(F, 0.25), 1e-14);
  EXPECT_NEAR(k.frequency * k.time, 1.0, 1e-14);
  // Field term E ~ r F maps to E' ~ r' * 1.
  EXPECT_NEAR(k.energy, k.length / F, 1e-14);
}

TEST(Fields, ScaledPeriodNearPublishedValue) {
  // 2 pi / (omega F^{-3/4}) for the experimental parameters.
  const double scaled_period = 2.0 * std::numbers::pi / scaled_frequency(0.057, 0.207);
  EXPECT_NEAR(scaled_period, 2.0 * std::numbers::pi * std::pow(0.207, 0.75) / 0.057, 1e-12);
  EXPECT_NEAR(scaled_period, 33.6, 0.5);
}

TEST(Fields, StaticField) {
  const StaticField f(0.7);
  EXPECT_EQ(f(123.0), 0.7);
  EXPECT_EQ(f.rate(1.0), 0.0);
  EXPECT_TRUE(std::isinf(f.switch_off()));
}
