#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "tripleion/errors.hpp"
#include "tripleion/fields.hpp"
#include "tripleion/hamiltonians.hpp"
#include "tripleion/rng.hpp"
#include "tripleion/saddles.hpp"
#include "tripleion/stability.hpp"

namespace tripleion {

/// Configuration-space density of the initial ensemble.
enum class SamplingMeasure {
  /// Configurations uniform over the allowed region, momentum direction
  /// uniform on the energy shell.
  product,
  /// Microcanonical shell density, configuration weight (E - V)^{(d_p - 2)/2}
  /// for d_p momentum components. Identical to `product` in C3v (d_p = 2).
  shell,
};

inline std::string to_string(SamplingMeasure m) { return m == SamplingMeasure::product ? "product" : "shell"; }

/// Parameters of one trajectory ensemble. Energies in physical atomic units.
struct EnsembleConfig {
  Subspace subspace = Subspace::c3v;
  double energy = -0.5;       ///< E of the initial compound state
  double t0_fraction = 0.5;   ///< start time as a fraction of the pulse duration
  FieldParams field;          ///< phase is ignored; drawn per trajectory
  std::size_t n_traj = 1;
  std::uint64_t seed = 1;
  SamplingMeasure measure = SamplingMeasure::product;

  void validate() const {
    field.validate();
    if (!(field.amplitude > 0.0)) throw DomainError("ensembles need a positive field amplitude");
    if (!(energy < 0.0)) throw DomainError("compound-state energy must be negative");
    if (!(t0_fraction > 0.0 && t0_fraction < 1.0)) throw DomainError("t0_frac must lie in (0, 1)");
    if (n_traj < 1) throw DomainError("n_traj must be >= 1");
  }

  double start_time() const { return field.time_at(t0_fraction); }
};

template <class State>
struct InitialCondition {
  State state;
  double phase = 0.0;
  std::size_t attempts = 1;  ///< configuration draws consumed (rejection sampling)
};

/// Initial conditions in the C3v subspace on the hypersurface Z = 0.
///
/// At Z = 0 the dipole term vanishes and V(R, 0) = -(9 - sqrt 3)/R, so the
/// allowed interval is (0, (9 - sqrt 3)/|E|]. It is capped at the C3v saddle
/// radius at peak field to keep the complex close to the core.
class C3vSampler {
public:
  explicit C3vSampler(EnsembleConfig config) : config_(std::move(config)) {
    config_.validate();
    if (config_.subspace != Subspace::c3v) throw DomainError("C3vSampler needs a C3v config");
    radius_max_ = std::min(allowed_radius(config_.energy), c3v_saddle_radius(config_.field.amplitude));
    if (!(radius_max_ > 0.0)) throw DomainError("empty C3v energy shell");
  }

  /// Outer turning radius of V(R, 0) = E.
  static double allowed_radius(double energy) { return (9.0 - kSqrt3) / -energy; }

  double radius_max() const { return radius_max_; }
  const EnsembleConfig& config() const { return config_; }

  InitialCondition<C3vState> operator()(std::size_t index) const {
    TrajectoryRng rng(config_.seed, index);
    InitialCondition<C3vState> ic;
    ic.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double R = radius_max_ * rng.uniform_open_zero();
    const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double kinetic = config_.energy - potential_c3v(R, 0.0, 0.0);
    const double p = std::sqrt(2.0 * kC3vMasses[0] * kinetic);
    ic.state = {R, 0.0, p * std::cos(angle), p * std::sin(angle), config_.start_time()};
    return ic;
  }

private:
  EnsembleConfig config_;
  double radius_max_ = 0.0;
};

/// Initial conditions in the C2v subspace.
///
/// Every electron starts within `distance_cap()` of the nucleus: the smallest
/// electron-nucleus distance at the C2v saddle for the peak field. The side of
/// the on-axis electron is drawn with equal weight, covering both mirror
/// halves z1 > 0 and z1 < 0 of the subspace. Configurations are drawn by rejection; the
/// shell measure uses a proposal with density ~ z1^{-1/2} rho^{-1/2}, which
/// bounds the acceptance ratio near the nuclear singularities.
class C2vSampler {
public:
  /// Draws per initial condition before giving up (acceptance rate < 1e-6).
  static constexpr std::size_t kMaxAttempts = 1'000'000;

  explicit C2vSampler(EnsembleConfig config) : config_(std::move(config)) {
    config_.validate();
    if (config_.subspace != Subspace::c2v) throw DomainError("C2vSampler needs a C2v config");
    distance_cap_ = saddle_c2v(config_.field.amplitude).min_distance();
  }

  double distance_cap() const { return distance_cap_; }
  const EnsembleConfig& config() const { return config_; }

  InitialCondition<C2vState> operator()(std::size_t index) const {
    TrajectoryRng rng(config_.seed, index);
    InitialCondition<C2vState> ic;
    ic.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    FieldParams fp = config_.field;
    fp.phase = ic.phase;
    const double t0 = config_.start_time();
    const double field = fp.amplitude * envelope(fp, t0);
    const double d = distance_cap_;
    const double e = config_.energy;
    const double bound2 = 9.0 * d + std::max(0.0, e + 3.0 * d * std::abs(field)) * d * d;

    const double side = rng.uniform() < 0.5 ? 1.0 : -1.0;
    for (std::size_t attempt = 1; attempt <= kMaxAttempts; ++attempt) {
      double x, z, z1;
      if (config_.measure == SamplingMeasure::product) {
        x = rng.uniform(-d, d);
        z = rng.uniform(-d, d);
        z1 = side * d * rng.uniform_open_zero();
        if (x == 0.0 || x * x + z * z > d * d) continue;
      } else {
        const double u = rng.uniform_open_zero();
        z1 = side * d * u * u;
        const double rho = d * std::cbrt(std::pow(rng.uniform_open_zero(), 2.0));
        const double psi = rng.uniform(0.0, 2.0 * std::numbers::pi);
        x = rho * std::sin(psi);
        z = rho * std::cos(psi);
        if (x == 0.0) continue;
      }
      const double kinetic = e - potential_c2v(x, z, z1, field);
      if (!(kinetic > 0.0)) continue;
      if (config_.measure == SamplingMeasure::shell) {
        const double rho = std::hypot(x, z);
        const double ratio = std::sqrt(kinetic * std::abs(z1) * rho / bound2);
        if (rng.uniform() >= ratio) continue;
      }
      // Direction uniform on the unit sphere in mass-weighted momenta.
      const double cz = rng.uniform(-1.0, 1.0);
      const double az = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double sz = std::sqrt(std::max(0.0, 1.0 - cz * cz));
      const double scale = std::sqrt(2.0 * kinetic);
      ic.state = {x,
                  z,
                  z1,
                  scale * std::sqrt(kC2vMasses[0]) * sz * std::cos(az),
                  scale * std::sqrt(kC2vMasses[1]) * sz * std::sin(az),
                  scale * std::sqrt(kC2vMasses[2]) * cz,
                  t0};
      ic.attempts = attempt;
      return ic;
    }
    throw DomainError("C2v constrained energy shell empty or acceptance rate below 1e-6");
  }

private:
  EnsembleConfig config_;
  double distance_cap_ = 0.0;
};

inline std::vector<InitialCondition<C3vState>> sample_c3v(const EnsembleConfig& config) {
  const C3vSampler sampler(config);
  std::vector<InitialCondition<C3vState>> out;
  out.reserve(config.n_traj);
  for (std::size_t i = 0; i < config.n_traj; ++i) out.push_back(sampler(i));
  return out;
}

inline std::vector<InitialCondition<C2vState>> sample_c2v(const EnsembleConfig& config) {
  const C2vSampler sampler(config);
  std::vector<InitialCondition<C2vState>> out;
  out.reserve(config.n_traj);
  for (std::size_t i = 0; i < config.n_traj; ++i) out.push_back(sampler(i));
  return out;
}

}  // namespace tripleion
