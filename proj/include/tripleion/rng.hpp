#pragma once

#include <cstdint>
#include <random>

namespace tripleion {

/// SplitMix64 finaliser; decorrelates nearby seeds and indices.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent, reproducible stream for trajectory `index` of an ensemble.
///
/// The stream depends only on (seed, index), so results do not depend on how
/// trajectories are distributed over threads.
class TrajectoryRng {
public:
  TrajectoryRng(std::uint64_t seed, std::uint64_t index) : engine_(mix64(mix64(seed) ^ mix64(~index))) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1].
  double uniform_open_zero() { return 1.0 - uniform(); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
  std::mt19937_64 engine_;
};

}  // namespace tripleion
