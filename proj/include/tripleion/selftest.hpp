#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "tripleion/hamiltonians.hpp"
#include "tripleion/hessians.hpp"
#include "tripleion/integrator.hpp"
#include "tripleion/rng.hpp"
#include "tripleion/saddles.hpp"
#include "tripleion/stability.hpp"

namespace tripleion {

struct SelfCheck {
  std::string name;
  bool pass = false;
  double value = 0.0;  ///< measured quantity
  double limit = 0.0;  ///< bound it was held to
};

namespace detail {
inline SelfCheck below(std::string name, double value, double limit) {
  return {std::move(name), std::isfinite(value) && value < limit, value, limit};
}

template <std::size_t D, class V, class G>
double max_gradient_error(const std::array<double, D>& q, V potential, G gradient) {
  const auto g = gradient(q);
  double err = 0.0;
  for (std::size_t i = 0; i < D; ++i) {
    const double h = 1e-5 * std::max(1.0, std::abs(q[i]));
    auto a = q, b = q;
    a[i] += h;
    b[i] -= h;
    const double fd = (potential(a) - potential(b)) / (2.0 * h);
    err = std::max(err, std::abs(fd - g[i]) / std::max(1.0, std::abs(g[i])));
  }
  return err;
}
}  // namespace detail

/// Fast invariant checks: saddle geometry and residuals, spectrum structure,
/// analytic gradients against finite differences, amplitude scaling and
/// static-field energy conservation.
inline std::vector<SelfCheck> run_selftest() {
  std::vector<SelfCheck> out;
  const auto c3 = saddle_c3v(1.0);
  const double r2 = c3.coordinates[0] * c3.coordinates[0] + c3.coordinates[1] * c3.coordinates[1];
  out.push_back(detail::below("c3v saddle r^2 = sqrt 6", std::abs(r2 - std::sqrt(6.0)), 1e-10));
  out.push_back(detail::below("c3v saddle angle", std::abs(std::atan2(c3.coordinates[0], c3.coordinates[1]) - kC3vSaddleAngle), 1e-10));
  out.push_back(detail::below("c3v saddle residual", c3.residual, 1e-10));
  out.push_back({"c3v saddle morse index", c3.morse_index == 1, double(c3.morse_index), 1.0});

  const auto c2 = saddle_c2v(1.0);
  out.push_back(detail::below("c2v saddle residual", c2.residual, 1e-10));
  // two unstable directions inside the subspace: the reaction and the asymmetric stretch
  out.push_back({"c2v saddle morse index", c2.morse_index == 2, double(c2.morse_index), 2.0});

  const double f = 0.207;
  out.push_back(detail::below("c3v energy scaling", std::abs(saddle_c3v(f).energy - energy_from_scaled(c3.energy, f)), 1e-9));
  out.push_back(detail::below("c2v energy scaling", std::abs(saddle_c2v(f).energy - energy_from_scaled(c2.energy, f)), 1e-9));

  const auto full3 = analyze(Subspace::c3v, Scope::full);
  int pairs = 0;
  for (const auto& m : full3.modes)
    if (m.multiplicity == 2 && m.tag != ModeTag::neutral) ++pairs;
  out.push_back({"c3v full spectrum degenerate pairs", pairs == 3, double(pairs), 3.0});
  const auto full2 = analyze(Subspace::c2v, Scope::full);
  int zeros = 0;
  for (const auto& m : full2.modes)
    if (m.tag == ModeTag::neutral) zeros += m.multiplicity;
  out.push_back({"c2v full spectrum zero modes", zeros == 1, double(zeros), 1.0});

  TrajectoryRng rng(12345, 0);
  double err3 = 0.0, err2 = 0.0;
  for (int k = 0; k < 20; ++k) {
    const std::array<double, 2> q3{0.3 + 2.0 * rng.uniform(), -1.5 + 3.0 * rng.uniform()};
    err3 = std::max(err3, detail::max_gradient_error(
                              q3, [](const auto& q) { return potential_c3v(q[0], q[1], 0.7); },
                              [](const auto& q) { return gradient_c3v(q[0], q[1], 0.7); }));
    const std::array<double, 3> q2{0.3 + 2.0 * rng.uniform(), -1.5 + 3.0 * rng.uniform(), 0.3 + 2.0 * rng.uniform()};
    err2 = std::max(err2, detail::max_gradient_error(
                              q2, [](const auto& q) { return potential_c2v(q[0], q[1], q[2], 0.7); },
                              [](const auto& q) { return gradient_c2v(q[0], q[1], q[2], 0.7); }));
  }
  out.push_back(detail::below("c3v gradient vs finite differences", err3, 1e-7));
  out.push_back(detail::below("c2v gradient vs finite differences", err2, 1e-7));

  const StaticField field(1.0);
  const C3vState start{1.5, 0.5, 0.3, 0.5, 0.0};
  const auto end = integrate_state(start, field, 100.0);
  out.push_back(detail::below("c3v static-field energy drift",
                              std::abs(hamiltonian_c3v(end, 1.0) - hamiltonian_c3v(start, 1.0)), 1e-8));
  return out;
}

}  // namespace tripleion
