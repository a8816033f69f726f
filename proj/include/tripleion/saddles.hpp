#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "tripleion/errors.hpp"
#include "tripleion/hamiltonians.hpp"
#include "tripleion/hessians.hpp"
#include "tripleion/newton.hpp"

namespace tripleion {

enum class SaddleKind { c3v, c2v, ring };

inline std::string to_string(SaddleKind k) {
  switch (k) {
    case SaddleKind::c3v: return "c3v";
    case SaddleKind::c2v: return "c2v";
    case SaddleKind::ring: return "ring";
  }
  return "?";
}

/// Stationary point of a fixed-field potential.
///
/// Coordinates are (R, Z) for the C3v and ring saddles and (x, z, z1) for the
/// C2v saddle. Units follow the field value: with field = F f the result is in
/// physical atomic units, with field = f in scaled units.
struct SaddleInfo {
  SaddleKind kind = SaddleKind::c3v;
  int electrons = 3;
  double field = 1.0;
  std::vector<double> coordinates;
  double energy = 0.0;
  double residual = 0.0;
  int morse_index = 0;

  /// Largest electron distance from the nucleus at the saddle.
  double max_distance() const;
  /// Smallest electron distance from the nucleus at the saddle.
  double min_distance() const;
};

inline double SaddleInfo::max_distance() const {
  if (kind == SaddleKind::c2v)
    return std::max(std::abs(coordinates[2]), std::hypot(coordinates[0], coordinates[1]));
  return std::hypot(coordinates[0], coordinates[1]);
}

inline double SaddleInfo::min_distance() const {
  if (kind == SaddleKind::c2v)
    return std::min(std::abs(coordinates[2]), std::hypot(coordinates[0], coordinates[1]));
  return std::hypot(coordinates[0], coordinates[1]);
}

/// Angle between the field axis and the C3v saddle direction, arctan(1/sqrt 2).
inline const double kC3vSaddleAngle = std::atan(1.0 / std::sqrt(2.0));

template <class Matrix>
int morse_index(const Matrix& hessian) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(hessian);
  int n = 0;
  for (int i = 0; i < eig.eigenvalues().size(); ++i)
    if (eig.eigenvalues()(i) < 0.0) ++n;
  return n;
}

namespace detail {
inline void require_field(double field) {
  if (field == 0.0 || !std::isfinite(field))
    throw DomainError("no saddle at zero field (it recedes to infinity)");
}
}  // namespace detail

/// Closed-form C3v saddle: theta_s = theta for f > 0 and pi - theta for f < 0,
/// r_s^2 = sqrt(6)/|f|, V_s = -2 6^{3/4} sqrt|f|.
inline SaddleInfo saddle_c3v(double field) {
  detail::require_field(field);
  const double theta = field > 0.0 ? kC3vSaddleAngle : std::numbers::pi - kC3vSaddleAngle;
  const double rs = std::sqrt(std::sqrt(6.0) / std::abs(field));
  const double R = rs * std::sin(theta);
  const double Z = rs * std::cos(theta);
  const auto g = gradient_c3v(R, Z, field);
  SaddleInfo s;
  s.kind = SaddleKind::c3v;
  s.electrons = 3;
  s.field = field;
  s.coordinates = {R, Z};
  s.energy = potential_c3v(R, Z, field);
  s.residual = std::max(std::abs(g[0]), std::abs(g[1]));
  s.morse_index = morse_index(hessian_c3v(R, Z));
  return s;
}

/// Distance of the C3v saddle from the nucleus, (sqrt 6 / |f|)^{1/2}.
inline double c3v_saddle_radius(double field) {
  detail::require_field(field);
  return std::sqrt(std::sqrt(6.0) / std::abs(field));
}

/// Published location of the C2v saddle at unit field, used as the seed.
inline constexpr std::array<double, 3> kC2vSeedUnitField{1.1607, 1.1143, 1.4665};

/// Numerically located C2v saddle (Morse index 2 within the subspace).
///
/// Without a guess the unit-field seed is scaled by |f|^{-1/2} and mirrored in
/// z for negative fields.
inline SaddleInfo saddle_c2v(double field, std::optional<std::array<double, 3>> guess = std::nullopt,
                             const NewtonOptions& options = {}) {
  detail::require_field(field);
  Eigen::Vector3d x0;
  if (guess) {
    x0 = {(*guess)[0], (*guess)[1], (*guess)[2]};
  } else {
    const double len = 1.0 / std::sqrt(std::abs(field));
    const double sgn = field > 0.0 ? 1.0 : -1.0;
    x0 = {kC2vSeedUnitField[0] * len, sgn * kC2vSeedUnitField[1] * len, sgn * kC2vSeedUnitField[2] * len};
  }
  const double sx = x0[0] > 0 ? 1.0 : -1.0;
  const double sz1 = x0[2] > 0 ? 1.0 : -1.0;
  auto grad = [&](const Eigen::Vector3d& q) {
    const auto g = gradient_c2v(q[0], q[1], q[2], field);
    return Eigen::Vector3d(g[0], g[1], g[2]);
  };
  auto hess = [](const Eigen::Vector3d& q) { return hessian_c2v(q[0], q[1], q[2]); };
  auto inside = [&](const Eigen::Vector3d& q) {
    return q.allFinite() && q[0] * sx > 0.0 && q[2] * sz1 > 0.0 && std::hypot(q[0], q[1]) > 0.0;
  };
  const auto sp = find_stationary_point<3>(grad, hess, inside, x0, options);

  SaddleInfo s;
  s.kind = SaddleKind::c2v;
  s.electrons = 3;
  s.field = field;
  s.coordinates = {sp.x[0], sp.x[1], sp.x[2]};
  s.energy = potential_c2v(sp.x[0], sp.x[1], sp.x[2], field);
  s.residual = sp.residual;
  s.morse_index = morse_index(hessian_c2v(sp.x[0], sp.x[1], sp.x[2]));
  if (s.morse_index != 2)
    throw ConvergenceError("C2v search reached a stationary point of Morse index " +
                               std::to_string(s.morse_index) + " instead of 2",
                           s.coordinates);
  return s;
}

// ---------------------------------------------------------------------------
// N electrons on a ring perpendicular to the field axis

/// Electron-electron repulsion on the ring, written as N A / R.
enum class RingRepulsion {
  /// All N(N-1)/2 pairs counted at the nearest-neighbour distance 2R sin(pi/N);
  /// the direct extension of the three-electron repulsion 3/(2R sin(pi/3)).
  nearest_neighbour_pairs,
  /// Exact sum over pair distances 2R sin(pi k/N).
  exact_pairwise,
};

inline double ring_repulsion_coefficient(int n, RingRepulsion model) {
  if (n < 2) throw DomainError("ring needs at least two electrons");
  if (model == RingRepulsion::nearest_neighbour_pairs)
    return (n - 1) / (4.0 * std::sin(std::numbers::pi / n));
  double a = 0.0;
  for (int k = 1; k < n; ++k) a += 1.0 / (4.0 * std::sin(std::numbers::pi * k / n));
  return a;
}

/// Ring potential -N^2/r + N A/R - N Z f (nuclear charge N).
struct RingPotential {
  int n;
  double field;
  double repulsion;  ///< A

  RingPotential(int electrons, double f, RingRepulsion model)
      : n(electrons), field(f), repulsion(ring_repulsion_coefficient(electrons, model)) {}

  double value(double R, double Z) const {
    check_c3v(R, Z);
    return -double(n) * n / std::hypot(R, Z) + n * repulsion / R - n * Z * field;
  }
  Eigen::Vector2d gradient(double R, double Z) const {
    check_c3v(R, Z);
    const double r = std::hypot(R, Z);
    const double r3 = r * r * r;
    const double nn = double(n) * n;
    return {nn * R / r3 - n * repulsion / (R * R), nn * Z / r3 - n * field};
  }
  Eigen::Matrix2d hessian(double R, double Z) const {
    check_c3v(R, Z);
    const double r2 = R * R + Z * Z;
    const double r = std::sqrt(r2);
    const double r3 = r2 * r, r5 = r3 * r2;
    const double nn = double(n) * n;
    Eigen::Matrix2d h;
    h(0, 0) = nn * (1.0 / r3 - 3.0 * R * R / r5) + 2.0 * n * repulsion / (R * R * R);
    h(0, 1) = h(1, 0) = -3.0 * nn * R * Z / r5;
    h(1, 1) = nn * (1.0 / r3 - 3.0 * Z * Z / r5);
    return h;
  }
};

namespace detail {

inline std::optional<SaddleInfo> try_ring_newton(const RingPotential& v, Eigen::Vector2d x0,
                                                 const NewtonOptions& options) {
  const double sz = v.field > 0.0 ? 1.0 : -1.0;
  auto grad = [&](const Eigen::Vector2d& q) { return v.gradient(q[0], q[1]); };
  auto hess = [&](const Eigen::Vector2d& q) { return v.hessian(q[0], q[1]); };
  auto inside = [&](const Eigen::Vector2d& q) { return q.allFinite() && q[0] > 0.0 && q[1] * sz > 0.0; };
  try {
    const auto sp = find_stationary_point<2>(grad, hess, inside, x0, options);
    SaddleInfo s;
    s.kind = SaddleKind::ring;
    s.electrons = v.n;
    s.field = v.field;
    s.coordinates = {sp.x[0], sp.x[1]};
    s.energy = v.value(sp.x[0], sp.x[1]);
    s.residual = sp.residual;
    s.morse_index = morse_index(v.hessian(sp.x[0], sp.x[1]));
    if (s.morse_index != 1) return std::nullopt;
    return s;
  } catch (const ConvergenceError&) {
    return std::nullopt;
  }
}

inline Eigen::Vector2d ring_guess(int n, double field) {
  const double theta = field > 0.0 ? kC3vSaddleAngle : std::numbers::pi - kC3vSaddleAngle;
  const double r = std::sqrt(n * std::cos(kC3vSaddleAngle) / std::abs(field));
  return {r * std::sin(theta), r * std::cos(theta)};
}

/// Looks for a grid cell in (0, extent]^2 (Z mirrored for f < 0) where both
/// gradient components change sign. Returns the centre of the first such cell.
inline std::optional<Eigen::Vector2d> ring_gradient_sign_change(const RingPotential& v, double extent,
                                                                int cells = 80) {
  const double sz = v.field > 0.0 ? 1.0 : -1.0;
  const double h = extent / cells;
  std::vector<Eigen::Vector2d> g((cells + 1) * (cells + 1));
  const auto at = [&](int i, int j) -> Eigen::Vector2d& { return g[i * (cells + 1) + j]; };
  for (int i = 0; i <= cells; ++i)
    for (int j = 0; j <= cells; ++j)
      at(i, j) = v.gradient(h * (i + 0.5), sz * h * (j + 0.5));
  for (int i = 0; i < cells; ++i)
    for (int j = 0; j < cells; ++j) {
      bool change[2] = {false, false};
      for (int c = 0; c < 2; ++c) {
        const double s0 = at(i, j)[c];
        for (const auto& q : {at(i + 1, j), at(i, j + 1), at(i + 1, j + 1)})
          if ((q[c] > 0.0) != (s0 > 0.0)) change[c] = true;
      }
      if (change[0] && change[1]) return Eigen::Vector2d(h * (i + 1.0), sz * h * (j + 1.0));
    }
  return std::nullopt;
}

}  // namespace detail

/// Ring saddle for `n` electrons, or nullopt when none exists.
///
/// Newton from the three-electron-angle guess first, then from `seed` (a
/// neighbouring solution in a scan). When both fail a grid scan of the
/// gradient decides: no sign change means no saddle, a sign change that Newton
/// cannot refine is reported as a ConvergenceError.
inline std::optional<SaddleInfo> saddle_ring(int n, double field,
                                             RingRepulsion model = RingRepulsion::nearest_neighbour_pairs,
                                             std::optional<Eigen::Vector2d> seed = std::nullopt,
                                             const NewtonOptions& options = {}) {
  if (n < 2) throw DomainError("ring saddle needs N >= 2");
  detail::require_field(field);
  const RingPotential v(n, field, model);
  const Eigen::Vector2d guess = detail::ring_guess(n, field);
  if (seed)
    if (auto s = detail::try_ring_newton(v, *seed, options)) return s;
  if (auto s = detail::try_ring_newton(v, guess, options)) return s;

  const auto cell = detail::ring_gradient_sign_change(v, 5.0 * guess.norm());
  if (!cell) return std::nullopt;
  if (auto s = detail::try_ring_newton(v, *cell, options)) return s;
  throw ConvergenceError("ring saddle bracketed for N=" + std::to_string(n) + " but Newton failed",
                         {(*cell)[0], (*cell)[1]});
}

struct RingScanRow {
  int electrons;
  std::optional<SaddleInfo> saddle;
};

/// Ring saddles for N = 2..n_max, each seeded by the previous solution.
inline std::vector<RingScanRow> ring_scan(int n_max, double field = 1.0,
                                          RingRepulsion model = RingRepulsion::nearest_neighbour_pairs) {
  std::vector<RingScanRow> rows;
  std::optional<Eigen::Vector2d> seed;
  for (int n = 2; n <= n_max; ++n) {
    auto s = saddle_ring(n, field, model, seed);
    if (s) seed = Eigen::Vector2d(s->coordinates[0], s->coordinates[1]);
    rows.push_back({n, std::move(s)});
  }
  return rows;
}

}  // namespace tripleion
