#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tripleion/errors.hpp"
#include "tripleion/fields.hpp"
#include "tripleion/hamiltonians.hpp"
#include "tripleion/hessians.hpp"
#include "tripleion/saddles.hpp"

namespace tripleion {

enum class Subspace { c3v, c2v };
enum class Scope { subspace, full };

inline std::string to_string(Subspace s) { return s == Subspace::c3v ? "c3v" : "c2v"; }
inline std::string to_string(Scope s) { return s == Scope::subspace ? "subspace" : "full"; }

enum class ModeTag {
  reaction,                    ///< unstable, all electrons move outward together
  in_subspace_unstable,        ///< unstable, inside the symmetry subspace, not the reaction
  in_subspace_stable,
  symmetry_breaking_unstable,  ///< unstable, leaves the symmetry subspace
  symmetry_breaking_stable,
  neutral,                     ///< zero eigenvalue (overall rotation)
};

inline std::string to_string(ModeTag t) {
  switch (t) {
    case ModeTag::reaction: return "reaction";
    case ModeTag::in_subspace_unstable: return "in_subspace_unstable";
    case ModeTag::in_subspace_stable: return "in_subspace_stable";
    case ModeTag::symmetry_breaking_unstable: return "symmetry_breaking_unstable";
    case ModeTag::symmetry_breaking_stable: return "symmetry_breaking_stable";
    case ModeTag::neutral: return "neutral";
  }
  return "?";
}

inline bool is_unstable(ModeTag t) {
  return t == ModeTag::reaction || t == ModeTag::in_subspace_unstable ||
         t == ModeTag::symmetry_breaking_unstable;
}

/// One (possibly degenerate) eigenvalue of the mass-weighted Hessian.
struct Mode {
  double eigenvalue = 0.0;
  int multiplicity = 1;
  ModeTag tag = ModeTag::neutral;
  /// sqrt(-mu) for unstable modes (Lyapunov exponent), sqrt(mu) for stable
  /// ones (harmonic frequency), zero for neutral modes.
  double exponent = 0.0;
  /// Configuration-space displacements spanning the eigenspace, normalised to
  /// unit length in the kinetic metric.
  std::vector<Eigen::VectorXd> vectors;
};

struct StabilityOptions {
  double degeneracy_tolerance = 1e-6;  ///< relative eigenvalue gap for grouping
  double zero_tolerance = 1e-9;        ///< |mu| below this times max|mu| is neutral
};

struct StabilityReport {
  Subspace subspace = Subspace::c3v;
  Scope scope = Scope::subspace;
  SaddleInfo saddle;
  std::vector<std::string> coordinates;  ///< names of the displacement components
  Eigen::MatrixXd metric;                ///< kinetic metric (mass matrix) in those coordinates
  std::vector<Mode> modes;               ///< ascending eigenvalue
  std::optional<double> wannier_alpha;

  /// Lyapunov exponents of all unstable modes, repeated by multiplicity.
  std::vector<double> lyapunov() const {
    std::vector<double> out;
    for (const auto& m : modes)
      if (is_unstable(m.tag))
        for (int k = 0; k < m.multiplicity; ++k) out.push_back(m.exponent);
    return out;
  }

  const Mode* find(ModeTag tag) const {
    for (const auto& m : modes)
      if (m.tag == tag) return &m;
    return nullptr;
  }

  std::vector<const Mode*> all(ModeTag tag) const {
    std::vector<const Mode*> out;
    for (const auto& m : modes)
      if (m.tag == tag) out.push_back(&m);
    return out;
  }
};

/// Rescales `v` so that component `index` equals one.
inline Eigen::VectorXd normalized_to(const Eigen::VectorXd& v, Eigen::Index index) {
  if (v[index] == 0.0) throw DomainError("cannot normalise to a vanishing component");
  return v / v[index];
}

namespace detail {

struct Eigenpairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // columns, metric-orthonormal
};

inline Eigenpairs generalized_eigen(const Eigen::MatrixXd& h, const Eigen::MatrixXd& metric) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, metric);
  if (solver.info() != Eigen::Success) throw DomainError("eigen decomposition failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Groups ascending eigenvalues into degenerate sets.
inline std::vector<Mode> group_modes(const Eigenpairs& e, const StabilityOptions& opt) {
  const double scale = e.values.cwiseAbs().maxCoeff();
  std::vector<Mode> modes;
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    const double mu = e.values[i];
    if (!modes.empty()) {
      Mode& last = modes.back();
      const double prev = e.values[i - 1];
      const bool both_zero = std::abs(mu) <= opt.zero_tolerance * scale &&
                             std::abs(prev) <= opt.zero_tolerance * scale;
      const bool close = std::abs(mu - prev) <= opt.degeneracy_tolerance * std::max(std::abs(mu), std::abs(prev));
      if (both_zero || close) {
        last.multiplicity += 1;
        last.vectors.push_back(e.vectors.col(i));
        last.eigenvalue = (last.eigenvalue * (last.multiplicity - 1) + mu) / last.multiplicity;
        continue;
      }
    }
    Mode m;
    m.eigenvalue = mu;
    m.vectors.push_back(e.vectors.col(i));
    modes.push_back(std::move(m));
  }
  for (auto& m : modes) {
    if (std::abs(m.eigenvalue) <= opt.zero_tolerance * scale) {
      m.tag = ModeTag::neutral;
      m.exponent = 0.0;
    } else {
      m.tag = m.eigenvalue < 0.0 ? ModeTag::in_subspace_unstable : ModeTag::in_subspace_stable;
      m.exponent = std::sqrt(std::abs(m.eigenvalue));
    }
  }
  return modes;
}

/// True when every component of `v`, oriented along the outward direction of
/// the saddle coordinates, has the same sign.
inline bool points_outward(const Eigen::VectorXd& v, std::span<const double> coords) {
  int pos = 0, neg = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double c = v[i] * (coords[i] >= 0.0 ? 1.0 : -1.0);
    if (c > 0.0) ++pos;
    if (c < 0.0) ++neg;
  }
  return pos == v.size() || neg == v.size();
}

/// Tags modes given their in-subspace components (one vector per mode).
inline void tag_modes(std::vector<Mode>& modes, const std::vector<bool>& in_subspace,
                      const std::vector<Eigen::VectorXd>& subspace_components,
                      std::span<const double> saddle_coords) {
  int reaction = -1;
  double best_alignment = -1.0;
  Eigen::VectorXd outward(saddle_coords.size());
  for (std::size_t i = 0; i < saddle_coords.size(); ++i) outward[i] = saddle_coords[i];
  outward.normalize();

  for (std::size_t k = 0; k < modes.size(); ++k) {
    Mode& m = modes[k];
    if (m.tag == ModeTag::neutral) continue;
    const bool unstable = m.eigenvalue < 0.0;
    if (!in_subspace[k]) {
      m.tag = unstable ? ModeTag::symmetry_breaking_unstable : ModeTag::symmetry_breaking_stable;
      continue;
    }
    m.tag = unstable ? ModeTag::in_subspace_unstable : ModeTag::in_subspace_stable;
    if (unstable && m.multiplicity == 1 && points_outward(subspace_components[k], saddle_coords)) {
      const double a = std::abs(subspace_components[k].normalized().dot(outward));
      if (a > best_alignment) {
        best_alignment = a;
        reaction = static_cast<int>(k);
      }
    }
  }
  if (reaction >= 0) modes[reaction].tag = ModeTag::reaction;
}

/// Orients each vector so that its largest-magnitude component is positive.
inline void orient(std::vector<Mode>& modes) {
  for (auto& m : modes)
    for (auto& v : m.vectors) {
      Eigen::Index i;
      v.cwiseAbs().maxCoeff(&i);
      if (v[i] < 0.0) v = -v;
    }
}

inline void require_kind(const SaddleInfo& s, Subspace sub) {
  const bool ok = (sub == Subspace::c3v && s.kind == SaddleKind::c3v) ||
                  (sub == Subspace::c2v && s.kind == SaddleKind::c2v);
  if (!ok) throw DomainError("saddle kind does not match the requested subspace");
}

}  // namespace detail

/// Harmonic analysis within the symmetry subspace: eigenvalues of
/// M^{-1/2} Hess(V) M^{-1/2} with the subspace masses.
inline StabilityReport analyze_subspace(const SaddleInfo& saddle, Subspace subspace,
                                        const StabilityOptions& opt = {}) {
  detail::require_kind(saddle, subspace);
  StabilityReport rep;
  rep.subspace = subspace;
  rep.scope = Scope::subspace;
  rep.saddle = saddle;
  Eigen::MatrixXd h;
  if (subspace == Subspace::c3v) {
    h = hessian_c3v(saddle.coordinates[0], saddle.coordinates[1]);
    rep.metric = Eigen::Vector2d(kC3vMasses[0], kC3vMasses[1]).asDiagonal();
    rep.coordinates = {"R", "Z"};
  } else {
    h = hessian_c2v(saddle.coordinates[0], saddle.coordinates[1], saddle.coordinates[2]);
    rep.metric = Eigen::Vector3d(kC2vMasses[0], kC2vMasses[1], kC2vMasses[2]).asDiagonal();
    rep.coordinates = {"x", "z", "z1"};
  }
  const auto e = detail::generalized_eigen(h, rep.metric);
  rep.modes = detail::group_modes(e, opt);
  detail::orient(rep.modes);
  std::vector<bool> inside(rep.modes.size(), true);
  std::vector<Eigen::VectorXd> comps;
  for (const auto& m : rep.modes) comps.push_back(m.vectors.front());
  detail::tag_modes(rep.modes, inside, comps, saddle.coordinates);
  return rep;
}

namespace detail {

/// Per-electron cylindrical coordinates (rho_1..3, z_1..3) plus two relative
/// azimuths orthogonal to a common rotation, evaluated at a C3v configuration.
/// Returns the 9x8 Jacobian d(cartesian)/d(internal).
inline Eigen::Matrix<double, 9, 8> c3v_internal_jacobian(double R) {
  Eigen::Matrix<double, 9, 8> j = Eigen::Matrix<double, 9, 8>::Zero();
  // Orthonormal basis of azimuth displacements with zero sum.
  const double b[3][2] = {{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(6.0)},
                          {-1.0 / std::sqrt(2.0), 1.0 / std::sqrt(6.0)},
                          {0.0, -2.0 / std::sqrt(6.0)}};
  for (int i = 0; i < kElectrons; ++i) {
    const double phi = c3v_azimuth(i);
    const double c = std::cos(phi), s = std::sin(phi);
    j(3 * i + 0, i) = c;
    j(3 * i + 1, i) = s;
    j(3 * i + 2, 3 + i) = 1.0;
    for (int k = 0; k < 2; ++k) {
      j(3 * i + 0, 6 + k) = -R * s * b[i][k];
      j(3 * i + 1, 6 + k) = R * c * b[i][k];
    }
  }
  return j;
}

/// Fraction of `v` (metric norm) lying in span(tangent columns).
inline Eigen::VectorXd subspace_coefficients(const Eigen::VectorXd& v, const Eigen::MatrixXd& tangent,
                                             const Eigen::MatrixXd& metric) {
  const Eigen::MatrixXd gram = tangent.transpose() * metric * tangent;
  return gram.ldlt().solve(tangent.transpose() * metric * v);
}

inline double subspace_fraction(const Eigen::VectorXd& v, const Eigen::MatrixXd& tangent,
                                const Eigen::MatrixXd& metric) {
  const Eigen::VectorXd c = subspace_coefficients(v, tangent, metric);
  const Eigen::VectorXd p = tangent * c;
  return p.dot(metric * p) / v.dot(metric * v);
}

}  // namespace detail

/// Tangent vectors of the symmetry subspace in the full-space coordinates of
/// `analyze_fullspace` (columns ordered like the subspace coordinates).
inline Eigen::MatrixXd subspace_tangent(Subspace subspace) {
  if (subspace == Subspace::c3v) {
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(8, 2);
    for (int i = 0; i < 3; ++i) {
      t(i, 0) = 1.0;
      t(3 + i, 1) = 1.0;
    }
    return t;
  }
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(9, 3);
  t(3, 0) = 1.0;   // x2 = x
  t(6, 0) = -1.0;  // x3 = -x
  t(5, 1) = 1.0;   // z2 = z
  t(8, 1) = 1.0;   // z3 = z
  t(2, 2) = 1.0;   // z1
  return t;
}

/// Harmonic analysis in the full configuration space around the embedded saddle.
///
/// C3v: eight coordinates (rho_i, z_i, two relative azimuths), which removes
/// the rotation about the field axis. C2v: nine Cartesian coordinates; the
/// rotation shows up as one neutral mode.
inline StabilityReport analyze_fullspace(const SaddleInfo& saddle, Subspace subspace,
                                         const StabilityOptions& opt = {}) {
  detail::require_kind(saddle, subspace);
  StabilityReport rep;
  rep.subspace = subspace;
  rep.scope = Scope::full;
  rep.saddle = saddle;
  Eigen::MatrixXd h;
  if (subspace == Subspace::c3v) {
    const double R = saddle.coordinates[0], Z = saddle.coordinates[1];
    const FullState full = embed(C3vState{R, Z, 0.0, 0.0, 0.0});
    const auto j = detail::c3v_internal_jacobian(R);
    h = j.transpose() * hessian_full(full.r) * j;
    rep.metric = j.transpose() * j;
    rep.coordinates = {"rho1", "rho2", "rho3", "z1", "z2", "z3", "phi_a", "phi_b"};
  } else {
    const FullState full = embed(C2vState{saddle.coordinates[0], saddle.coordinates[1],
                                          saddle.coordinates[2], 0.0, 0.0, 0.0, 0.0});
    h = hessian_full(full.r);
    rep.metric = Eigen::MatrixXd::Identity(9, 9);
    rep.coordinates = {"x1", "y1", "z1", "x2", "y2", "z2", "x3", "y3", "z3"};
  }
  const auto e = detail::generalized_eigen(h, rep.metric);
  rep.modes = detail::group_modes(e, opt);
  detail::orient(rep.modes);

  const Eigen::MatrixXd tangent = subspace_tangent(subspace);
  std::vector<bool> inside;
  std::vector<Eigen::VectorXd> comps;
  for (const auto& m : rep.modes) {
    double frac = 0.0;
    for (const auto& v : m.vectors) frac += detail::subspace_fraction(v, tangent, rep.metric);
    frac /= m.multiplicity;
    inside.push_back(frac > 0.5);
    comps.push_back(detail::subspace_coefficients(m.vectors.front(), tangent, rep.metric));
  }
  detail::tag_modes(rep.modes, inside, comps, saddle.coordinates);
  return rep;
}

/// Threshold exponent (sum of non-reaction unstable exponents) / reaction exponent.
inline double wannier_exponent(double reaction_exponent, std::span<const double> others) {
  if (!(reaction_exponent > 0.0)) throw DomainError("reaction exponent must be positive");
  if (others.empty()) throw DomainError("no unstable non-reaction modes");
  double sum = 0.0;
  for (double v : others) sum += v;
  return sum / reaction_exponent;
}

inline double wannier_exponent(const StabilityReport& report) {
  const auto reactions = report.all(ModeTag::reaction);
  if (reactions.size() != 1 || reactions.front()->multiplicity != 1)
    throw DomainError("report has no unique reaction mode");
  std::vector<double> others;
  for (const auto& m : report.modes)
    if (m.tag == ModeTag::in_subspace_unstable || m.tag == ModeTag::symmetry_breaking_unstable)
      for (int k = 0; k < m.multiplicity; ++k) others.push_back(m.exponent);
  return wannier_exponent(reactions.front()->exponent, others);
}

struct TimescaleReport {
  double scaled_period = 0.0;  ///< 2 pi / omega' with omega' = omega F^{-3/4}
  struct Entry {
    ModeTag tag;
    double exponent;
    double inverse;
  };
  std::vector<Entry> unstable;
};

/// Compares the field period in scaled units with the inverse Lyapunov
/// exponents of the (scaled, unit-field) report.
inline TimescaleReport timescale_report(const StabilityReport& report, const FieldParams& params) {
  params.validate();
  TimescaleReport t;
  t.scaled_period = 2.0 * std::numbers::pi / scaled_frequency(params.omega, params.amplitude);
  for (const auto& m : report.modes)
    if (is_unstable(m.tag)) t.unstable.push_back({m.tag, m.exponent, 1.0 / m.exponent});
  return t;
}

/// Unit-field saddle report in both scopes, with the threshold exponent set on
/// the full-space report.
inline StabilityReport analyze(Subspace subspace, Scope scope, double field = 1.0,
                               const StabilityOptions& opt = {}) {
  const SaddleInfo s = subspace == Subspace::c3v ? saddle_c3v(field) : saddle_c2v(field);
  StabilityReport r = scope == Scope::subspace ? analyze_subspace(s, subspace, opt)
                                               : analyze_fullspace(s, subspace, opt);
  if (scope == Scope::full) r.wannier_alpha = wannier_exponent(r);
  return r;
}

}  // namespace tripleion
