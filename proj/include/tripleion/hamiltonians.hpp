#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <numbers>

#include "tripleion/errors.hpp"
#include "tripleion/fields.hpp"

namespace tripleion {

// Coulomb terms carry no explicit amplitude; `field` arguments are the
// instantaneous value F f(t) (or f(t) in scaled units).

inline constexpr double kSqrt3 = 1.7320508075688772;
inline constexpr int kElectrons = 3;

/// Diagonal kinetic masses of the reduced subspaces. Shared by the equations of
/// motion and the mass-weighted stability analysis.
inline constexpr std::array<double, 2> kC3vMasses{3.0, 3.0};     // (R, Z)
inline constexpr std::array<double, 3> kC2vMasses{2.0, 2.0, 1.0};  // (x, z, z1)

/// Three electrons on an equilateral triangle perpendicular to the field axis.
struct C3vState {
  double R = 0.0;   ///< ring radius
  double Z = 0.0;   ///< common axial position
  double pR = 0.0;
  double pZ = 0.0;
  double t = 0.0;
};

/// Planar configuration: electron 1 on the axis at z1, electrons 2 and 3 at
/// (+-x, 0, z).
struct C2vState {
  double x = 0.0;
  double z = 0.0;
  double z1 = 0.0;
  double px = 0.0;
  double pz = 0.0;
  double pz1 = 0.0;
  double t = 0.0;
};

using Vec3 = Eigen::Vector3d;

/// Full Cartesian phase-space point of the three-electron atom.
struct FullState {
  std::array<Vec3, kElectrons> r{Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  std::array<Vec3, kElectrons> p{Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  double t = 0.0;
};

// ---------------------------------------------------------------------------
// C3v subspace
//
// V = -9/sqrt(R^2+Z^2) + 3/(2R sin(pi/3)) - 3 Z f. The repulsion term is
// written as sqrt(3)/R, using 2 sin(pi/3) = sqrt(3).

inline void check_c3v(double R, double Z) {
  if (!(R > 0.0) || !std::isfinite(R) || !std::isfinite(Z))
    throw DomainError("C3v configuration requires R > 0");
}

inline double potential_c3v(double R, double Z, double field) {
  check_c3v(R, Z);
  return -9.0 / std::hypot(R, Z) + kSqrt3 / R - 3.0 * Z * field;
}

/// (dV/dR, dV/dZ).
inline std::array<double, 2> gradient_c3v(double R, double Z, double field) {
  check_c3v(R, Z);
  const double r = std::hypot(R, Z);
  const double r3 = r * r * r;
  return {9.0 * R / r3 - kSqrt3 / (R * R), 9.0 * Z / r3 - 3.0 * field};
}

inline double hamiltonian_c3v(const C3vState& s, double field) {
  return (s.pR * s.pR + s.pZ * s.pZ) / (2.0 * kC3vMasses[0]) + potential_c3v(s.R, s.Z, field);
}

/// Hamilton's equations; the returned state holds time derivatives (t slot = 1).
inline C3vState eom_c3v(const C3vState& s, double field) {
  const auto g = gradient_c3v(s.R, s.Z, field);
  return {s.pR / kC3vMasses[0], s.pZ / kC3vMasses[1], -g[0], -g[1], 1.0};
}

inline C3vState eom_c3v(const C3vState& s, const FieldParams& params) {
  return eom_c3v(s, PulsedField(params)(s.t));
}

// ---------------------------------------------------------------------------
// C2v subspace
//
// V = -6/sqrt(x^2+z^2) - 3/|z1| + 1/(2|x|) + 2/sqrt(x^2+(z-z1)^2) - (2z+z1) f.
// With |z1| the potential is covariant under z -> -z, z1 -> -z1, f -> -f, so
// the on-axis electron may sit on either side of the nucleus.

inline void check_c2v(double x, double z, double z1) {
  if (!std::isfinite(x) || !std::isfinite(z) || !std::isfinite(z1))
    throw DomainError("C2v configuration not finite");
  if (x == 0.0 || z1 == 0.0)
    throw DomainError("C2v configuration singular (x = 0 or z1 = 0)");
}

inline double potential_c2v(double x, double z, double z1, double field) {
  check_c2v(x, z, z1);
  const double rho = std::hypot(x, z);
  const double d = std::hypot(x, z - z1);
  return -6.0 / rho - 3.0 / std::abs(z1) + 0.5 / std::abs(x) + 2.0 / d - (2.0 * z + z1) * field;
}

/// (dV/dx, dV/dz, dV/dz1).
inline std::array<double, 3> gradient_c2v(double x, double z, double z1, double field) {
  check_c2v(x, z, z1);
  const double rho = std::hypot(x, z);
  const double d = std::hypot(x, z - z1);
  const double rho3 = rho * rho * rho;
  const double d3 = d * d * d;
  const double sx = std::copysign(1.0, x);
  const double sz1 = std::copysign(1.0, z1);
  return {6.0 * x / rho3 - 0.5 * sx / (x * x) - 2.0 * x / d3,
          6.0 * z / rho3 - 2.0 * (z - z1) / d3 - 2.0 * field,
          3.0 * sz1 / (z1 * z1) + 2.0 * (z - z1) / d3 - field};
}

inline double hamiltonian_c2v(const C2vState& s, double field) {
  return s.px * s.px / (2.0 * kC2vMasses[0]) + s.pz * s.pz / (2.0 * kC2vMasses[1]) +
         s.pz1 * s.pz1 / (2.0 * kC2vMasses[2]) + potential_c2v(s.x, s.z, s.z1, field);
}

inline C2vState eom_c2v(const C2vState& s, double field) {
  const auto g = gradient_c2v(s.x, s.z, s.z1, field);
  return {s.px / kC2vMasses[0], s.pz / kC2vMasses[1], s.pz1 / kC2vMasses[2],
          -g[0], -g[1], -g[2], 1.0};
}

inline C2vState eom_c2v(const C2vState& s, const FieldParams& params) {
  return eom_c2v(s, PulsedField(params)(s.t));
}

// ---------------------------------------------------------------------------
// Full configuration space

using Configuration = std::array<Vec3, kElectrons>;

inline void check_full(const Configuration& r) {
  for (int i = 0; i < kElectrons; ++i) {
    if (r[i].norm() == 0.0) throw DomainError("electron at the nucleus");
    for (int j = i + 1; j < kElectrons; ++j)
      if ((r[i] - r[j]).norm() == 0.0) throw DomainError("coincident electrons");
  }
}

/// Nuclear attraction with charge `nuclear_charge`, pairwise repulsion and
/// dipole coupling -(z1+z2+z3) field.
inline double potential_full(const Configuration& r, double field, double nuclear_charge = 3.0) {
  check_full(r);
  double v = 0.0;
  for (int i = 0; i < kElectrons; ++i) {
    v += -nuclear_charge / r[i].norm() - r[i].z() * field;
    for (int j = i + 1; j < kElectrons; ++j) v += 1.0 / (r[i] - r[j]).norm();
  }
  return v;
}

inline Configuration gradient_full(const Configuration& r, double field, double nuclear_charge = 3.0) {
  check_full(r);
  Configuration g{Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  for (int i = 0; i < kElectrons; ++i) {
    const double ri = r[i].norm();
    g[i] += nuclear_charge * r[i] / (ri * ri * ri);
    g[i].z() -= field;
    for (int j = i + 1; j < kElectrons; ++j) {
      const Vec3 d = r[i] - r[j];
      const double dn = d.norm();
      const Vec3 f = d / (dn * dn * dn);
      g[i] -= f;
      g[j] += f;
    }
  }
  return g;
}

inline double potential_full(const FullState& s, double field, double nuclear_charge = 3.0) {
  return potential_full(s.r, field, nuclear_charge);
}

inline double hamiltonian_full(const FullState& s, double field) {
  double kinetic = 0.0;
  for (const auto& p : s.p) kinetic += 0.5 * p.squaredNorm();
  return kinetic + potential_full(s.r, field);
}

/// z component of the total angular momentum.
inline double angular_momentum_z(const FullState& s) {
  double lz = 0.0;
  for (int i = 0; i < kElectrons; ++i) lz += s.r[i].cross(s.p[i]).z();
  return lz;
}

// ---------------------------------------------------------------------------
// Embeddings

/// Azimuth of electron i (0-based) in the C3v embedding: 2 pi (i+1) / 3.
inline double c3v_azimuth(int i) { return 2.0 * std::numbers::pi * (i + 1) / 3.0; }

inline FullState embed(const C3vState& s) {
  check_c3v(s.R, s.Z);
  FullState out;
  out.t = s.t;
  for (int i = 0; i < kElectrons; ++i) {
    const double phi = c3v_azimuth(i);
    const double c = std::cos(phi), sn = std::sin(phi);
    out.r[i] = Vec3(s.R * c, s.R * sn, s.Z);
    out.p[i] = Vec3(s.pR / 3.0 * c, s.pR / 3.0 * sn, s.pZ / 3.0);
  }
  return out;
}

inline FullState embed(const C2vState& s) {
  check_c2v(s.x, s.z, s.z1);
  FullState out;
  out.t = s.t;
  out.r[0] = Vec3(0.0, 0.0, s.z1);
  out.p[0] = Vec3(0.0, 0.0, s.pz1);
  out.r[1] = Vec3(s.x, 0.0, s.z);
  out.p[1] = Vec3(0.5 * s.px, 0.0, 0.5 * s.pz);
  out.r[2] = Vec3(-s.x, 0.0, s.z);
  out.p[2] = Vec3(-0.5 * s.px, 0.0, 0.5 * s.pz);
  return out;
}

// ---------------------------------------------------------------------------
// Amplitude scaling of subspace states

inline C3vState scale_state(const C3vState& s, double amplitude, ScaleDirection dir) {
  const auto k = ScaleFactors::for_amplitude(amplitude);
  const bool fwd = dir == ScaleDirection::to_scaled;
  const double L = fwd ? k.length : 1.0 / k.length;
  const double P = fwd ? k.momentum : 1.0 / k.momentum;
  const double T = fwd ? k.time : 1.0 / k.time;
  return {s.R * L, s.Z * L, s.pR * P, s.pZ * P, s.t * T};
}

inline C2vState scale_state(const C2vState& s, double amplitude, ScaleDirection dir) {
  const auto k = ScaleFactors::for_amplitude(amplitude);
  const bool fwd = dir == ScaleDirection::to_scaled;
  const double L = fwd ? k.length : 1.0 / k.length;
  const double P = fwd ? k.momentum : 1.0 / k.momentum;
  const double T = fwd ? k.time : 1.0 / k.time;
  return {s.x * L, s.z * L, s.z1 * L, s.px * P, s.pz * P, s.pz1 * P, s.t * T};
}

}  // namespace tripleion
