#pragma once

#include <Eigen/Dense>

#include <cmath>

#include "tripleion/hamiltonians.hpp"

namespace tripleion {

// Analytic second derivatives of the potentials. The dipole term is linear in
// the coordinates and drops out, so none of these depend on the field.

inline Eigen::Matrix2d hessian_c3v(double R, double Z) {
  check_c3v(R, Z);
  const double r2 = R * R + Z * Z;
  const double r = std::sqrt(r2);
  const double r3 = r2 * r;
  const double r5 = r3 * r2;
  Eigen::Matrix2d h;
  h(0, 0) = 9.0 * (1.0 / r3 - 3.0 * R * R / r5) + 2.0 * kSqrt3 / (R * R * R);
  h(0, 1) = h(1, 0) = -27.0 * R * Z / r5;
  h(1, 1) = 9.0 * (1.0 / r3 - 3.0 * Z * Z / r5);
  return h;
}

inline Eigen::Matrix3d hessian_c2v(double x, double z, double z1) {
  check_c2v(x, z, z1);
  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  // -6/rho over (x, z)
  const double rho2 = x * x + z * z;
  const double rho = std::sqrt(rho2);
  const double rho3 = rho2 * rho, rho5 = rho3 * rho2;
  h(0, 0) += 6.0 * (1.0 / rho3 - 3.0 * x * x / rho5);
  h(0, 1) += -18.0 * x * z / rho5;
  h(1, 1) += 6.0 * (1.0 / rho3 - 3.0 * z * z / rho5);
  // -3/|z1|
  h(2, 2) += -6.0 / std::pow(std::abs(z1), 3);
  // 1/(2|x|)
  h(0, 0) += 1.0 / std::pow(std::abs(x), 3);
  // 2/d with d = (x, w), w = z - z1
  const double w = z - z1;
  const double d2 = x * x + w * w;
  const double d = std::sqrt(d2);
  const double d5 = d2 * d2 * d;
  const double dxx = 2.0 * (3.0 * x * x - d2) / d5;
  const double dxw = 6.0 * x * w / d5;
  const double dww = 2.0 * (3.0 * w * w - d2) / d5;
  h(0, 0) += dxx;
  h(0, 1) += dxw;
  h(0, 2) -= dxw;
  h(1, 1) += dww;
  h(1, 2) -= dww;
  h(2, 2) += dww;
  h(1, 0) = h(0, 1);
  h(2, 0) = h(0, 2);
  h(2, 1) = h(1, 2);
  return h;
}

/// 9x9 Hessian in Cartesian coordinates ordered (x1,y1,z1,x2,...,z3).
inline Eigen::Matrix<double, 9, 9> hessian_full(const Configuration& r, double nuclear_charge = 3.0) {
  check_full(r);
  Eigen::Matrix<double, 9, 9> h = Eigen::Matrix<double, 9, 9>::Zero();
  const auto inverse_distance_hessian = [](const Vec3& d) -> Eigen::Matrix3d {
    const double n2 = d.squaredNorm();
    const double n = std::sqrt(n2);
    const double n5 = n2 * n2 * n;
    return (3.0 * d * d.transpose() - n2 * Eigen::Matrix3d::Identity()) / n5;
  };
  for (int i = 0; i < kElectrons; ++i) {
    h.block<3, 3>(3 * i, 3 * i) -= nuclear_charge * inverse_distance_hessian(r[i]);
    for (int j = i + 1; j < kElectrons; ++j) {
      const Eigen::Matrix3d t = inverse_distance_hessian(r[i] - r[j]);
      h.block<3, 3>(3 * i, 3 * i) += t;
      h.block<3, 3>(3 * j, 3 * j) += t;
      h.block<3, 3>(3 * i, 3 * j) -= t;
      h.block<3, 3>(3 * j, 3 * i) -= t;
    }
  }
  return h;
}

}  // namespace tripleion
