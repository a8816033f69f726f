#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "tripleion/stability.hpp"

using namespace tripleion;

namespace {
const Mode& only(const StabilityReport& r, ModeTag tag) {
  const auto all = r.all(tag);
  EXPECT_EQ(all.size(), 1u) << to_string(tag);
  return *all.front();
}

std::size_t index_of(const StabilityReport& r, const std::string& name) {
  for (std::size_t i = 0; i < r.coordinates.size(); ++i)
    if (r.coordinates[i] == name) return i;
  ADD_FAILURE() << "no coordinate " << name;
  return 0;
}

// Generalized eigen-equation residual |H v - mu M v| with H rebuilt from the
// mode decomposition's own metric: checks vectors are eigenvectors of the
// report's operator and M-orthonormal.
void expect_metric_normalised(const StabilityReport& r) {
  for (const auto& m : r.modes)
    for (const auto& v : m.vectors) EXPECT_NEAR(v.dot(r.metric * v), 1.0, 1e-9);
}
}  // namespace

TEST(Stability, C3vSubspaceReaction) {
  const auto r = analyze(Subspace::c3v, Scope::subspace);
  const auto& m = only(r, ModeTag::reaction);
  EXPECT_NEAR(m.exponent, 1.1054, 1e-3);
  EXPECT_EQ(r.all(ModeTag::in_subspace_stable).size(), 1u);
  expect_metric_normalised(r);
}

TEST(Stability, C3vEigenvaluesMatchDirectSolve) {
  // Independent oracle: eigenvalues of M^{-1} H for the 2x2 subspace problem.
  const auto s = saddle_c3v(1.0);
  Eigen::Matrix2d h = hessian_c3v(s.coordinates[0], s.coordinates[1]) / 3.0;
  const double tr = h.trace(), det = h.determinant();
  const double lo = 0.5 * (tr - std::sqrt(tr * tr - 4 * det)), hi = 0.5 * (tr + std::sqrt(tr * tr - 4 * det));
  const auto r = analyze(Subspace::c3v, Scope::subspace);
  ASSERT_EQ(r.modes.size(), 2u);
  EXPECT_NEAR(r.modes[0].eigenvalue, lo, 1e-12);
  EXPECT_NEAR(r.modes[1].eigenvalue, hi, 1e-12);
  EXPECT_NEAR(r.modes[0].exponent, std::sqrt(-lo), 1e-12);
}

TEST(Stability, C3vFullSpaceDegeneratePairs) {
  const auto r = analyze(Subspace::c3v, Scope::full);
  int pairs = 0, total = 0;
  for (const auto& m : r.modes) {
    total += m.multiplicity;
    if (m.multiplicity == 2) ++pairs;
  }
  EXPECT_EQ(total, 8);
  EXPECT_EQ(pairs, 3);
  const auto& a = only(r, ModeTag::symmetry_breaking_unstable);
  EXPECT_EQ(a.multiplicity, 2);
  EXPECT_NEAR(a.exponent, 1.4496, 1e-3);
  EXPECT_NEAR(only(r, ModeTag::reaction).exponent, 1.1054, 1e-3);
  expect_metric_normalised(r);
}

TEST(Stability, C3vAsymmetricModeShape) {
  // Within the degenerate eigenspace pick the member with rho1 = rho2 and
  // normalise it to rho1 = 1; compare the (rho, z) pattern.
  const auto r = analyze(Subspace::c3v, Scope::full);
  const auto& a = only(r, ModeTag::symmetry_breaking_unstable);
  ASSERT_EQ(a.vectors.size(), 2u);
  const auto& v1 = a.vectors[0];
  const auto& v2 = a.vectors[1];
  const std::size_t r1 = index_of(r, "rho1"), r2 = index_of(r, "rho2"), r3 = index_of(r, "rho3");
  const std::size_t z1 = index_of(r, "z1"), z2 = index_of(r, "z2"), z3 = index_of(r, "z3");
  // c1 (v1[r1]-v1[r2]) + c2 (v2[r1]-v2[r2]) = 0
  const double d1 = v1[r1] - v1[r2], d2 = v2[r1] - v2[r2];
  Eigen::VectorXd w = d2 * v1 - d1 * v2;
  w /= w[r1];
  EXPECT_NEAR(w[r2], 1.0, 1e-9);
  EXPECT_NEAR(w[r3], -2.0000, 1e-3);
  EXPECT_NEAR(w[z1], 2.0642, 1e-3);
  EXPECT_NEAR(w[z2], 2.0642, 1e-3);
  EXPECT_NEAR(w[z3], -4.1284, 1e-3);
}

TEST(Stability, C2vSubspaceModes) {
  const auto r = analyze(Subspace::c2v, Scope::subspace);
  const auto& reaction = only(r, ModeTag::reaction);
  const auto& a = only(r, ModeTag::in_subspace_unstable);
  EXPECT_NEAR(reaction.exponent, 1.0980, 1e-3);
  EXPECT_NEAR(a.exponent, 1.7937, 1e-3);
  EXPECT_EQ(r.all(ModeTag::in_subspace_stable).size(), 1u);

  const std::size_t x = index_of(r, "x"), z = index_of(r, "z"), z1 = index_of(r, "z1");
  const Eigen::VectorXd w = normalized_to(reaction.vectors.front(), Eigen::Index(z1));
  EXPECT_NEAR(w[x], 0.6183, 1e-3);
  EXPECT_NEAR(w[z], 1.1417, 1e-3);
  const Eigen::VectorXd u = normalized_to(a.vectors.front(), Eigen::Index(z1));
  EXPECT_NEAR(u[x], -0.2313, 1e-3);
  EXPECT_NEAR(u[z], -0.3127, 1e-3);
}

TEST(Stability, C2vFullSpaceModes) {
  const auto r = analyze(Subspace::c2v, Scope::full);
  int zero = 0, total = 0;
  for (const auto& m : r.modes) {
    total += m.multiplicity;
    if (m.tag == ModeTag::neutral) zero += m.multiplicity;
  }
  EXPECT_EQ(total, 9);
  EXPECT_EQ(zero, 1);
  const auto breaking = r.all(ModeTag::symmetry_breaking_unstable);
  ASSERT_EQ(breaking.size(), 2u);
  const Mode* b = breaking[0]->exponent < breaking[1]->exponent ? breaking[0] : breaking[1];
  const Mode* c = breaking[0]->exponent < breaking[1]->exponent ? breaking[1] : breaking[0];
  EXPECT_NEAR(b->exponent, 0.9024, 1e-3);
  EXPECT_NEAR(c->exponent, 1.3712, 1e-3);
  EXPECT_NEAR(only(r, ModeTag::reaction).exponent, 1.0980, 1e-3);
  EXPECT_NEAR(only(r, ModeTag::in_subspace_unstable).exponent, 1.7937, 1e-3);

  const Eigen::VectorXd y = normalized_to(b->vectors.front(), Eigen::Index(index_of(r, "y1")));
  EXPECT_NEAR(y[index_of(r, "y2")], -0.5752, 1e-3);
  EXPECT_NEAR(y[index_of(r, "y3")], -0.5752, 1e-3);
  EXPECT_NEAR(y[index_of(r, "x1")], 0.0, 1e-9);

  const Eigen::VectorXd v = normalized_to(c->vectors.front(), Eigen::Index(index_of(r, "z2")));
  EXPECT_NEAR(v[index_of(r, "x1")], 0.0746, 1e-3);
  EXPECT_NEAR(v[index_of(r, "x2")], 0.6598, 1e-3);
  EXPECT_NEAR(v[index_of(r, "x3")], 0.6598, 1e-3);
  EXPECT_NEAR(v[index_of(r, "z3")], -1.0, 1e-3);
  EXPECT_NEAR(v[index_of(r, "z1")], 0.0, 1e-9);
  expect_metric_normalised(r);
}

TEST(Stability, WannierExponentsFromSumRules) {
  const auto r3 = analyze(Subspace::c3v, Scope::full);
  const auto r2 = analyze(Subspace::c2v, Scope::full);
  const double lr = only(r3, ModeTag::reaction).exponent;
  const double na = only(r3, ModeTag::symmetry_breaking_unstable).exponent;
  ASSERT_TRUE(r3.wannier_alpha.has_value());
  EXPECT_NEAR(*r3.wannier_alpha, 2.0 * na / lr, 1e-12);
  EXPECT_NEAR(*r3.wannier_alpha, 2.6228, 1e-3);

  double others = only(r2, ModeTag::in_subspace_unstable).exponent;
  for (const Mode* m : r2.all(ModeTag::symmetry_breaking_unstable)) others += m->exponent;
  ASSERT_TRUE(r2.wannier_alpha.has_value());
  EXPECT_NEAR(*r2.wannier_alpha, others / only(r2, ModeTag::reaction).exponent, 1e-12);
  EXPECT_NEAR(*r2.wannier_alpha, 3.7043, 1e-3);
}

TEST(Stability, WannierExponentInputValidation) {
  const std::vector<double> others{1.0};
  EXPECT_THROW(wannier_exponent(0.0, others), DomainError);
  EXPECT_THROW(wannier_exponent(1.0, std::span<const double>{}), DomainError);
  const std::vector<double> two{1.5, 1.5};
  EXPECT_DOUBLE_EQ(wannier_exponent(1.2, two), 2.5);
}

TEST(Stability, TimescalesAtExperimentalField) {
  const auto r = analyze(Subspace::c3v, Scope::full);
  const FieldParams p{0.207, 0.057, 1.0, 0.0};
  const auto t = timescale_report(r, p);
  EXPECT_NEAR(t.scaled_period, 33.6, 0.5);
  bool saw_reaction = false, saw_a = false;
  for (const auto& e : t.unstable) {
    if (e.tag == ModeTag::reaction) {
      EXPECT_NEAR(e.inverse, 0.90, 0.01);
      saw_reaction = true;
    }
    if (e.tag == ModeTag::symmetry_breaking_unstable) {
      EXPECT_NEAR(e.inverse, 0.69, 0.01);
      saw_a = true;
    }
  }
  EXPECT_TRUE(saw_reaction && saw_a);
}

TEST(Stability, ExponentsScaleWithField) {
  // Frequencies scale like F^{3/4}.
  const double F = 0.207;
  const auto unit = analyze(Subspace::c3v, Scope::subspace);
  const auto phys = analyze(Subspace::c3v, Scope::subspace, F);
  EXPECT_NEAR(only(phys, ModeTag::reaction).exponent, std::pow(F, 0.75) * only(unit, ModeTag::reaction).exponent, 1e-9);
}

TEST(Stability, WrongSaddleKindRejected) {
  EXPECT_THROW(analyze_subspace(saddle_c2v(1.0), Subspace::c3v), DomainError);
}

TEST(Stability, C3vPublishedVectorsLieInUnstableEigenspace) {
  // Both published vectors are given in (rho_i, z_i) only; compare with the
  // eigenspace projected on those six components.
  const auto r = analyze(Subspace::c3v, Scope::full);
  const auto& a = only(r, ModeTag::symmetry_breaking_unstable);
  const std::size_t idx[6] = {index_of(r, "rho1"), index_of(r, "rho2"), index_of(r, "rho3"),
                              index_of(r, "z1"),   index_of(r, "z2"),   index_of(r, "z3")};
  Eigen::MatrixXd basis(6, 2);
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 6; ++i) basis(i, k) = a.vectors[k][idx[i]];
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(6, 2);
  Eigen::VectorXd w(6), u(6);
  w << 1.0, 1.0, -2.0, 2.0642, 2.0642, -4.1284;
  u << -1.0, 1.0, 0.0, -2.0642, 2.0642, 0.0;
  for (const Eigen::VectorXd& p : {w, u}) {
    const double c = (q.transpose() * p).norm() / p.norm();
    EXPECT_LT(std::acos(std::min(1.0, c)), 1e-3);
  }
}
