#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "tripleion/errors.hpp"

namespace tripleion {

struct NewtonOptions {
  double tolerance = 1e-13;        ///< target max-norm of the gradient
  double accept_tolerance = 1e-10; ///< residual still accepted when progress stalls
  int max_iterations = 200;
  /// Newton steps are replaced by a Levenberg-Marquardt (trust-region) step
  /// when min|eig(H)| / max|eig(H)| drops below this.
  double singular_ratio = 1e-8;
};

template <int Dim>
struct StationaryPoint {
  Eigen::Matrix<double, Dim, 1> x;
  double residual = 0.0;
  int iterations = 0;
};

/// Damped Newton iteration on grad V = 0 with an analytic Hessian.
///
/// Steps are backtracked on the merit |g|^2 and must stay inside the domain.
/// A near-singular Hessian, or a Newton direction that cannot be backtracked
/// to a decrease, switches to a Levenberg-Marquardt step on the same merit
/// with an adaptive damping parameter. No constraint is placed on which kind
/// of stationary point is reached; callers check the Morse index.
template <int Dim, class Gradient, class Hessian, class Domain>
StationaryPoint<Dim> find_stationary_point(const Gradient& gradient, const Hessian& hessian,
                                           const Domain& inside,
                                           Eigen::Matrix<double, Dim, 1> x,
                                           const NewtonOptions& options = {}) {
  using Vec = Eigen::Matrix<double, Dim, 1>;
  using Mat = Eigen::Matrix<double, Dim, Dim>;
  const auto to_vector = [](const Vec& v) { return std::vector<double>(v.data(), v.data() + Dim); };

  if (!inside(x)) throw ConvergenceError("initial guess outside the domain", to_vector(x));

  Vec g = gradient(x);
  double best = g.template lpNorm<Eigen::Infinity>();
  double lm_damping = 1e-3;
  int stalled = 0;

  for (int it = 0; it < options.max_iterations; ++it) {
    const double res = g.template lpNorm<Eigen::Infinity>();
    if (res < options.tolerance || (stalled >= 3 && res < options.accept_tolerance))
      return {x, res, it};

    const Mat h = hessian(x);
    Eigen::SelfAdjointEigenSolver<Mat> eig(h);
    const Vec ev = eig.eigenvalues().cwiseAbs();
    const bool near_singular = ev.minCoeff() < options.singular_ratio * ev.maxCoeff();

    const double merit = g.squaredNorm();
    bool moved = false;

    if (!near_singular) {
      const Vec step = -h.ldlt().solve(g);
      double t = 1.0;
      for (int k = 0; k < 40; ++k, t *= 0.5) {
        const Vec trial = x + t * step;
        if (!inside(trial)) continue;
        const Vec gt = gradient(trial);
        if (gt.squaredNorm() < (1.0 - 1e-4 * t) * merit) {
          x = trial;
          g = gt;
          moved = true;
          break;
        }
      }
    }

    if (!moved) {
      // Trust-region fallback: minimise |g + H s|^2 + mu |s|^2.
      for (int k = 0; k < 60; ++k, lm_damping *= 4.0) {
        const Mat a = h * h + lm_damping * Mat::Identity();
        const Vec step = -a.ldlt().solve(h * g);
        const Vec trial = x + step;
        if (!inside(trial)) continue;
        const Vec gt = gradient(trial);
        if (gt.squaredNorm() < merit) {
          x = trial;
          g = gt;
          moved = true;
          lm_damping = std::max(lm_damping / 16.0, 1e-12);
          break;
        }
      }
    }

    const double now = g.template lpNorm<Eigen::Infinity>();
    if (!moved || now > 0.5 * best) {
      ++stalled;
    } else {
      stalled = 0;
    }
    best = std::min(best, now);
    if (!moved) {
      if (now < options.accept_tolerance) return {x, now, it + 1};
      throw ConvergenceError("stationary point search stalled (residual " + std::to_string(now) + ")",
                             to_vector(x));
    }
  }
  const double res = g.template lpNorm<Eigen::Infinity>();
  if (res < options.accept_tolerance) return {x, res, options.max_iterations};
  throw ConvergenceError("stationary point search did not converge (residual " + std::to_string(res) + ")",
                         to_vector(x));
}

}  // namespace tripleion
