#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace tripleion {

template <std::size_t N>
using StateVector = std::array<double, N>;

struct StepControls {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double min_step = 1e-12;  ///< step below this is an underflow (near collision)
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 50'000'000;
};

enum class IntegrationStatus { reached_end, stopped, step_underflow, step_limit };

/// What the per-step callback asks the driver to do next.
enum class StepAction { proceed, stop, state_modified };

/// Adaptive Dormand-Prince 5(4) pair with PI step-size control (Hairer,
/// Norsett & Wanner, DOPRI5 coefficients and controller constants).
///
/// `rhs(t, y, dy)` returns false when y is outside the domain of the vector
/// field; the step is then rejected and retried with a smaller size.
template <std::size_t N>
class DormandPrince54 {
public:
  using Vec = StateVector<N>;

  explicit DormandPrince54(StepControls controls = {}) : c_(controls) {}

  const StepControls& controls() const { return c_; }
  std::size_t accepted_steps() const { return accepted_; }
  std::size_t rejected_steps() const { return rejected_; }
  double step_size() const { return h_; }

  /// Integrates from (t, y) towards t_end, updating both in place.
  ///
  /// `after_step(t, y)` runs after each accepted step and may stop the
  /// integration or modify (t, y), in which case the FSAL derivative is
  /// recomputed.
  template <class Rhs, class AfterStep>
  IntegrationStatus integrate(const Rhs& rhs, double& t, Vec& y, double t_end, AfterStep&& after_step) {
    if (t_end == t) return IntegrationStatus::reached_end;
    const double dir = t_end > t ? 1.0 : -1.0;
    Vec k1;
    if (!rhs(t, y, k1)) return IntegrationStatus::step_underflow;
    if (h_ <= 0.0 || !std::isfinite(h_)) h_ = initial_step(rhs, t, y, k1, dir);

    bool last_rejected = false;
    while (dir * (t_end - t) > 0.0) {
      if (accepted_ + rejected_ >= c_.max_steps) return IntegrationStatus::step_limit;
      double h = std::min({h_, c_.max_step, std::abs(t_end - t)});
      const bool final_step = h >= std::abs(t_end - t);
      if (h < c_.min_step && !final_step) return IntegrationStatus::step_underflow;

      Vec y_new, k7;
      double err = 0.0;
      const bool valid = attempt(rhs, t, y, k1, dir * h, y_new, k7, err);
      if (!valid || !(err <= 1.0)) {
        ++rejected_;
        const double fac = valid && std::isfinite(err) ? std::max(kFacMin, 0.9 / std::pow(err, kExpo1)) : 0.25;
        h_ = h * std::min(1.0, fac);
        last_rejected = true;
        continue;
      }
      ++accepted_;
      // PI controller.
      const double fac11 = std::pow(std::max(err, 1e-16), kExpo1);
      double fac = fac11 / std::pow(err_old_, kBeta) / 0.9;
      fac = std::clamp(fac, 1.0 / kFacMax, 1.0 / kFacMin);
      double h_next = h / fac;
      if (last_rejected) h_next = std::min(h_next, h);
      err_old_ = std::max(err, 1e-4);
      last_rejected = false;

      t = final_step ? t_end : t + dir * h;
      y = y_new;
      k1 = k7;
      h_ = h_next;

      const StepAction action = after_step(t, y);
      if (action == StepAction::stop) return IntegrationStatus::stopped;
      if (action == StepAction::state_modified && !rhs(t, y, k1)) return IntegrationStatus::step_underflow;
    }
    return IntegrationStatus::reached_end;
  }

  template <class Rhs>
  IntegrationStatus integrate(const Rhs& rhs, double& t, Vec& y, double t_end) {
    return integrate(rhs, t, y, t_end, [](double, Vec&) { return StepAction::proceed; });
  }

private:
  static constexpr double kBeta = 0.04;
  static constexpr double kExpo1 = 0.2 - kBeta * 0.75;
  static constexpr double kFacMin = 0.2;   // largest shrink 1/5
  static constexpr double kFacMax = 10.0;  // largest growth

  double scale(double a, double b) const { return c_.abs_tol + c_.rel_tol * std::max(std::abs(a), std::abs(b)); }

  template <class Rhs>
  double initial_step(const Rhs& rhs, double t, const Vec& y, const Vec& f0, double dir) const {
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk = scale(y[i], y[i]);
      d0 += (y[i] / sk) * (y[i] / sk);
      d1 += (f0[i] / sk) * (f0[i] / sk);
    }
    double h = (d0 < 1e-10 || d1 < 1e-10) ? 1e-6 : 0.01 * std::sqrt(d0 / d1);
    h = std::min(h, c_.max_step);
    Vec y1, f1;
    for (std::size_t i = 0; i < N; ++i) y1[i] = y[i] + dir * h * f0[i];
    if (!rhs(t + dir * h, y1, f1)) return std::max(c_.min_step, 1e-3 * h);
    double d2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk = scale(y[i], y[i]);
      d2 += ((f1[i] - f0[i]) / sk) * ((f1[i] - f0[i]) / sk);
    }
    d2 = std::sqrt(d2) / h;
    const double d = std::max(std::sqrt(d1), d2);
    const double h1 = d <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / d, 0.2);
    return std::min({100.0 * h, h1, c_.max_step});
  }

  template <class Rhs>
  bool attempt(const Rhs& rhs, double t, const Vec& y, const Vec& k1, double h, Vec& y_new, Vec& k7,
               double& err) const {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                     a76 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;

    Vec k2, k3, k4, k5, k6, tmp;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    if (!rhs(t + c2 * h, tmp, k2)) return false;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    if (!rhs(t + c3 * h, tmp, k3)) return false;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    if (!rhs(t + c4 * h, tmp, k4)) return false;
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    if (!rhs(t + c5 * h, tmp, k5)) return false;
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    if (!rhs(t + h, tmp, k6)) return false;
    for (std::size_t i = 0; i < N; ++i)
      y_new[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    if (!rhs(t + h, y_new, k7)) return false;

    double sum = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double r = e / scale(y[i], y_new[i]);
      sum += r * r;
    }
    err = std::sqrt(sum / N);
    return std::isfinite(err);
  }

  StepControls c_;
  double h_ = 0.0;
  double err_old_ = 1e-4;
  std::size_t accepted_ = 0;
  std::size_t rejected_ = 0;
};

}  // namespace tripleion
