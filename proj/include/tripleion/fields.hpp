#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <numbers>
#include <string>

#include "tripleion/errors.hpp"

namespace tripleion {

/// Linearly polarized pulse along z with a sin^2 envelope.
///
/// All values in atomic units. The carrier phase is plain data: ensembles draw
/// it per trajectory and copy the parameters.
struct FieldParams {
  double amplitude = 0.0;  ///< peak field strength F
  double omega = 1.0;      ///< carrier angular frequency
  double duration = 1.0;   ///< total pulse length T_d
  double phase = 0.0;      ///< carrier phase

  void validate() const {
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude))
      throw DomainError("field amplitude must be finite and >= 0");
    if (!(omega > 0.0) || !std::isfinite(omega))
      throw DomainError("field frequency must be > 0");
    if (!(duration > 0.0) || !std::isfinite(duration))
      throw DomainError("pulse duration must be > 0");
  }

  /// Absolute time corresponding to a fraction of the pulse duration.
  double time_at(double fraction) const { return fraction * duration; }
};

/// Pulse duration spanning `cycles` carrier periods.
inline double duration_from_cycles(double omega, double cycles) {
  return cycles * 2.0 * std::numbers::pi / omega;
}

namespace detail {
inline void check_inside_pulse(const FieldParams& params, double t) {
  if (!(t >= 0.0 && t <= params.duration))
    throw DomainError("time " + std::to_string(t) + " outside pulse [0, " +
                      std::to_string(params.duration) + "]");
}
}  // namespace detail

/// f_p(t) = sin^2(pi t / T_d).
inline double pulse_profile(const FieldParams& params, double t) {
  detail::check_inside_pulse(params, t);
  const double s = std::sin(std::numbers::pi * t / params.duration);
  return s * s;
}

/// f(t) = sin^2(pi t / T_d) cos(omega t + phase).
inline double envelope(const FieldParams& params, double t) {
  return pulse_profile(params, t) * std::cos(params.omega * t + params.phase);
}

/// df/dt inside the pulse.
inline double envelope_rate(const FieldParams& params, double t) {
  detail::check_inside_pulse(params, t);
  const double a = std::numbers::pi * t / params.duration;
  const double c = params.omega * t + params.phase;
  const double s = std::sin(a);
  return std::numbers::pi / params.duration * std::sin(2.0 * a) * std::cos(c) -
         s * s * params.omega * std::sin(c);
}

/// Time-dependent field F f(t), switched off (zero) outside [0, T_d].
///
/// This is the form the equations of motion use: trajectories continue
/// field-free after the pulse.
class PulsedField {
public:
  explicit PulsedField(FieldParams params) : params_(params) { params_.validate(); }

  double operator()(double t) const {
    if (t < 0.0 || t > params_.duration) return 0.0;
    return params_.amplitude * envelope(params_, t);
  }

  /// d(F f)/dt, zero outside the pulse.
  double rate(double t) const {
    if (t < 0.0 || t > params_.duration) return 0.0;
    return params_.amplitude * envelope_rate(params_, t);
  }

  /// (F f(t), d(F f)/dt) with one set of trigonometric evaluations.
  std::pair<double, double> evaluate(double t) const {
    if (t < 0.0 || t > params_.duration) return {0.0, 0.0};
    const double a = std::numbers::pi * t / params_.duration;
    const double c = params_.omega * t + params_.phase;
    const double sa = std::sin(a), ca = std::cos(a);
    const double sc = std::sin(c), cc = std::cos(c);
    const double f = sa * sa * cc;
    const double df = 2.0 * std::numbers::pi / params_.duration * sa * ca * cc - sa * sa * params_.omega * sc;
    return {params_.amplitude * f, params_.amplitude * df};
  }

  /// Time after which the field vanishes identically.
  double switch_off() const { return params_.duration; }

  const FieldParams& params() const { return params_; }

private:
  FieldParams params_;
};

/// Constant field, used for adiabatic and conservation tests.
class StaticField {
public:
  explicit StaticField(double value) : value_(value) {}
  double operator()(double) const { return value_; }
  double rate(double) const { return 0.0; }
  std::pair<double, double> evaluate(double) const { return {value_, 0.0}; }
  double switch_off() const { return std::numeric_limits<double>::infinity(); }

private:
  double value_;
};

/// Conversion factors of the amplitude scaling that maps the system at
/// amplitude F onto the one at F = 1:
///   r' = F^{1/2} r,  p' = F^{-1/4} p,  t' = F^{3/4} t,  E' = F^{-1/2} E,
///   omega' = F^{-3/4} omega.
struct ScaleFactors {
  double length;
  double momentum;
  double time;
  double energy;
  double frequency;

  static ScaleFactors for_amplitude(double amplitude) {
    if (!(amplitude > 0.0) || !std::isfinite(amplitude))
      throw DomainError("scaling requires a positive field amplitude");
    return {std::sqrt(amplitude), std::pow(amplitude, -0.25), std::pow(amplitude, 0.75),
            1.0 / std::sqrt(amplitude), std::pow(amplitude, -0.75)};
  }
};

enum class ScaleDirection { to_scaled, from_scaled };

/// Physical energy at amplitude F from a value in scaled units.
inline double energy_from_scaled(double scaled_energy, double amplitude) {
  return scaled_energy / ScaleFactors::for_amplitude(amplitude).energy;
}

/// Carrier frequency in scaled units.
inline double scaled_frequency(double omega, double amplitude) {
  return omega * ScaleFactors::for_amplitude(amplitude).frequency;
}

}  // namespace tripleion
