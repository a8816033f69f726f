#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "tripleion/errors.hpp"
#include "tripleion/fields.hpp"
#include "tripleion/hamiltonians.hpp"
#include "tripleion/ode.hpp"
#include "tripleion/saddles.hpp"
#include "tripleion/stability.hpp"

namespace tripleion {

enum class Outcome { triple, double_ionization, single_ionization, bound, rejected };

inline std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::triple: return "triple";
    case Outcome::double_ionization: return "double";
    case Outcome::single_ionization: return "single";
    case Outcome::bound: return "bound";
    case Outcome::rejected: return "rejected";
  }
  return "?";
}

inline Outcome outcome_from_string(const std::string& s) {
  if (s == "triple") return Outcome::triple;
  if (s == "double") return Outcome::double_ionization;
  if (s == "single") return Outcome::single_ionization;
  if (s == "bound") return Outcome::bound;
  if (s == "rejected") return Outcome::rejected;
  throw DomainError("unknown outcome '" + s + "'");
}

struct PropagationControls {
  StepControls step;
  double r_escape_factor = 20.0;  ///< escape radius in units of the peak-field saddle radius
  double t_max_factor = 2.0;      ///< hard stop at t_max_factor * T_d
  /// C2v: once the on-axis electron is bound below -capture_energy it is
  /// pinned at the nucleus and the pair continues alone (triple excluded).
  double capture_energy = 20.0;
};

struct TrajectoryOutcome {
  Subspace subspace = Subspace::c3v;
  Outcome outcome = Outcome::rejected;
  double p_ion_parallel = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> final_state;  ///< coordinates then momenta
  double t_end = 0.0;
  /// |H(t) - H(t0) - integral of dH/dt| at termination; the energy drift for a
  /// static field.
  double energy_drift = 0.0;
  double min_distance = std::numeric_limits<double>::infinity();
  std::size_t steps = 0;
  std::size_t collisions = 0;  ///< passages of the on-axis electron through the nucleus (C2v)
  double phase = 0.0;
};

/// Escape radius for a pulse of peak amplitude F.
inline double escape_radius(double amplitude, const PropagationControls& c) {
  return c.r_escape_factor * c3v_saddle_radius(amplitude);
}

// ---------------------------------------------------------------------------
// Per-subspace adapters for the generic propagator. The integrated vector is
// (coordinates, momenta, W) with dW/dt = dH/dt = -(sum z_i) d(F f)/dt, so that
// H - W measures the integration error of a time-dependent Hamiltonian.

template <class State>
struct SubspaceTraits;

template <>
struct SubspaceTraits<C3vState> {
  static constexpr Subspace subspace = Subspace::c3v;
  static constexpr std::size_t size = 5;
  using Vec = StateVector<size>;

  static Vec pack(const C3vState& s, double w) { return {s.R, s.Z, s.pR, s.pZ, w}; }
  static C3vState unpack(const Vec& y, double t) { return {y[0], y[1], y[2], y[3], t}; }

  static bool rhs(const Vec& y, double field, double rate, Vec& dy) {
    const double R = y[0], Z = y[1];
    if (!(R > 0.0)) return false;
    const double r2 = R * R + Z * Z;
    const double r = std::sqrt(r2);
    const double c = 9.0 / (r2 * r);
    dy[0] = y[2] / kC3vMasses[0];
    dy[1] = y[3] / kC3vMasses[1];
    dy[2] = -(c * R - kSqrt3 / (R * R));
    dy[3] = -(c * Z - 3.0 * field);
    dy[4] = -3.0 * Z * rate;
    return std::isfinite(dy[2]) && std::isfinite(dy[3]);
  }

  static double hamiltonian(const Vec& y, double field) { return hamiltonian_c3v(unpack(y, 0.0), field); }
  static double min_distance(const Vec& y) { return std::hypot(y[0], y[1]); }
  static double ion_momentum(const Vec& y) { return -y[3]; }

  /// Electrons counted as escaped (0 or 3 by symmetry).
  static int escaped(const Vec& y, double r_escape) {
    const double r = std::hypot(y[0], y[1]);
    const double p2 = (y[2] * y[2] + y[3] * y[3]) / 9.0;
    return (r > r_escape && 0.5 * p2 - 3.0 / r > 0.0) ? 3 : 0;
  }

  /// Final outcome once the field is off, or nullopt while undecided.
  static std::optional<Outcome> settled(const Vec& y, double r_escape) {
    if (escaped(y, r_escape) == 3) return Outcome::triple;
    // Field-free H < 0 cannot reach the symmetric three-electron continuum.
    if (hamiltonian(y, 0.0) < 0.0) return Outcome::bound;
    return std::nullopt;
  }
};

template <>
struct SubspaceTraits<C2vState> {
  static constexpr Subspace subspace = Subspace::c2v;
  static constexpr std::size_t size = 7;
  using Vec = StateVector<size>;

  static Vec pack(const C2vState& s, double w) { return {s.x, s.z, s.z1, s.px, s.pz, s.pz1, w}; }
  static C2vState unpack(const Vec& y, double t) { return {y[0], y[1], y[2], y[3], y[4], y[5], t}; }

  static bool rhs(const Vec& y, double field, double rate, Vec& dy) {
    const double x = y[0], z = y[1], z1 = y[2];
    if (z1 == 0.0 || x == 0.0) return false;
    const double rho2 = x * x + z * z;
    const double rho3 = rho2 * std::sqrt(rho2);
    const double w = z - z1;
    const double d2 = x * x + w * w;
    const double d3 = d2 * std::sqrt(d2);
    const double sx = x > 0.0 ? 1.0 : -1.0;
    dy[0] = y[3] / kC2vMasses[0];
    dy[1] = y[4] / kC2vMasses[1];
    dy[2] = y[5] / kC2vMasses[2];
    dy[3] = -(6.0 * x / rho3 - 0.5 * sx / (x * x) - 2.0 * x / d3);
    dy[4] = -(6.0 * z / rho3 - 2.0 * w / d3 - 2.0 * field);
    dy[5] = -(std::copysign(3.0, z1) / (z1 * z1) + 2.0 * w / d3 - field);
    dy[6] = -(2.0 * z + z1) * rate;
    return std::isfinite(dy[3]) && std::isfinite(dy[4]) && std::isfinite(dy[5]);
  }

  static double hamiltonian(const Vec& y, double field) { return hamiltonian_c2v(unpack(y, 0.0), field); }
  static double min_distance(const Vec& y) { return std::min(std::abs(y[2]), std::hypot(y[0], y[1])); }
  static double ion_momentum(const Vec& y) { return -(y[4] + y[5]); }

  static bool axial_escaped(const Vec& y, double r_escape) {
    const double r = std::abs(y[2]);
    return r > r_escape && 0.5 * y[5] * y[5] - 3.0 / r > 0.0;
  }
  static bool pair_escaped(const Vec& y, double r_escape) {
    const double r = std::hypot(y[0], y[1]);
    // Each pair electron carries momentum (px/2, pz/2).
    return r > r_escape && 0.125 * (y[3] * y[3] + y[4] * y[4]) - 3.0 / r > 0.0;
  }
  static int escaped(const Vec& y, double r_escape) {
    return (axial_escaped(y, r_escape) ? 1 : 0) + (pair_escaped(y, r_escape) ? 2 : 0);
  }

  static double axial_energy(const Vec& y) { return 0.5 * y[5] * y[5] - 3.0 / std::abs(y[2]); }

  static std::optional<Outcome> settled(const Vec& y, double r_escape) { return settled(y, r_escape, axial_energy(y)); }

  /// `e_axial` is the on-axis single-electron energy, passed in when it is
  /// available in a better-conditioned form than from y.
  static std::optional<Outcome> settled(const Vec& y, double r_escape, double e_axial) {
    const bool axial = axial_escaped(y, r_escape);
    const bool pair = pair_escaped(y, r_escape);
    if (axial && pair) return Outcome::triple;
    if (axial) {
      const double rho = std::hypot(y[0], y[1]);
      const double e_pair = 0.25 * (y[3] * y[3] + y[4] * y[4]) - 6.0 / rho + 0.5 / std::abs(y[0]);
      if (e_pair < 0.0) return Outcome::single_ionization;
    }
    if (pair && e_axial < 0.0) return Outcome::double_ionization;
    return std::nullopt;
  }

};

/// C2v pair after capture of the on-axis electron, which is pinned at the
/// nucleus and screens one unit of charge. Vector (x, z, px, pz, W).
struct CapturedPairTraits {
  static constexpr std::size_t size = 5;
  using Vec = StateVector<size>;

  static bool rhs(const Vec& y, double field, double rate, Vec& dy) {
    const double x = y[0], z = y[1];
    if (x == 0.0) return false;
    const double rho2 = x * x + z * z;
    const double rho3 = rho2 * std::sqrt(rho2);
    dy[0] = y[2] / kC2vMasses[0];
    dy[1] = y[3] / kC2vMasses[1];
    dy[2] = -(4.0 * x / rho3 - 0.5 * std::copysign(1.0, x) / (x * x));
    dy[3] = -(4.0 * z / rho3 - 2.0 * field);
    dy[4] = -2.0 * z * rate;
    return std::isfinite(dy[2]) && std::isfinite(dy[3]);
  }

  static double hamiltonian(const Vec& y, double field) {
    const double rho = std::hypot(y[0], y[1]);
    return 0.25 * (y[2] * y[2] + y[3] * y[3]) - 4.0 / rho + 0.5 / std::abs(y[0]) - 2.0 * y[1] * field;
  }

  static bool pair_escaped(const Vec& y, double r_escape) {
    const double r = std::hypot(y[0], y[1]);
    return r > r_escape && 0.125 * (y[2] * y[2] + y[3] * y[3]) - 3.0 / r > 0.0;
  }

  static std::optional<Outcome> settled(const Vec& y, double r_escape) {
    if (pair_escaped(y, r_escape)) return Outcome::double_ionization;
    if (hamiltonian(y, 0.0) < 0.0) return Outcome::bound;
    return std::nullopt;
  }
};

inline Outcome outcome_from_count(int escaped) {
  switch (escaped) {
    case 3: return Outcome::triple;
    case 2: return Outcome::double_ionization;
    case 1: return Outcome::single_ionization;
    default: return Outcome::bound;
  }
}

/// Counts electrons beyond `r_escape` with positive single-particle energy
/// p^2/2 - 3/r.
inline Outcome classify(const C3vState& s, double r_escape) {
  using T = SubspaceTraits<C3vState>;
  return outcome_from_count(T::escaped(T::pack(s, 0.0), r_escape));
}

inline Outcome classify(const C2vState& s, double r_escape) {
  using T = SubspaceTraits<C2vState>;
  return outcome_from_count(T::escaped(T::pack(s, 0.0), r_escape));
}

template <class State>
Outcome classify(const State& s, const FieldParams& params, const PropagationControls& c = {}) {
  return classify(s, escape_radius(params.amplitude, c));
}

/// Parallel ion momentum of a triple-ionization outcome.
inline double ion_momentum(const TrajectoryOutcome& o) {
  if (o.outcome != Outcome::triple) throw DomainError("ion momentum is defined for triple ionization only");
  return o.p_ion_parallel;
}

struct NoObserver {
  template <class State>
  void operator()(const State&, double) const {}
};

namespace detail {

/// Trajectories still undecided at t_max are marginal and count as bound.
inline Outcome final_outcome(IntegrationStatus status, const std::optional<Outcome>& decided) {
  if (status == IntegrationStatus::step_underflow || status == IntegrationStatus::step_limit)
    return Outcome::rejected;
  return decided.value_or(Outcome::bound);
}

/// Direct integration in physical time, augmented with W.
template <class State, class Field, class Observer>
TrajectoryOutcome propagate_time(const State& initial, const Field& field, double t_max, double r_escape,
                                 const PropagationControls& controls, Observer& observer) {
  using T = SubspaceTraits<State>;
  using Vec = typename T::Vec;
  const auto rhs = [&field](double t, const Vec& y, Vec& dy) {
    const auto [value, rate] = field.evaluate(t);
    return T::rhs(y, value, rate, dy);
  };

  double t = initial.t;
  const double h0 = T::hamiltonian(T::pack(initial, 0.0), field.evaluate(t).first);
  Vec y = T::pack(initial, h0);
  const double field_off = field.switch_off();

  TrajectoryOutcome out;
  out.subspace = T::subspace;
  out.min_distance = T::min_distance(y);
  std::optional<Outcome> decided;

  auto after_step = [&](double& tt, Vec& yy) {
    out.min_distance = std::min(out.min_distance, T::min_distance(yy));
    observer(T::unpack(yy, tt), yy[T::size - 1]);
    if (tt >= field_off) {
      decided = T::settled(yy, r_escape);
      if (decided) return StepAction::stop;
    }
    return StepAction::proceed;
  };

  DormandPrince54<T::size> stepper(controls.step);
  IntegrationStatus status = IntegrationStatus::reached_end;
  // Land exactly on the switch-off time so the field-free phase starts cleanly.
  if (field_off > t && field_off < t_max) status = stepper.integrate(rhs, t, y, field_off, after_step);
  if (status == IntegrationStatus::reached_end && !decided) {
    if (t >= field_off) decided = T::settled(y, r_escape);
    if (!decided) status = stepper.integrate(rhs, t, y, t_max, after_step);
  }

  out.steps = stepper.accepted_steps();
  out.t_end = t;
  out.final_state.assign(y.begin(), y.end() - 1);
  out.energy_drift = std::abs(T::hamiltonian(y, field.evaluate(t).first) - y[T::size - 1]);
  out.outcome = final_outcome(status, decided);
  if (out.outcome == Outcome::triple) out.p_ion_parallel = T::ion_momentum(y);
  return out;
}

/// C2v equations with the on-axis electron regularised: z1 = sigma u^2 and
/// fictitious time s with dt/ds = g = u^2 / (1 + u^2), in the extended phase
/// space with P_t conjugate to t (P_t = -H on the physical surface). The head-on
/// collision with the nucleus becomes a smooth sign change of u; far from the
/// nucleus s runs like physical time.
///
/// Vector layout (u, x, z, p_u, p_x, p_z, t, P_t). The flow is generated by
/// Gamma = g (H + P_t) = (p_u^2/8 - 3)/(1 + u^2) + g (H_rest + P_t).
class RegularizedC2v {
public:
  static constexpr std::size_t size = 8;
  using Vec = StateVector<size>;
  using Plain = SubspaceTraits<C2vState>;

  explicit RegularizedC2v(double sigma) : sigma_(sigma) {}

  double sigma() const { return sigma_; }

  Vec pack(const C2vState& s, double hamiltonian) const {
    const double u = std::sqrt(std::abs(s.z1));
    return {u, s.x, s.z, 2.0 * sigma_ * u * s.pz1, s.px, s.pz, s.t, -hamiltonian};
  }

  /// Physical-time vector (x, z, z1, px, pz, pz1, W) with W = -P_t.
  Plain::Vec plain(const Vec& y) const {
    const double u = y[0];
    return {y[1], y[2], sigma_ * u * u, y[4], y[5], y[3] / (2.0 * sigma_ * u), -y[7]};
  }

  /// p_z1^2/2 - 3/|z1| without the cancellation near u = 0.
  static double axial_energy(const Vec& y) { return (0.125 * y[3] * y[3] - 3.0) / (y[0] * y[0]); }

  /// On-axis energy from the conserved extended Hamiltonian, -P_t - H_rest.
  /// Unlike axial_energy it stays well conditioned through the nucleus.
  double projected_axial_energy(const Vec& y, double field) const { return -y[7] - rest(y, field); }

  /// |H + P_t|, the distance from the physical energy surface.
  double residual(const Vec& y, double field) const {
    return std::abs(axial_energy(y) + rest(y, field) + y[7]);
  }

  /// Everything in H except the on-axis kinetic and nuclear terms.
  double rest(const Vec& y, double field) const {
    const double x = y[1], z = y[2], z1 = sigma_ * y[0] * y[0];
    return 0.25 * (y[4] * y[4] + y[5] * y[5]) - 6.0 / std::hypot(x, z) + 0.5 / std::abs(x) +
           2.0 / std::hypot(x, z - z1) - (2.0 * z + z1) * field;
  }

  template <class Field>
  bool rhs(const Field& field, const Vec& y, Vec& dy) const {
    const double u = y[0], x = y[1], z = y[2], pu = y[3], px = y[4], pz = y[5], t = y[6], pt = y[7];
    if (x == 0.0) return false;
    const auto [f, rate] = field.evaluate(t);
    const double u2 = u * u;
    const double q = 1.0 / (1.0 + u2);
    const double g = u2 * q;
    const double dg = 2.0 * u * q * q;
    const double z1 = sigma_ * u2;
    const double rho2 = x * x + z * z;
    const double rho = std::sqrt(rho2);
    const double w = z - z1;
    const double d2 = x * x + w * w;
    const double d = std::sqrt(d2);
    const double rho3 = rho2 * rho, d3 = d2 * d;
    const double h_rest = 0.25 * (px * px + pz * pz) - 6.0 / rho + 0.5 / std::abs(x) + 2.0 / d - (2.0 * z + z1) * f;
    const double gx = 6.0 * x / rho3 - 0.5 * std::copysign(1.0, x) / (x * x) - 2.0 * x / d3;
    const double gz = 6.0 * z / rho3 - 2.0 * w / d3 - 2.0 * f;
    const double gz1 = 2.0 * w / d3 - f;
    const double core = 0.125 * pu * pu - 3.0;
    dy[0] = 0.25 * pu * q;
    dy[1] = 0.5 * g * px;
    dy[2] = 0.5 * g * pz;
    dy[3] = -(-2.0 * u * q * q * core + dg * (h_rest + pt) + 2.0 * sigma_ * u * g * gz1);
    dy[4] = -g * gx;
    dy[5] = -g * gz;
    dy[6] = g;
    dy[7] = g * (2.0 * z + z1) * rate;
    for (const double v : dy)
      if (!std::isfinite(v)) return false;
    return true;
  }

private:
  double sigma_;
};

template <class Field, class Observer>
TrajectoryOutcome propagate_regularized(const C2vState& initial, const Field& field, double t_max,
                                        double r_escape, const PropagationControls& controls,
                                        Observer& observer) {
  using Plain = SubspaceTraits<C2vState>;
  using Vec = RegularizedC2v::Vec;
  check_c2v(initial.x, initial.z, initial.z1);
  const RegularizedC2v sys(initial.z1 > 0.0 ? 1.0 : -1.0);
  const auto rhs = [&](double, const Vec& y, Vec& dy) { return sys.rhs(field, y, dy); };

  const double h0 = hamiltonian_c2v(initial, field.evaluate(initial.t).first);
  Vec y = sys.pack(initial, h0);
  const double field_off = field.switch_off();

  TrajectoryOutcome out;
  out.subspace = Subspace::c2v;
  out.min_distance = Plain::min_distance(Plain::pack(initial, h0));
  std::optional<Outcome> decided;

  bool captured = false;
  auto after_step = [&](double&, Vec& yy) {
    const double t = yy[6];
    const auto p = sys.plain(yy);
    out.min_distance = std::min(out.min_distance, Plain::min_distance(p));
    observer(Plain::unpack(p, t), p[6]);
    const double e_axial = sys.projected_axial_energy(yy, field.evaluate(t).first);
    // Tested in the outer half of the bound orbit, where the state is well
    // conditioned.
    if (e_axial < -controls.capture_energy && std::abs(p[2]) * -e_axial >= 1.5) {
      captured = true;
      return StepAction::stop;
    }
    if (t >= field_off) {
      decided = Plain::settled(p, r_escape, e_axial);
      if (decided) return StepAction::stop;
    }
    return t >= t_max ? StepAction::stop : StepAction::proceed;
  };

  // Counts sign changes of u through the accepted steps.
  double last_u = y[0];
  auto track = [&](double& s, Vec& yy) {
    if ((yy[0] > 0.0) != (last_u > 0.0)) ++out.collisions;
    last_u = yy[0];
    return after_step(s, yy);
  };

  DormandPrince54<RegularizedC2v::size> stepper(controls.step);
  double s = 0.0;
  IntegrationStatus status = IntegrationStatus::reached_end;
  if (y[6] < t_max) status = stepper.integrate(rhs, s, y, std::numeric_limits<double>::infinity(), track);

  const auto p = sys.plain(y);
  out.steps = stepper.accepted_steps();
  out.t_end = y[6];
  out.final_state.assign(p.begin(), p.end() - 1);
  out.energy_drift = sys.residual(y, field.evaluate(y[6]).first);
  const bool failed = status == IntegrationStatus::step_underflow || status == IntegrationStatus::step_limit;
  if (!captured || failed) {
    out.outcome = final_outcome(status, decided);
    if (out.outcome == Outcome::triple) out.p_ion_parallel = Plain::ion_momentum(p);
    return out;
  }

  // Pair alone around the screened nucleus; the final state keeps the
  // on-axis electron as it was at capture.
  using Pair = CapturedPairTraits;
  double t = y[6];
  Pair::Vec q{p[0], p[1], p[3], p[4], 0.0};
  q[4] = Pair::hamiltonian(q, field.evaluate(t).first);
  const auto pair_rhs = [&field](double tt, const Pair::Vec& v, Pair::Vec& dv) {
    const auto [value, rate] = field.evaluate(tt);
    return Pair::rhs(v, value, rate, dv);
  };
  auto pair_after = [&](double& tt, Pair::Vec& v) {
    out.min_distance = std::min(out.min_distance, std::hypot(v[0], v[1]));
    if (tt >= field_off) {
      decided = Pair::settled(v, r_escape);
      if (decided) return StepAction::stop;
    }
    return StepAction::proceed;
  };
  DormandPrince54<Pair::size> pair_stepper(controls.step);
  status = IntegrationStatus::reached_end;
  if (t >= field_off) decided = Pair::settled(q, r_escape);
  if (!decided && field_off > t && field_off < t_max)
    status = pair_stepper.integrate(pair_rhs, t, q, field_off, pair_after);
  if (status == IntegrationStatus::reached_end && !decided) status = pair_stepper.integrate(pair_rhs, t, q, t_max, pair_after);

  out.steps += pair_stepper.accepted_steps();
  out.t_end = t;
  out.final_state[0] = q[0];
  out.final_state[1] = q[1];
  out.final_state[3] = q[2];
  out.final_state[4] = q[3];
  out.energy_drift = std::max(out.energy_drift, std::abs(Pair::hamiltonian(q, field.evaluate(t).first) - q[4]));
  out.outcome = final_outcome(status, decided);
  return out;
}

}  // namespace detail

/// Integrates `state` under `field` until `t_max`, stopping early once the
/// field is off (t >= field.switch_off()) and the outcome is settled.
///
/// `observer(state, W)` sees every accepted step, W being the integrated
/// energy change added to the initial energy. Step-size underflow or the step
/// limit yields Outcome::rejected.
template <class State, class Field, class Observer = NoObserver>
TrajectoryOutcome propagate_in(const State& initial, const Field& field, double t_max, double r_escape,
                               const PropagationControls& controls, Observer&& observer = {}) {
  if constexpr (std::is_same_v<State, C2vState>)
    return detail::propagate_regularized(initial, field, t_max, r_escape, controls, observer);
  else
    return detail::propagate_time(initial, field, t_max, r_escape, controls, observer);
}

/// Full protocol: pulsed field from the state's time to T_d, then field-free
/// until the outcome settles or t_max_factor * T_d.
template <class State, class Observer = NoObserver>
TrajectoryOutcome propagate(const State& initial, const FieldParams& params,
                            const PropagationControls& controls = {}, Observer&& observer = {}) {
  params.validate();
  if (!(initial.t >= 0.0 && initial.t <= params.duration))
    throw DomainError("initial time outside the pulse");
  TrajectoryOutcome out =
      propagate_in(initial, PulsedField(params), controls.t_max_factor * params.duration,
                   escape_radius(params.amplitude, controls), controls, std::forward<Observer>(observer));
  out.phase = params.phase;
  return out;
}

/// Plain integration to `t_end` (forward or backward) without classification.
template <class State, class Field>
State integrate_state(const State& initial, const Field& field, double t_end, const StepControls& controls = {}) {
  using T = SubspaceTraits<State>;
  using Vec = typename T::Vec;
  const auto rhs = [&field](double t, const Vec& y, Vec& dy) {
    const auto [value, rate] = field.evaluate(t);
    return T::rhs(y, value, rate, dy);
  };
  double t = initial.t;
  Vec y = T::pack(initial, 0.0);
  DormandPrince54<T::size> stepper(controls);
  const auto status = stepper.integrate(rhs, t, y, t_end);
  if (status != IntegrationStatus::reached_end) throw DomainError("integration failed before t_end");
  return T::unpack(y, t);
}

}  // namespace tripleion
