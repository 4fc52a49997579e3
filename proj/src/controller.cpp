#include "exosim/controller.hpp"

#include <algorithm>
#include <cmath>

namespace exosim {

void ExoConfig::validate() const {
  if (!(beta_min <= beta && beta <= beta_max))
    throw ConfigError("beta must lie within [beta_min, beta_max]");
  if (!(filter_cutoff_hz > 0.0) ||
      !(filter_cutoff_hz < 0.5 * control_rate_hz))
    throw ConfigError("filter cutoff must lie below control_rate/2");
  if (!(torque_limit_nm > 0.0)) throw ConfigError("torque limit must be > 0");
  if (!(control_rate_hz > 0.0)) throw ConfigError("control rate must be > 0");
  if (deadband_rads < 0.0 || debounce_s < 0.0)
    throw ConfigError("deadband and debounce must be non-negative");
}

LegRoleState classify_legs(const std::array<double, 2>& v,
                           const LegRoleState& prev, double now,
                           double deadband_rads, double debounce_s) {
  const double va = v[0], vb = v[1];
  std::optional<Leg> wanted;
  if (va < -deadband_rads && vb > deadband_rads) wanted = Leg::A;
  if (vb < -deadband_rads && va > deadband_rads) wanted = Leg::B;

  LegRoleState next = prev;
  if (wanted && *wanted != prev.stance_leg &&
      now - prev.last_switch_time >= debounce_s) {
    next.stance_leg = *wanted;
    next.last_switch_time = now;
  }
  return next;
}

Vec2 exo_torque(const Vec2& ordered_velocities, double beta) {
  // Gamma = beta * R * qd with R = [1 -1; 0 1].
  return {beta * (ordered_velocities(0) - ordered_velocities(1)),
          beta * ordered_velocities(1)};
}

Vec2 saturate(const Vec2& torque, double limit) {
  return {std::clamp(torque(0), -limit, limit),
          std::clamp(torque(1), -limit, limit)};
}

NegativeDampingController::NegativeDampingController(const ExoConfig& config)
    : config_(config),
      beta_(config.beta),
      filter_(FilterState::design(config.filter_cutoff_hz,
                                  config.control_rate_hz)) {
  config_.validate();
}

void NegativeDampingController::set_beta(double beta) {
  beta_ = std::clamp(beta, config_.beta_min, config_.beta_max);
}

ControlTickResult NegativeDampingController::tick(
    const std::array<double, 2>& raw, double now) {
  ControlTickResult out;
  out.filtered = filter_(raw);
  role_ = classify_legs(out.filtered, role_, now, config_.deadband_rads,
                        config_.debounce_s);
  out.role = role_;

  const int st = static_cast<int>(role_.stance_leg);
  const int sw = 1 - st;
  const Vec2 ordered(out.filtered[st], out.filtered[sw]);
  const Vec2 role_torque =
      saturate(exo_torque(ordered, beta_), config_.torque_limit_nm);

  Vec2 physical;
  physical(st) = role_torque(0);
  physical(sw) = role_torque(1);
  out.torque = physical;

  // Trapezoidal integration of P(t) = Gamma . qdot using raw velocities.
  const double power = physical(0) * raw[0] + physical(1) * raw[1];
  if (has_last_)
    ledger_.e_exo += 0.5 * (now - last_tick_time_) * (last_power_ + power);
  last_tick_time_ = now;
  last_power_ = power;
  has_last_ = true;
  return out;
}

std::tuple<Vec2, FilterState, LegRoleState> control_tick(
    const std::array<double, 2>& raw, const ExoConfig& config,
    FilterState filter_state, LegRoleState role_state, double now) {
  const auto filtered = filter_state(raw);
  const LegRoleState role = classify_legs(
      filtered, role_state, now, config.deadband_rads, config.debounce_s);
  const int st = static_cast<int>(role.stance_leg);
  const int sw = 1 - st;
  const Vec2 ordered(filtered[st], filtered[sw]);
  const Vec2 role_torque =
      saturate(exo_torque(ordered, config.beta), config.torque_limit_nm);
  Vec2 physical;
  physical(st) = role_torque(0);
  physical(sw) = role_torque(1);
  return {physical, filter_state, role};
}

}  // namespace exosim
