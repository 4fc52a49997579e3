#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>

#include "exosim/errors.hpp"
#include "exosim/filter.hpp"
#include "exosim/walker.hpp"

namespace exosim {

// Negative virtual damping assistance: hip torques proportional to the
// filtered hip velocities through the coupling matrix R = [1 -1; 0 1],
// scaled by the damping factor beta and clamped to the actuator limit.
struct ExoConfig {
  double beta = 2.3;            // N*m*s/rad
  double beta_min = 1.0;
  double beta_max = 2.5;
  double filter_cutoff_hz = 4.0;
  double control_rate_hz = 500.0;
  double torque_limit_nm = 32.0;
  double deadband_rads = 0.05;  // velocity dead-band for role switching
  double debounce_s = 0.2;      // minimum interval between role switches

  void validate() const;
};

enum class Leg : int { A = 0, B = 1 };

struct LegRoleState {
  Leg stance_leg = Leg::A;
  double last_switch_time = -1e9;
};

/// Stance/swing assignment from the signs of the filtered hip velocities:
/// the extending leg (negative velocity) is stance while the other flexes.
/// Ambiguous sign patterns (same sign, or either magnitude inside the
/// dead-band) keep the previous assignment; switches are debounced.
LegRoleState classify_legs(const std::array<double, 2>& filtered_velocities,
                           const LegRoleState& prev, double now,
                           double deadband_rads, double debounce_s);

/// Torque law on role-ordered velocities [stance; swing]:
///   G1 = beta * (v_stance - v_swing),  G2 = beta * v_swing.
Vec2 exo_torque(const Vec2& ordered_velocities, double beta);

/// Componentwise clamp to [-limit, limit].
Vec2 saturate(const Vec2& torque, double limit);

struct ControlTickResult {
  Vec2 torque = Vec2::Zero();  // physical leg order [A, B]
  std::array<double, 2> filtered{0.0, 0.0};
  LegRoleState role;
};

/// Streaming controller: filter -> classify -> order -> torque -> saturate,
/// with exoskeleton energy accounting. One instance per simulated device;
/// advance it at config.control_rate_hz with raw velocities in physical leg
/// order.
class NegativeDampingController {
 public:
  explicit NegativeDampingController(const ExoConfig& config);

  /// One control tick. `raw_velocities` in physical [A, B] order.
  ControlTickResult tick(const std::array<double, 2>& raw_velocities,
                         double now);

  void set_beta(double beta);
  double beta() const { return beta_; }

  const ExoConfig& config() const { return config_; }
  const LegRoleState& role_state() const { return role_; }
  const EnergyLedger& ledger() const { return ledger_; }

  /// Adds surrogate-side work so the ledger carries the full system total.
  void add_human_energy(double joules) { ledger_.e_human += joules; }

 private:
  ExoConfig config_;
  double beta_;
  FilterState filter_;
  LegRoleState role_;
  EnergyLedger ledger_;
  double last_tick_time_ = 0.0;
  double last_power_ = 0.0;
  bool has_last_ = false;
};

/// Functional form of one tick for callers that manage state explicitly.
std::tuple<Vec2, FilterState, LegRoleState> control_tick(
    const std::array<double, 2>& raw_velocities, const ExoConfig& config,
    FilterState filter_state, LegRoleState role_state, double now);

}  // namespace exosim
