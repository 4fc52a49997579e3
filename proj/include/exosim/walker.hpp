#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "exosim/errors.hpp"

namespace exosim {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Terrain height above world y = 0 as a function of world x.
using TerrainFn = std::function<double(double)>;

/// h(x) = -tan(slope) * x. Positive slope descends in the walking (+x)
/// direction, which is the configuration that sustains passive gait.
TerrainFn slope_terrain(double slope_rad);

/// Terrain so far below the feet that no contact can occur.
TerrainFn no_contact_terrain();

// Planar compass walker: two rigid legs joined at the hip, point feet,
// point masses (one per leg CoM, one at the hip).
struct WalkerParams {
  double leg_mass = 5.0;      // kg
  double hip_mass = 10.0;     // kg
  double leg_length = 1.0;    // m
  double com_offset_a = 0.5;  // m, stance foot -> leg CoM
  double com_offset_b = 0.5;  // m, leg CoM -> hip
  double gravity = 9.81;      // m/s^2
  double ground_slope = 0.0;  // rad, positive = downhill in +x

  void validate() const;
};

// Leg angles are absolute, measured at the hip from the downward vertical,
// positive when the leg's foot is ahead (+x) of the hip. Hip flexion is
// positive and increasing; the stance leg extends (negative velocity) while
// the swing leg flexes (positive velocity) during forward walking.
struct WalkerState {
  double q1 = 0.0;   // rad, stance leg
  double q2 = 0.0;   // rad, swing leg
  double dq1 = 0.0;  // rad/s
  double dq2 = 0.0;  // rad/s
  double stance_foot_x = 0.0;  // m
  double time = 0.0;           // s

  bool finite() const;
};

constexpr double kVelocitySanityBound = 50.0;  // rad/s

struct TrajectorySample {
  WalkerState state;
  std::array<double, 2> tau_exo{0.0, 0.0};    // N*m, [stance, swing] ordering
  std::array<double, 2> tau_human{0.0, 0.0};  // N*m, [stance, swing] ordering
  bool event = false;  // heel strike applied at this sample
};

struct EnergyLedger {
  double e_exo = 0.0;    // J, integral of exo torque power
  double e_human = 0.0;  // J, integral of surrogate torque power
  double e_total() const { return e_exo + e_human; }
};

struct HybridTrajectory {
  std::vector<TrajectorySample> samples;
  std::vector<double> heel_strike_times;
  EnergyLedger energy;

  double duration() const {
    return samples.empty() ? 0.0
                           : samples.back().state.time - samples.front().state.time;
  }
};

// ---------------------------------------------------------------------------
// Continuous dynamics
// ---------------------------------------------------------------------------

/// Mass matrix M(q), Coriolis/centrifugal vector h(q, qd) = C(q, qd) qd and
/// gravity vector g(q) of the pivoted two-link model, so that
/// M qdd + h + g = tau.
void dynamics_terms(const WalkerState& s, const WalkerParams& p, Mat2& M,
                    Vec2& h, Vec2& g);

/// Angular accelerations (q1dd, q2dd) for hip torques tau = [tau1, tau2]
/// acting on the stance and swing coordinates.
Vec2 continuous_dynamics(const WalkerState& s, const WalkerParams& p,
                         const Vec2& tau);

/// Kinetic energy about the current stance pivot.
double kinetic_energy(const WalkerState& s, const WalkerParams& p);

/// Potential energy with the stance foot as height reference.
double potential_energy(const WalkerState& s, const WalkerParams& p);

double total_energy(const WalkerState& s, const WalkerParams& p);

/// Hip height above the stance foot; used for fall detection.
double hip_height(const WalkerState& s, const WalkerParams& p);

/// Mass-weighted CoM position relative to the stance foot.
Vec2 com_position(const WalkerState& s, const WalkerParams& p);

// ---------------------------------------------------------------------------
// Hybrid events
// ---------------------------------------------------------------------------

/// Signed swing-foot clearance above the terrain (m). Negative means the
/// swing foot is below ground, which happens benignly around mid-stance in a
/// straight-legged model.
double heel_strike_guard(const WalkerState& s, const WalkerParams& p,
                         const TerrainFn& terrain);

/// Angle threshold below which a guard crossing is treated as a mid-stance
/// scuff instead of a heel strike.
constexpr double kScuffAngleThreshold = 0.05;  // rad

/// True if a guard zero at this state counts as a real heel strike:
/// swing foot ahead of the stance foot and legs spread beyond the scuff
/// threshold.
bool heel_strike_admissible(const WalkerState& s, const WalkerParams& p);

/// Instantaneous inelastic support exchange. Angles swap roles; velocities
/// map through conservation of the system's angular momentum about the new
/// contact and of the trailing leg's angular momentum about the hip. The
/// stance foot advances by the step length. Throws SimulationError
/// (Degenerate) if the impact system is singular.
WalkerState impact_map(const WalkerState& s, const WalkerParams& p);

/// The velocity part of the impact: w = impact_velocity_map(q) * u, where u
/// holds pre-impact rates in pre-impact roles and w post-impact rates in
/// post-impact roles.
Mat2 impact_velocity_map(const WalkerState& s, const WalkerParams& p);

/// Velocity change from a generalized angular impulse (N*m*s) on the role
/// coordinates: qd += M(q)^-1 * impulse.
WalkerState apply_generalized_impulse(const WalkerState& s,
                                      const WalkerParams& p,
                                      const Vec2& impulse);

// ---------------------------------------------------------------------------
// Integration
// ---------------------------------------------------------------------------

/// Hip torque as a function of time and state, in [stance, swing] order.
using TorqueFn = std::function<Vec2(double t, const WalkerState&)>;

struct StepResult {
  WalkerState state;         // at the end of the step (fixed time grid)
  bool event = false;
  double event_time = 0.0;   // valid when event
  WalkerState pre_impact;    // valid when event
  WalkerState post_impact;   // valid when event
};

constexpr double kEventTimeTolerance = 1e-9;  // s

/// One fixed-step RK4 step with heel-strike detection. If the guard crosses
/// zero inside the step the event time is located by bisection to
/// kEventTimeTolerance, the impact map is applied and the returned state sits
/// at the event time. dt must lie in (0, 0.01].
StepResult step(const WalkerState& s, const WalkerParams& p,
                const TorqueFn& torque, const TerrainFn& terrain, double dt);

// ---------------------------------------------------------------------------
// Closed-loop simulation
// ---------------------------------------------------------------------------

/// Callbacks a simulation run needs from the controller layer. All optional;
/// a default-constructed set simulates the passive walker.
struct SimControllers {
  /// Continuous surrogate torque, evaluated inside integrator stages.
  TorqueFn human;
  /// Sampled exoskeleton controller: called at its own rate with raw leg
  /// velocities in physical-leg order; returns held torques (physical order).
  std::function<Vec2(double t, const Vec2& leg_velocities)> exo_tick;
  double exo_rate_hz = 500.0;
  /// Notified after each applied heel strike (new state, pre-impact state).
  /// May adjust the post-impact state, e.g. to add a push-off impulse.
  std::function<void(WalkerState&, const WalkerState&)> on_heel_strike;
  /// Called once per integrator grid sample (fixed rate) with the current
  /// state and the physical identity of the stance leg.
  std::function<void(const WalkerState&, bool stance_is_leg_a)> on_sample;
};

struct SimOptions {
  double dt = 1e-3;          // s
  double duration = 10.0;    // s
  bool record = true;
  double fall_hip_height_fraction = 0.5;  // of leg length
};

/// Runs the closed loop and logs every integrator step. Deterministic for
/// identical inputs. Throws SimulationError on divergence or a fall.
HybridTrajectory simulate(const WalkerState& initial, const WalkerParams& p,
                          const SimControllers& controllers,
                          const TerrainFn& terrain, const SimOptions& opts);

// ---------------------------------------------------------------------------
// Limit cycle search
// ---------------------------------------------------------------------------

struct LimitCycleResult {
  bool converged = false;
  WalkerState fixed_point;    // post-impact state on the Poincare section
  double step_period = 0.0;   // s
  int strides = 0;
  double final_delta = 0.0;   // state-space distance of the last iterate
  std::string message;
};

struct LimitCycleOptions {
  double tolerance = 1e-6;
  int max_strides = 500;
  double dt = 1e-3;
  double max_step_duration = 3.0;  // s without a heel strike => divergence
};

/// Iterates the step-to-step (Poincare) return map from an initial guess.
/// Controllers may be stateful; their state is carried across strides.
LimitCycleResult find_limit_cycle(const WalkerState& guess,
                                  const WalkerParams& p,
                                  const SimControllers& controllers,
                                  const TerrainFn& terrain,
                                  const LimitCycleOptions& opts = {});

/// Post-impact fixed point of the canonical passive walker on a 3 deg slope,
/// usable as a simulation seed state.
WalkerState passive_gait_seed();

}  // namespace exosim
