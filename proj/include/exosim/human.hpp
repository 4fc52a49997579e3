#pragma once

#include <Eigen/Dense>

#include "exosim/errors.hpp"
#include "exosim/walker.hpp"

namespace exosim {

// PD surrogate for the wearer: tracks half-cosine hip references that are
// re-anchored at each heel strike, which lets the stride period adapt to the
// dynamics while the reference rate shapes the cadence.
struct HumanModel {
  double kp = 170.0;             // N*m/rad
  double kd = 12.0;              // N*m*s/rad
  double ref_amplitude = 0.30;   // rad
  double ref_frequency_hz = 0.85;  // strides per second
  double ref_phase = 0.4;        // rad, swing lead inside the half-wave
  double pushoff_impulse = 0.0;  // N*m*s, generalized impulse at heel strike
  double slope_rom_gain = 1.2;   // amplitude scaling per rad of uphill slope

  // Grade awareness: braking hip drive on descents and push-off modulation
  // with grade.
  double slope_drive_gain = 45.0;   // N*m per rad of downhill slope
  double pushoff_slope_gain = 7.0;  // 1/rad scaling of the push-off impulse

  // Load-dependent roughness: above a comfort threshold the surrogate's
  // output picks up a physiological-tremor-band dither that grows toward the
  // strength limit; assistance that sheds load removes it.
  double tremor_threshold = 35.0;  // N*m, no dither below this load
  double strength_limit = 65.0;    // N*m, full dither at this load
  double tremor_gain = 12.0;       // N*m dither at full load
  double tremor_frequency_hz = 5.0;

  void validate() const;
};

/// Post-impact fixed point of the default surrogate on level ground; a
/// simulation seed that starts on the gait cycle.
WalkerState surrogate_gait_seed();

/// Role-ordered reference angles and velocities at time `now` for a step
/// anchored at `anchor` (time of the last heel strike). `amp_scale` and
/// `freq_scale` carry terrain adaptation.
struct HipReference {
  Vec2 angle;     // [stance, swing]
  Vec2 velocity;  // [stance, swing]
};
HipReference hip_reference(const HumanModel& model, double now, double anchor,
                           double amp_scale = 1.0, double freq_scale = 1.0);

/// PD tracking torque per leg, tau = kp (q_ref - q) + kd (qd_ref - qd),
/// plus the grade drive and the load-dependent tremor.
Vec2 human_torque(const WalkerState& state, const HumanModel& model,
                  double now, double anchor = 0.0, double amp_scale = 1.0,
                  double freq_scale = 1.0, double slope = 0.0);

/// Stateful wrapper that tracks the heel-strike anchor and terrain scaling.
/// Scaling changes ramp in over kScalingRampSeconds so a terrain change does
/// not yank the reference mid-step.
class HumanSurrogate {
 public:
  static constexpr double kScalingRampSeconds = 1.5;

  explicit HumanSurrogate(const HumanModel& model) : model_(model) {
    model.validate();
  }

  Vec2 torque(const WalkerState& state, double now) const {
    return human_torque(state, model_, now, anchor_, amp_scale(now),
                        freq_scale(now), slope(now));
  }

  void on_heel_strike(double event_time) { anchor_ = event_time; }

  /// Starts a ramp from the current scaling toward the given targets.
  void set_terrain_scaling(double amp_scale_target, double freq_scale_target,
                           double slope_target = 0.0, double now = 0.0) {
    amp_from_ = amp_scale(now);
    freq_from_ = freq_scale(now);
    slope_from_ = slope(now);
    amp_to_ = amp_scale_target;
    freq_to_ = freq_scale_target;
    slope_to_ = slope_target;
    ramp_t0_ = now;
  }
  void set_anchor(double t) { anchor_ = t; }

  double amp_scale(double now) const {
    return lerp(amp_from_, amp_to_, ramp_fraction(now));
  }
  double freq_scale(double now) const {
    return lerp(freq_from_, freq_to_, ramp_fraction(now));
  }
  double slope(double now) const {
    return lerp(slope_from_, slope_to_, ramp_fraction(now));
  }

  /// Push-off impulse for a strike at time `now`, scaled with the grade and
  /// never negative.
  double pushoff_at(double now) const {
    const double s = slope(now);
    return model_.pushoff_impulse *
           std::max(0.0, 1.0 + model_.pushoff_slope_gain * s);
  }

  const HumanModel& model() const { return model_; }

 private:
  static double lerp(double a, double b, double u) { return a + (b - a) * u; }
  double ramp_fraction(double now) const {
    if (now <= ramp_t0_) return 0.0;
    const double u = (now - ramp_t0_) / kScalingRampSeconds;
    return u >= 1.0 ? 1.0 : u;
  }

  HumanModel model_;
  double anchor_ = 0.0;
  double amp_from_ = 1.0, amp_to_ = 1.0;
  double freq_from_ = 1.0, freq_to_ = 1.0;
  double slope_from_ = 0.0, slope_to_ = 0.0;
  double ramp_t0_ = -1e9;
};

/// Surrogate effort measured on a logged trajectory, averaged over complete
/// non-overlapping gait cycles (heel strike to second-next heel strike).
struct EffortProxy {
  double positive_work_per_cycle = 0.0;  // J
  double sq_torque_per_cycle = 0.0;      // N^2 m^2 s
  int cycles = 0;
};

/// Throws AnalysisError unless the trajectory holds at least 3 full cycles.
EffortProxy effort_proxy(const HybridTrajectory& traj);

}  // namespace exosim
