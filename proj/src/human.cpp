#include "exosim/human.hpp"

#include <algorithm>
#include <cmath>

namespace exosim {

void HumanModel::validate() const {
  if (kp < 0.0 || kd < 0.0) throw ConfigError("PD gains must be >= 0");
  if (!(ref_amplitude < M_PI / 3.0))
    throw ConfigError("reference amplitude must stay below pi/3");
  if (!(ref_frequency_hz > 0.0))
    throw ConfigError("reference frequency must be positive");
  if (tremor_threshold < 0.0 || tremor_gain < 0.0 || tremor_frequency_hz < 0.0)
    throw ConfigError("tremor parameters must be non-negative");
  if (tremor_gain > 0.0 && !(strength_limit > tremor_threshold))
    throw ConfigError("strength limit must exceed the tremor threshold");
}

HipReference hip_reference(const HumanModel& model, double now, double anchor,
                           double amp_scale, double freq_scale) {
  const double f = model.ref_frequency_hz * freq_scale;
  const double amp = model.ref_amplitude * amp_scale;
  // One step spans half a reference cycle: stance sweeps +amp -> -amp. The
  // swing reference leads by ref_phase so the swing foot clears the ground
  // after the legs cross and plants at full splay, the way a real swing leg
  // finishes ahead of the trunk's roll-over.
  const double theta = M_PI * 2.0 * f * (now - anchor);
  const double w = M_PI * 2.0 * f;

  // Stumble reflex: when the expected strike is overdue the swing target
  // alternates between a shortened and a lengthened stride until the foot
  // finds ground again. Depends only on the time since the last strike, so
  // it stays pure.
  const double nominal_step = 0.5 / f;
  const double overdue = (now - anchor) - 2.2 * nominal_step;
  double swing_gain = 1.0;
  if (overdue > 0.0) {
    const int phase = static_cast<int>(overdue / nominal_step);
    swing_gain = (phase % 2 == 0) ? 0.5 : 1.35;
  }

  HipReference r;
  r.angle = {amp * std::cos(theta),
             -amp * swing_gain * std::cos(theta + model.ref_phase)};
  r.velocity = {-amp * w * std::sin(theta),
                amp * swing_gain * w * std::sin(theta + model.ref_phase)};
  return r;
}

Vec2 human_torque(const WalkerState& state, const HumanModel& model,
                  double now, double anchor, double amp_scale,
                  double freq_scale, double slope) {
  const HipReference r =
      hip_reference(model, now, anchor, amp_scale, freq_scale);
  Vec2 pd{model.kp * (r.angle(0) - state.q1) +
              model.kd * (r.velocity(0) - state.dq1),
          model.kp * (r.angle(1) - state.q2) +
              model.kd * (r.velocity(1) - state.dq2)};
  // Grade drive: braking flexion on descents; climbs stay PD-driven, where
  // shed load is what the assistance gradient acts on.
  if (slope < 0.0) pd(0) += -model.slope_drive_gain * slope;
  if (model.tremor_gain > 0.0 &&
      model.strength_limit > model.tremor_threshold) {
    // Whole-body dither driven by the worst channel load (a struggling
    // wearer co-contracts); quadratic growth over the comfort band keeps
    // easy gait clean.
    const double w = 2.0 * M_PI * model.tremor_frequency_hz;
    const double band = model.strength_limit - model.tremor_threshold;
    const double peak = std::max(std::abs(pd(0)), std::abs(pd(1)));
    const double load = std::clamp((peak - model.tremor_threshold) / band,
                                   0.0, 1.0);
    const double amp = model.tremor_gain * load * load;
    pd(0) += amp * std::sin(w * now);
    pd(1) += amp * std::sin(w * now + M_PI / 3.0);
  }
  return pd;
}

WalkerState surrogate_gait_seed() {
  WalkerState s;
  s.q1 = 0.233545;
  s.q2 = -0.233545;
  s.dq1 = -1.277684;
  s.dq2 = -0.808807;
  return s;
}

EffortProxy effort_proxy(const HybridTrajectory& traj) {
  const auto& events = traj.heel_strike_times;
  // A complete cycle runs from one heel strike to the second-next one;
  // consecutive cycles share only their boundary.
  const int n_cycles = events.size() >= 3
                           ? static_cast<int>((events.size() - 1) / 2)
                           : 0;
  if (n_cycles < 3)
    throw AnalysisError("effort proxy needs at least 3 full gait cycles");

  const double t_begin = events.front();
  const double t_end = events[static_cast<size_t>(2 * n_cycles)];

  double pos_work = 0.0, sq_torque = 0.0;
  const auto& s = traj.samples;
  for (size_t i = 1; i < s.size(); ++i) {
    const double t0 = s[i - 1].state.time, t1 = s[i].state.time;
    if (t1 <= t_begin || t0 >= t_end) continue;
    const double h = t1 - t0;
    auto pos_power = [](const TrajectorySample& smp) {
      return std::max(smp.tau_human[0] * smp.state.dq1, 0.0) +
             std::max(smp.tau_human[1] * smp.state.dq2, 0.0);
    };
    auto sq = [](const TrajectorySample& smp) {
      return smp.tau_human[0] * smp.tau_human[0] +
             smp.tau_human[1] * smp.tau_human[1];
    };
    pos_work += 0.5 * h * (pos_power(s[i - 1]) + pos_power(s[i]));
    sq_torque += 0.5 * h * (sq(s[i - 1]) + sq(s[i]));
  }

  EffortProxy e;
  e.cycles = n_cycles;
  e.positive_work_per_cycle = pos_work / n_cycles;
  e.sq_torque_per_cycle = sq_torque / n_cycles;
  return e;
}

}  // namespace exosim
