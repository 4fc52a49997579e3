#include "exosim/closedloop.hpp"

namespace exosim {

SimControllers ClosedLoop::controllers() {
  SimControllers c;
  c.human = [this](double t, const WalkerState& s) {
    return human_.torque(s, t);
  };
  if (exo_) {
    c.exo_rate_hz = exo_->config().control_rate_hz;
    c.exo_tick = [this](double t, const Vec2& leg_vel) {
      return exo_->tick({leg_vel(0), leg_vel(1)}, t).torque;
    };
  }
  c.on_heel_strike = [this](WalkerState& post, const WalkerState&) {
    const double p = human_.pushoff_at(post.time);
    human_.on_heel_strike(post.time);
    if (p != 0.0) {
      // Positive impulse aids forward progression (stance rotation is
      // negative while walking forward).
      post = apply_generalized_impulse(post, params_, Vec2(-p, 0.0));
    }
  };
  return c;
}

}  // namespace exosim

#include "exosim/adaptive.hpp"

#include <algorithm>
#include <cmath>

namespace exosim {

AdaptiveLoop::AdaptiveLoop(const Config& config, const OptimizerParams& opt,
                           std::uint64_t seed, double initial_beta)
    : config_(config),
      optimizer_(opt, seed),
      beta_(std::clamp(initial_beta, opt.beta_min, opt.beta_max)),
      window_samples_(static_cast<size_t>(
          std::llround(config.window_span_s * config.sample_rate_hz))) {
  if (window_samples_ < 8) throw ConfigError("observation window too short");
  buf_a_.reserve(window_samples_);
  buf_b_.reserve(window_samples_);
}

bool AdaptiveLoop::push(double t, double angle_leg_a, double angle_leg_b) {
  if (buf_a_.empty()) window_t0_ = t;
  buf_a_.push_back(angle_leg_a);
  buf_b_.push_back(angle_leg_b);
  if (buf_a_.size() < window_samples_) return false;

  TrialRecord trial;
  trial.t_start = window_t0_;
  trial.beta = beta_;
  trial.features = extract_features(buf_a_, buf_b_, config_.sample_rate_hz,
                                    config_.window_span_s,
                                    config_.filter_cutoff_hz);
  trial.objective = objective(trial.features, optimizer_.params().rom_scale,
                              optimizer_.params().jerk_scale);
  optimizer_.observe(trial);
  trials_.push_back(trial);

  const double suggestion = optimizer_.suggest();
  const double lo = std::max(optimizer_.params().beta_min,
                             beta_ - config_.slew_per_window);
  const double hi = std::min(optimizer_.params().beta_max,
                             beta_ + config_.slew_per_window);
  beta_ = std::clamp(suggestion, lo, hi);

  buf_a_.clear();
  buf_b_.clear();
  if (on_window) on_window(trial, beta_);
  return true;
}

}  // namespace exosim
