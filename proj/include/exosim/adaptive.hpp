#pragma once

#include <functional>
#include <vector>

#include "exosim/bayesopt.hpp"

namespace exosim {

/// Windowed adaptation of the assistance gain over a live kinematic stream.
/// Feed leg angle samples at a fixed rate; every closed observation window
/// produces a trial record for the gain that was active and the next gain is
/// applied with a slew limit.
class AdaptiveLoop {
 public:
  struct Config {
    double window_span_s = 2.0;
    double sample_rate_hz = 1000.0;
    double slew_per_window = 0.5;  // max gain change between windows
    double filter_cutoff_hz = 4.0;
  };

  AdaptiveLoop(const Config& config, const OptimizerParams& opt,
               std::uint64_t seed, double initial_beta);

  /// Push one sample; returns true when this sample closed a window.
  bool push(double t, double angle_leg_a, double angle_leg_b);

  double active_beta() const { return beta_; }
  const std::vector<TrialRecord>& trials() const { return trials_; }
  const BetaOptimizer& optimizer() const { return optimizer_; }

  /// Invoked whenever a window closes, after the new gain took effect.
  std::function<void(const TrialRecord&, double new_beta)> on_window;

 private:
  Config config_;
  BetaOptimizer optimizer_;
  double beta_;
  size_t window_samples_;
  double window_t0_ = 0.0;
  std::vector<double> buf_a_, buf_b_;
  std::vector<TrialRecord> trials_;
};

}  // namespace exosim
