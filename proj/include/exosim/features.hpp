#pragma once

#include <vector>

#include "exosim/errors.hpp"

namespace exosim {

struct WindowFeatures {
  double q_rom = 0.0;      // rad, max - min over the window, legs pooled
  double jerk_mean = 0.0;  // rad/s^3, mean |q'''|, legs pooled
  double window_span = 2.0;  // s
};

/// Kinematic features of one observation window. ROM comes from the raw
/// angles; jerk from three cascaded central differences of the 4 Hz
/// zero-phase-filtered angles, which keeps heel-strike transients from
/// swamping the estimate. The two channels are the physical leg angles.
/// Throws AnalysisError on short windows or non-finite samples.
WindowFeatures extract_features(const std::vector<double>& angles_leg_a,
                                const std::vector<double>& angles_leg_b,
                                double sample_rate_hz,
                                double window_span_s = 2.0,
                                double filter_cutoff_hz = 4.0);

/// Scalarized window objective: rom_scale * q_rom - jerk_scale * jerk_mean.
/// Unit scales recover the bare difference of the two features.
double objective(const WindowFeatures& f, double rom_scale = 1.0,
                 double jerk_scale = 0.01);

/// Zero-phase (forward-backward) Butterworth low-pass with odd-reflection
/// padding; exposed for tests.
std::vector<double> zero_phase_lowpass(const std::vector<double>& x,
                                       double cutoff_hz,
                                       double sample_rate_hz);

}  // namespace exosim
