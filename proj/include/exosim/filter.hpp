#pragma once

#include <array>
#include <cmath>

namespace exosim {

/// Second-order Butterworth low-pass biquad (bilinear transform with
/// frequency prewarping), transposed direct form II. DC gain is exactly 1
/// by construction of the coefficient sums.
struct BiquadLowPass {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
  double s1 = 0.0, s2 = 0.0;

  static BiquadLowPass design(double cutoff_hz, double sample_rate_hz);

  double operator()(double x) {
    const double y = b0 * x + s1;
    s1 = b1 * x - a1 * y + s2;
    s2 = b2 * x - a2 * y;
    return y;
  }

  void reset() { s1 = s2 = 0.0; }

  /// Primes the state so a constant input would already be at steady state.
  void settle_to(double x);

  /// Analytic magnitude response of the analog Butterworth prototype.
  static double analog_magnitude(double f_hz, double cutoff_hz) {
    const double r = f_hz / cutoff_hz;
    return 1.0 / std::sqrt(1.0 + r * r * r * r);
  }

  /// Exact magnitude response of the discrete realization at f_hz.
  double digital_magnitude(double f_hz, double sample_rate_hz) const;
};

/// Two-channel filter bank for the two hip velocity signals.
struct FilterState {
  std::array<BiquadLowPass, 2> channel;

  static FilterState design(double cutoff_hz, double sample_rate_hz) {
    FilterState fs;
    fs.channel[0] = BiquadLowPass::design(cutoff_hz, sample_rate_hz);
    fs.channel[1] = fs.channel[0];
    return fs;
  }
  std::array<double, 2> operator()(const std::array<double, 2>& x) {
    return {channel[0](x[0]), channel[1](x[1])};
  }
};

/// One filtering step on a two-channel sample; returns the updated state and
/// the filtered pair.
std::pair<FilterState, std::array<double, 2>> filter_sample(
    FilterState fs, const std::array<double, 2>& raw);

}  // namespace exosim
