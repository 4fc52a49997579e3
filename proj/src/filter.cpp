#include "exosim/filter.hpp"

#include <complex>

#include "exosim/errors.hpp"

namespace exosim {

BiquadLowPass BiquadLowPass::design(double cutoff_hz, double sample_rate_hz) {
  if (!(cutoff_hz > 0.0) || !(sample_rate_hz > 0.0) ||
      cutoff_hz >= 0.5 * sample_rate_hz)
    throw ConfigError("filter cutoff must lie in (0, sample_rate/2)");

  // RBJ cookbook low-pass with Q = 1/sqrt(2).
  const double w0 = 2.0 * M_PI * cutoff_hz / sample_rate_hz;
  const double alpha = std::sin(w0) / std::sqrt(2.0);
  const double cw = std::cos(w0);
  const double a0 = 1.0 + alpha;

  BiquadLowPass f;
  f.b0 = (1.0 - cw) / 2.0 / a0;
  f.b1 = (1.0 - cw) / a0;
  f.b2 = f.b0;
  f.a1 = -2.0 * cw / a0;
  f.a2 = (1.0 - alpha) / a0;
  return f;
}

void BiquadLowPass::settle_to(double x) {
  // Steady state of the transposed DF2 recurrences for constant input x;
  // the output then equals x because the DC gain is one.
  s2 = (b2 - a2) * x;
  s1 = (b1 - a1) * x + s2;
}

double BiquadLowPass::digital_magnitude(double f_hz,
                                        double sample_rate_hz) const {
  const std::complex<double> z =
      std::exp(std::complex<double>(0.0, 2.0 * M_PI * f_hz / sample_rate_hz));
  const std::complex<double> zi = 1.0 / z;
  const std::complex<double> num = b0 + b1 * zi + b2 * zi * zi;
  const std::complex<double> den = 1.0 + a1 * zi + a2 * zi * zi;
  return std::abs(num / den);
}

std::pair<FilterState, std::array<double, 2>> filter_sample(
    FilterState fs, const std::array<double, 2>& raw) {
  const auto y = fs(raw);
  return {fs, y};
}

}  // namespace exosim
