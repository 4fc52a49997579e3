#include "exosim/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "exosim/filter.hpp"

namespace exosim {

std::vector<double> zero_phase_lowpass(const std::vector<double>& x,
                                       double cutoff_hz,
                                       double sample_rate_hz) {
  const size_t n = x.size();
  if (n < 8) throw AnalysisError("signal too short to filter");

  // Odd-reflection padding about the endpoints, two transient lengths long.
  const size_t pad =
      std::min(n - 1, static_cast<size_t>(2.0 * sample_rate_hz / cutoff_hz));
  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (size_t i = 1; i <= pad; ++i)
    ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  auto run = [&](std::vector<double>& v) {
    BiquadLowPass f = BiquadLowPass::design(cutoff_hz, sample_rate_hz);
    f.settle_to(v.front());
    for (double& s : v) s = f(s);
  };
  run(ext);
  std::reverse(ext.begin(), ext.end());
  run(ext);
  std::reverse(ext.begin(), ext.end());

  return {ext.begin() + static_cast<long>(pad),
          ext.begin() + static_cast<long>(pad + n)};
}

namespace {

std::vector<double> central_diff(const std::vector<double>& x, double h) {
  std::vector<double> d(x.size() >= 2 ? x.size() - 2 : 0);
  for (size_t i = 1; i + 1 < x.size(); ++i)
    d[i - 1] = (x[i + 1] - x[i - 1]) / (2.0 * h);
  return d;
}

double mean_abs_third_derivative(const std::vector<double>& angles,
                                 double rate, double cutoff_hz) {
  const auto smooth = zero_phase_lowpass(angles, cutoff_hz, rate);
  const double h = 1.0 / rate;
  const auto j = central_diff(central_diff(central_diff(smooth, h), h), h);
  if (j.empty()) throw AnalysisError("window too short for jerk estimation");
  double s = 0.0;
  for (double v : j) s += std::abs(v);
  return s / static_cast<double>(j.size());
}

}  // namespace

WindowFeatures extract_features(const std::vector<double>& a,
                                const std::vector<double>& b,
                                double sample_rate_hz, double window_span_s,
                                double filter_cutoff_hz) {
  if (sample_rate_hz < 100.0)
    throw AnalysisError("feature extraction needs a sample rate >= 100 Hz");
  if (a.size() != b.size())
    throw AnalysisError("leg angle channels differ in length");
  const double expected = window_span_s * sample_rate_hz;
  if (std::abs(static_cast<double>(a.size()) - expected) > 2.0)
    throw AnalysisError("window does not span the configured observation time");

  // Per-leg range of motion, averaged; a static offset between the legs is
  // posture, not motion.
  double rom_sum = 0.0;
  for (const auto* ch : {&a, &b}) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : *ch) {
      if (!std::isfinite(v)) throw AnalysisError("NaN in angle window");
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    rom_sum += hi - lo;
  }

  WindowFeatures f;
  f.window_span = window_span_s;
  f.q_rom = 0.5 * rom_sum;
  f.jerk_mean =
      0.5 * (mean_abs_third_derivative(a, sample_rate_hz, filter_cutoff_hz) +
             mean_abs_third_derivative(b, sample_rate_hz, filter_cutoff_hz));
  return f;
}

double objective(const WindowFeatures& f, double rom_scale,
                 double jerk_scale) {
  if (!(rom_scale > 0.0) || !(jerk_scale > 0.0))
    throw ConfigError("objective scales must be positive");
  return rom_scale * f.q_rom - jerk_scale * f.jerk_mean;
}

}  // namespace exosim
