#include "exosim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace exosim {

std::vector<double> resample_linear(const std::vector<double>& times,
                                    const std::vector<double>& values,
                                    double t0, double t1, int n) {
  if (times.size() != values.size() || times.size() < 2)
    throw AnalysisError("resample needs matching series with >= 2 samples");
  std::vector<double> out(static_cast<size_t>(n));
  size_t j = 0;
  for (int i = 0; i < n; ++i) {
    const double t = t0 + (t1 - t0) * i / (n - 1);
    while (j + 2 < times.size() && times[j + 1] < t) ++j;
    const double ta = times[j], tb = times[j + 1];
    const double w = tb > ta ? (t - ta) / (tb - ta) : 0.0;
    out[static_cast<size_t>(i)] =
        values[j] + w * (values[j + 1] - values[j]);
  }
  return out;
}

namespace {

// Index of the first sample at or after t.
size_t lower_index(const std::vector<TrajectorySample>& s, double t) {
  size_t lo = 0, hi = s.size();
  while (lo < hi) {
    const size_t mid = (lo + hi) / 2;
    if (s[mid].state.time < t)
      lo = mid + 1;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace

std::vector<GaitCycle> segment_cycles(const HybridTrajectory& traj) {
  const auto& ev = traj.heel_strike_times;
  if (ev.size() < 3)
    throw AnalysisError("segmentation needs at least 2 heel strikes per leg");

  std::vector<GaitCycle> cycles;
  for (size_t k = 0; k + 2 < ev.size(); ++k) {
    GaitCycle c;
    c.leg_parity = static_cast<int>(k % 2);
    c.t_start = ev[k];
    c.t_mid = ev[k + 1];
    c.t_end = ev[k + 2];
    c.stance_duration = c.t_mid - c.t_start;
    c.swing_duration = c.t_end - c.t_mid;

    // Follow the striking leg through the role swap: it is the stance leg
    // (index 0 signals) until t_mid, then the swing leg (index 1).
    std::vector<double> t, ang, vel, tau, pow_;
    const size_t i0 = lower_index(traj.samples, c.t_start);
    for (size_t i = i0; i < traj.samples.size(); ++i) {
      const auto& smp = traj.samples[i];
      const double ts = smp.state.time;
      if (ts > c.t_end + 1e-12) break;
      // Event samples carry the post-swap roles, so the striking leg reads
      // as stance (role 0) at t_start and t_end and as swing at t_mid.
      const int role = (ts > c.t_start && ts >= c.t_mid && ts < c.t_end) ? 1 : 0;
      const double a = role == 0 ? smp.state.q1 : smp.state.q2;
      const double v = role == 0 ? smp.state.dq1 : smp.state.dq2;
      const double g = smp.tau_exo[static_cast<size_t>(role)];
      t.push_back(ts);
      ang.push_back(a);
      vel.push_back(v);
      tau.push_back(g);
      pow_.push_back(g * v);
    }
    if (t.size() < 4) continue;

    const auto a101 = resample_linear(t, ang, c.t_start, c.t_end, kCycleGridPoints);
    const auto v101 = resample_linear(t, vel, c.t_start, c.t_end, kCycleGridPoints);
    const auto g101 = resample_linear(t, tau, c.t_start, c.t_end, kCycleGridPoints);
    const auto p101 = resample_linear(t, pow_, c.t_start, c.t_end, kCycleGridPoints);
    std::copy(a101.begin(), a101.end(), c.angle.begin());
    std::copy(v101.begin(), v101.end(), c.velocity.begin());
    std::copy(g101.begin(), g101.end(), c.tau_exo.begin());
    std::copy(p101.begin(), p101.end(), c.power.begin());
    c.sample_times = std::move(t);
    c.sample_power = std::move(pow_);
    cycles.push_back(std::move(c));
  }
  if (cycles.empty())
    throw AnalysisError("no complete gait cycles in trajectory");
  return cycles;
}

void split_signed_area(const std::vector<double>& time,
                       const std::vector<double>& value, double& positive,
                       double& negative) {
  positive = 0.0;
  negative = 0.0;
  for (size_t i = 1; i < time.size(); ++i) {
    const double h = time[i] - time[i - 1];
    const double p0 = value[i - 1], p1 = value[i];
    if (p0 >= 0.0 && p1 >= 0.0) {
      positive += 0.5 * h * (p0 + p1);
    } else if (p0 <= 0.0 && p1 <= 0.0) {
      negative += -0.5 * h * (p0 + p1);
    } else {
      // split the trapezoid at its zero crossing
      const double w = p0 / (p0 - p1);  // fraction of h until the crossing
      const double a0 = 0.5 * w * h * p0;
      const double a1 = 0.5 * (1.0 - w) * h * p1;
      if (p0 > 0.0) {
        positive += a0;
        negative += -a1;
      } else {
        negative += -a0;
        positive += a1;
      }
    }
  }
}

PowerProfile power_profile(const GaitCycle& cycle) {
  PowerProfile p;
  p.time = cycle.sample_times;
  p.power = cycle.sample_power;
  split_signed_area(p.time, p.power, p.positive_area, p.negative_area);
  return p;
}

double negative_power_fraction(const std::vector<PowerProfile>& profiles) {
  if (profiles.empty())
    throw AnalysisError("negative power fraction needs at least one profile");
  double pos = 0.0, neg = 0.0;
  for (const auto& p : profiles) {
    pos += p.positive_area;
    neg += p.negative_area;
  }
  const double total = pos + neg;
  if (!(total > 0.0))
    throw AnalysisError("total power area is zero; fraction undefined");
  return 100.0 * neg / total;
}

double stance_swing_ratio(const GaitCycle& cycle) {
  if (!(cycle.swing_duration > 0.0))
    throw AnalysisError("degenerate cycle: zero swing duration");
  return cycle.stance_duration / cycle.swing_duration;
}

double cadence(const HybridTrajectory& traj) {
  const auto& ev = traj.heel_strike_times;
  if (ev.size() < 10) throw AnalysisError("cadence needs at least 10 steps");
  return 60.0 * (static_cast<double>(ev.size()) - 1.0) /
         (ev.back() - ev.front());
}

double cadence_ratio(double assisted_spm, double unassisted_spm) {
  if (!(unassisted_spm > 0.0))
    throw AnalysisError("unassisted cadence must be positive");
  return assisted_spm / unassisted_spm;
}

double weir_energy(double vo2_lmin, double vco2_lmin) {
  if (vo2_lmin < 0.0 || vco2_lmin < 0.0)
    throw AnalysisError("gas volumes must be non-negative");
  return 3.941 * vo2_lmin + 1.106 * vco2_lmin;
}

namespace {

double final_window_mean(const std::vector<GasSample>& series,
                         double window_min) {
  if (series.size() < 2) throw AnalysisError("gas series too short");
  const double t_end = series.back().time_min;
  const double t_begin = series.front().time_min;
  if (t_end - t_begin < window_min)
    throw AnalysisError("gas series shorter than the averaging window");
  const double t0 = t_end - window_min;
  double sum = 0.0;
  int n = 0;
  for (const auto& g : series) {
    if (g.time_min < t0) continue;
    sum += weir_energy(g.vo2_lmin, g.vco2_lmin);
    ++n;
  }
  if (n == 0) throw AnalysisError("no samples in the averaging window");
  return sum / n;
}

}  // namespace

EnergeticsReport metabolic_report(const std::vector<GasSample>& exo_series,
                                  const std::vector<GasSample>& noexo_series,
                                  const std::vector<GasSample>& resting_series) {
  EnergeticsReport r;
  r.resting = final_window_mean(resting_series, 2.0);
  r.mc_exo = final_window_mean(exo_series, 2.0) - r.resting;
  r.mc_noexo = final_window_mean(noexo_series, 2.0) - r.resting;
  if (r.mc_noexo == 0.0)
    throw AnalysisError("device-free metabolic cost is zero");
  r.reduction_pct = (r.mc_exo - r.mc_noexo) / r.mc_noexo * 100.0;
  return r;
}

KinematicSummary kinematic_summary(const HybridTrajectory& traj,
                                   const WalkerParams& params) {
  KinematicSummary out;
  const auto cycles = segment_cycles(traj);
  const auto terrain = slope_terrain(params.ground_slope);

  double amin = std::numeric_limits<double>::infinity();
  double amax = -std::numeric_limits<double>::infinity();
  double max_tau = 0.0;
  for (const auto& smp : traj.samples) {
    amin = std::min({amin, smp.state.q1, smp.state.q2});
    amax = std::max({amax, smp.state.q1, smp.state.q2});
    max_tau = std::max({max_tau, std::abs(smp.tau_exo[0]),
                        std::abs(smp.tau_exo[1])});
  }
  out.hip_rom = amax - amin;
  out.normalized_max_torque =
      max_tau / (2.0 * params.leg_mass + params.hip_mass);

  // COM height in world coordinates, cycle-normalized and mean-centred.
  std::array<double, kCycleGridPoints> acc{};
  double pk = 0.0;
  for (const auto& c : cycles) {
    std::vector<double> t, com_y;
    const size_t i0 = lower_index(traj.samples, c.t_start);
    for (size_t i = i0; i < traj.samples.size(); ++i) {
      const auto& smp = traj.samples[i];
      if (smp.state.time > c.t_end + 1e-12) break;
      const Vec2 com = com_position(smp.state, params);
      t.push_back(smp.state.time);
      com_y.push_back(com.y() + terrain(smp.state.stance_foot_x));
    }
    const auto prof = resample_linear(t, com_y, c.t_start, c.t_end,
                                      kCycleGridPoints);
    double mean = 0.0;
    for (double v : prof) mean += v;
    mean /= prof.size();
    double lo = prof[0] - mean, hi = prof[0] - mean;
    for (int i = 0; i < kCycleGridPoints; ++i) {
      const double d = prof[static_cast<size_t>(i)] - mean;
      acc[static_cast<size_t>(i)] += d;
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    pk += hi - lo;
  }
  for (auto& v : acc) v /= static_cast<double>(cycles.size());
  out.com_profile = acc;
  out.com_displacement = pk / static_cast<double>(cycles.size());
  return out;
}

std::array<double, kCycleGridPoints> mean_angle_profile(
    const std::vector<GaitCycle>& cycles) {
  if (cycles.empty()) throw AnalysisError("no cycles to average");
  std::array<double, kCycleGridPoints> acc{};
  for (const auto& c : cycles)
    for (int i = 0; i < kCycleGridPoints; ++i)
      acc[static_cast<size_t>(i)] += c.angle[static_cast<size_t>(i)];
  for (auto& v : acc) v /= static_cast<double>(cycles.size());
  return acc;
}

double profile_rms_difference(const std::array<double, kCycleGridPoints>& a,
                              const std::array<double, kCycleGridPoints>& b) {
  double s = 0.0;
  for (int i = 0; i < kCycleGridPoints; ++i) {
    const double d = a[static_cast<size_t>(i)] - b[static_cast<size_t>(i)];
    s += d * d;
  }
  return std::sqrt(s / kCycleGridPoints);
}

}  // namespace exosim
