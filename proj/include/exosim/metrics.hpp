#pragma once

#include <array>
#include <vector>

#include "exosim/errors.hpp"
#include "exosim/walker.hpp"

namespace exosim {

constexpr int kCycleGridPoints = 101;  // 0..100% of the gait cycle

/// One stride of one physical leg, from its heel strike to its next one.
/// Signals are stitched across the role swap so they follow the leg, and
/// resampled onto the normalized cycle grid.
struct GaitCycle {
  int leg_parity = 0;        // strikes alternate legs; parity identifies one
  double t_start = 0.0;      // s, own heel strike
  double t_mid = 0.0;        // s, opposite heel strike (stance -> swing)
  double t_end = 0.0;        // s, own next heel strike
  double stance_duration = 0.0;
  double swing_duration = 0.0;

  std::array<double, kCycleGridPoints> angle{};      // rad
  std::array<double, kCycleGridPoints> velocity{};   // rad/s
  std::array<double, kCycleGridPoints> tau_exo{};    // N*m
  std::array<double, kCycleGridPoints> power{};      // W

  // Native-rate series inside the cycle, kept for exact power areas.
  std::vector<double> sample_times;
  std::vector<double> sample_power;

  double duration() const { return t_end - t_start; }
};

struct PowerProfile {
  std::vector<double> time;  // s
  std::vector<double> power; // W
  double positive_area = 0.0;  // J
  double negative_area = 0.0;  // J, magnitude
};

struct EnergeticsReport {
  double mc_exo = 0.0;      // kcal/min, resting-subtracted
  double mc_noexo = 0.0;    // kcal/min, resting-subtracted
  double resting = 0.0;     // kcal/min
  double reduction_pct = 0.0;
};

struct GasSample {
  double time_min = 0.0;
  double vo2_lmin = 0.0;
  double vco2_lmin = 0.0;
};

struct KinematicSummary {
  double hip_rom = 0.0;                 // rad, pooled over both legs
  double com_displacement = 0.0;        // m, mean peak-to-peak per cycle
  std::array<double, kCycleGridPoints> com_profile{};  // m, about cycle mean
  double normalized_max_torque = 0.0;   // N*m/kg
};

/// Splits trajectories into per-leg gait cycles bounded by consecutive
/// same-leg heel strikes. Boundary fragments are discarded. Throws
/// AnalysisError with fewer than 2 heel strikes per leg.
std::vector<GaitCycle> segment_cycles(const HybridTrajectory& traj);

/// Exoskeleton mechanical power along one cycle with exact positive/negative
/// area splitting so positive_area - negative_area equals the signed
/// trapezoidal integral.
PowerProfile power_profile(const GaitCycle& cycle);

/// Splits a sampled signal into positive and negative lobe areas, cutting
/// trapezoids at their zero crossings.
void split_signed_area(const std::vector<double>& time,
                       const std::vector<double>& value, double& positive,
                       double& negative);

/// 100 * sum(negative) / sum(positive + negative); the denominator is the
/// unsigned total area. Throws AnalysisError when the total vanishes.
double negative_power_fraction(const std::vector<PowerProfile>& profiles);

/// stance time / swing time of one cycle.
double stance_swing_ratio(const GaitCycle& cycle);

/// Heel strikes per minute; requires at least 10 steps.
double cadence(const HybridTrajectory& traj);
double cadence_ratio(double assisted_spm, double unassisted_spm);

/// Abbreviated Weir equation, kcal/min from gas exchange in L/min.
double weir_energy(double vo2_lmin, double vco2_lmin);

/// Activity metabolic cost: final-2-minute means minus the resting rate,
/// and the percentage change of the assisted condition.
EnergeticsReport metabolic_report(const std::vector<GasSample>& exo_series,
                                  const std::vector<GasSample>& noexo_series,
                                  const std::vector<GasSample>& resting_series);

/// Hip ROM, COM vertical displacement (terrain from params.ground_slope) and
/// weight-normalized peak exoskeleton torque.
KinematicSummary kinematic_summary(const HybridTrajectory& traj,
                                   const WalkerParams& params);

/// Pointwise mean of the cycles' angle profiles.
std::array<double, kCycleGridPoints> mean_angle_profile(
    const std::vector<GaitCycle>& cycles);

/// RMS difference between two cycle-normalized profiles.
double profile_rms_difference(const std::array<double, kCycleGridPoints>& a,
                              const std::array<double, kCycleGridPoints>& b);

/// Linear-interpolation resampling of (times, values) onto n points spanning
/// [t0, t1]. Endpoint-exact and exact for linear signals.
std::vector<double> resample_linear(const std::vector<double>& times,
                                    const std::vector<double>& values,
                                    double t0, double t1, int n);

}  // namespace exosim
