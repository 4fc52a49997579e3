#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "exosim/errors.hpp"
#include "exosim/features.hpp"

namespace exosim {

struct TrialRecord {
  double t_start = 0.0;   // s, window start
  double beta = 0.0;      // gain active during the window
  WindowFeatures features;
  double objective = 0.0;
};

struct OptimizerParams {
  double beta_min = 1.0;
  double beta_max = 2.5;
  double rom_scale = 1.0;
  double jerk_scale = 0.01;
  int init_samples = 5;       // low-discrepancy warm start
  double grid_step = 0.01;    // acquisition grid resolution
  double noise_floor = 1e-4;  // relative noise variance lower bound
  int fit_window = 10;        // most recent trials the surrogate is fit on
  int refit_every = 5;        // hyperparameter refit cadence
  double ei_xi = 1e-3;        // exploration margin in the acquisition

  void validate() const;
};

/// Gaussian-process surrogate over the 1-D gain domain: Matern-5/2 kernel,
/// constant mean, concentrated-likelihood hyperparameter fit on a small grid.
class GaussianProcess1D {
 public:
  void fit(const std::vector<double>& x, const std::vector<double>& y,
           double length_scale, double noise_ratio);

  /// Maximum-likelihood (length_scale, noise_ratio) over a coarse grid.
  static std::pair<double, double> select_hyperparameters(
      const std::vector<double>& x, const std::vector<double>& y,
      double domain_span, double noise_floor);

  struct Posterior {
    double mean = 0.0;
    double variance = 0.0;
  };
  Posterior predict(double x) const;

  bool trained() const { return !x_.empty(); }
  double length_scale() const { return length_scale_; }
  double noise_ratio() const { return noise_ratio_; }

 private:
  std::vector<double> x_;
  std::vector<double> alpha_;       // K^-1 (y - mu)
  std::vector<double> chol_;        // row-major lower Cholesky of K
  double mu_ = 0.0;
  double signal_var_ = 1.0;
  double length_scale_ = 1.0;
  double noise_ratio_ = 1e-4;
};

/// Expected improvement of a maximization problem.
double expected_improvement(const GaussianProcess1D::Posterior& post,
                            double best, double xi);

/// Sequential optimizer of the assistance gain. Deterministic under a fixed
/// seed: the warm start is a seeded rotation of the van der Corput sequence
/// and the acquisition is maximized on a fixed grid.
class BetaOptimizer {
 public:
  BetaOptimizer(const OptimizerParams& params, std::uint64_t seed);

  /// Next gain to try given everything observed so far.
  double suggest() const;

  void observe(const TrialRecord& trial);

  const std::vector<TrialRecord>& history() const { return history_; }
  const OptimizerParams& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }

  /// Best objective value seen so far, if any.
  std::optional<double> best_objective() const;

 private:
  OptimizerParams params_;
  std::uint64_t seed_;
  double init_shift_;  // Cranley-Patterson rotation of the warm start
  std::vector<TrialRecord> history_;
  GaussianProcess1D gp_;
  double fitted_length_scale_ = 0.0;
  double fitted_noise_ratio_ = 0.0;
  int last_fit_size_ = 0;

  void refit();
};

/// Base-2 van der Corput sequence element (1-indexed).
double van_der_corput(std::uint64_t index);

}  // namespace exosim
