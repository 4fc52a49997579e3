#include "exosim/bayesopt.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace exosim {

void OptimizerParams::validate() const {
  if (!(beta_min < beta_max)) throw ConfigError("beta bounds are inverted");
  if (!(rom_scale > 0.0) || !(jerk_scale > 0.0))
    throw ConfigError("objective scales must be positive");
  if (init_samples < 1) throw ConfigError("need at least one warm-start trial");
  if (!(grid_step > 0.0)) throw ConfigError("grid step must be positive");
  if (!(noise_floor > 0.0)) throw ConfigError("noise floor must be positive");
  if (fit_window < 2) throw ConfigError("fit window must hold >= 2 trials");
}

double van_der_corput(std::uint64_t index) {
  double result = 0.0, f = 0.5;
  while (index > 0) {
    if (index & 1u) result += f;
    index >>= 1u;
    f *= 0.5;
  }
  return result;
}

namespace {

double splitmix64_unit(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  x = x ^ (x >> 31);
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

double matern52(double r, double ell) {
  const double a = std::sqrt(5.0) * std::abs(r) / ell;
  return (1.0 + a + a * a / 3.0) * std::exp(-a);
}

}  // namespace

void GaussianProcess1D::fit(const std::vector<double>& x,
                            const std::vector<double>& y, double length_scale,
                            double noise_ratio) {
  const int n = static_cast<int>(x.size());
  if (n == 0 || x.size() != y.size())
    throw AnalysisError("GP fit needs matching non-empty data");
  x_ = x;
  length_scale_ = length_scale;
  noise_ratio_ = noise_ratio;

  mu_ = 0.0;
  for (double v : y) mu_ += v;
  mu_ /= n;

  Eigen::MatrixXd R(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      R(i, j) = matern52(x[static_cast<size_t>(i)] - x[static_cast<size_t>(j)],
                         length_scale) +
                (i == j ? noise_ratio : 0.0);

  Eigen::VectorXd yc(n);
  for (int i = 0; i < n; ++i) yc(i) = y[static_cast<size_t>(i)] - mu_;

  const Eigen::LLT<Eigen::MatrixXd> llt(R);
  if (llt.info() != Eigen::Success)
    throw AnalysisError("GP correlation matrix not positive definite");
  const Eigen::VectorXd alpha = llt.solve(yc);

  signal_var_ = yc.dot(alpha) / n;
  if (!(signal_var_ > 0.0)) signal_var_ = 1e-12;

  alpha_.assign(alpha.data(), alpha.data() + n);
  const Eigen::MatrixXd L = llt.matrixL();
  chol_.resize(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) chol_[static_cast<size_t>(i) * n + j] = L(i, j);
}

std::pair<double, double> GaussianProcess1D::select_hyperparameters(
    const std::vector<double>& x, const std::vector<double>& y,
    double domain_span, double noise_floor) {
  const int n = static_cast<int>(x.size());
  double best_ll = -std::numeric_limits<double>::infinity();
  double best_ell = 0.3 * domain_span, best_noise = 1e-2;

  Eigen::VectorXd yv(n);
  double mu = 0.0;
  for (double v : y) mu += v;
  mu /= n;
  for (int i = 0; i < n; ++i) yv(i) = y[static_cast<size_t>(i)] - mu;

  for (double frac : {0.05, 0.1, 0.2, 0.35, 0.6, 1.0, 2.0}) {
    const double ell = frac * domain_span;
    for (double noise : {noise_floor, 1e-3, 1e-2, 1e-1, 0.5}) {
      if (noise < noise_floor) continue;
      Eigen::MatrixXd R(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          R(i, j) = matern52(
                        x[static_cast<size_t>(i)] - x[static_cast<size_t>(j)],
                        ell) +
                    (i == j ? noise : 0.0);
      const Eigen::LLT<Eigen::MatrixXd> llt(R);
      if (llt.info() != Eigen::Success) continue;
      const Eigen::VectorXd alpha = llt.solve(yv);
      double sigma2 = yv.dot(alpha) / n;
      if (!(sigma2 > 0.0)) sigma2 = 1e-12;
      double logdet = 0.0;
      const Eigen::MatrixXd L = llt.matrixL();
      for (int i = 0; i < n; ++i) logdet += 2.0 * std::log(L(i, i));
      const double ll = -0.5 * (n * std::log(sigma2) + logdet);
      if (ll > best_ll) {
        best_ll = ll;
        best_ell = ell;
        best_noise = noise;
      }
    }
  }
  return {best_ell, best_noise};
}

GaussianProcess1D::Posterior GaussianProcess1D::predict(double x) const {
  const int n = static_cast<int>(x_.size());
  Posterior p;
  if (n == 0) return p;

  Eigen::VectorXd k(n);
  for (int i = 0; i < n; ++i)
    k(i) = matern52(x - x_[static_cast<size_t>(i)], length_scale_);

  double mean = mu_;
  for (int i = 0; i < n; ++i) mean += k(i) * alpha_[static_cast<size_t>(i)];

  // v = L^-1 k by forward substitution on the stored Cholesky factor.
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) {
    double s = k(i);
    for (int j = 0; j < i; ++j)
      s -= chol_[static_cast<size_t>(i) * n + j] * v(j);
    v(i) = s / chol_[static_cast<size_t>(i) * n + i];
  }
  const double rho = 1.0 + noise_ratio_ - v.squaredNorm();
  p.mean = mean;
  p.variance = std::max(rho, 0.0) * signal_var_;
  return p;
}

double expected_improvement(const GaussianProcess1D::Posterior& post,
                            double best, double xi) {
  const double sigma = std::sqrt(std::max(post.variance, 0.0));
  const double delta = post.mean - best - xi;
  if (sigma < 1e-15) return std::max(delta, 0.0);
  const double z = delta / sigma;
  const double cdf = 0.5 * std::erfc(-z / std::sqrt(2.0));
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
  const double ei = delta * cdf + sigma * pdf;
  return std::max(ei, 0.0);
}

BetaOptimizer::BetaOptimizer(const OptimizerParams& params, std::uint64_t seed)
    : params_(params), seed_(seed), init_shift_(splitmix64_unit(seed)) {
  params_.validate();
}

std::optional<double> BetaOptimizer::best_objective() const {
  std::optional<double> best;
  for (const auto& t : history_)
    if (!best || t.objective > *best) best = t.objective;
  return best;
}

void BetaOptimizer::refit() {
  const int n = static_cast<int>(history_.size());
  const int lo = std::max(0, n - params_.fit_window);
  std::vector<double> x, y;
  for (int i = lo; i < n; ++i) {
    x.push_back(history_[static_cast<size_t>(i)].beta);
    y.push_back(history_[static_cast<size_t>(i)].objective);
  }
  const double span = params_.beta_max - params_.beta_min;
  if (fitted_length_scale_ <= 0.0 || n % params_.refit_every == 0) {
    const auto [ell, noise] = GaussianProcess1D::select_hyperparameters(
        x, y, span, params_.noise_floor);
    fitted_length_scale_ = ell;
    fitted_noise_ratio_ = noise;
  }
  gp_.fit(x, y, fitted_length_scale_, fitted_noise_ratio_);
  last_fit_size_ = n;
}

void BetaOptimizer::observe(const TrialRecord& trial) {
  if (trial.beta < params_.beta_min - 1e-9 ||
      trial.beta > params_.beta_max + 1e-9)
    throw ConfigError("trial gain lies outside the configured bounds");
  history_.push_back(trial);
  if (static_cast<int>(history_.size()) >= 2) refit();
}

double BetaOptimizer::suggest() const {
  const double lo = params_.beta_min, hi = params_.beta_max;
  const int n = static_cast<int>(history_.size());
  if (n < params_.init_samples || !gp_.trained()) {
    const double u = std::fmod(
        van_der_corput(static_cast<std::uint64_t>(n) + 1) + init_shift_, 1.0);
    return lo + u * (hi - lo);
  }

  // Incumbent for the improvement: the best posterior mean, not the best
  // raw observation, which on a noisy objective is a lucky outlier that
  // would flatten the acquisition into pure exploration.
  const int cells = static_cast<int>(std::round((hi - lo) / params_.grid_step));
  std::vector<GaussianProcess1D::Posterior> post(
      static_cast<size_t>(cells) + 1);
  double best_mean = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= cells; ++i) {
    const double x = std::min(lo + params_.grid_step * i, hi);
    post[static_cast<size_t>(i)] = gp_.predict(x);
    best_mean = std::max(best_mean, post[static_cast<size_t>(i)].mean);
  }
  double best_x = lo, best_ei = -1.0;
  for (int i = 0; i <= cells; ++i) {
    const double x = std::min(lo + params_.grid_step * i, hi);
    const double ei = expected_improvement(post[static_cast<size_t>(i)],
                                           best_mean, params_.ei_xi);
    if (ei > best_ei + 1e-15) {
      best_ei = ei;
      best_x = x;
    }
  }
  return best_x;
}

}  // namespace exosim
