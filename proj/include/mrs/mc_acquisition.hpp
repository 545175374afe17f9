#pragma once

#include <string_view>

#include "mrs/gaussian_process.hpp"

namespace mrs {

/// Finite discretization of the posterior over the maximizer location.
struct RepresenterSet {
  PointSet points;
  /// Probability of each point being the maximizer; empty until estimated.
  Vector weights;

  [[nodiscard]] Eigen::Index size() const { return points.rows(); }
};

/// Draws n_r representers. Each one is the argmax of an independent joint
/// posterior draw over its own fresh batch of uniform candidates.
RepresenterSet sample_representers(const GaussianProcess& gp, const Box& domain, int n_r,
                                   int n_candidates_per_point, Rng& rng);

/// Fraction of draws (rows) whose argmax is each column; ties go to the lowest
/// index.
Vector estimate_pstar(const Matrix& values);
inline Vector estimate_pstar(const FunctionSampleBlock& block) { return estimate_pstar(block.values); }

/// Mean over draws of (max over the sampled points - value at each point).
Vector expected_regrets(const Matrix& values);
double expected_regret(const FunctionSampleBlock& block, Eigen::Index candidate);

/// -sum w log w with 0 log 0 = 0.
double discrete_entropy(const Vector& weights);

struct FantasyObservation {
  Vector x;
  double y;
};

/// Posterior conditioned on one additional (hypothetical) observation.
GaussianProcess fantasize(const GaussianProcess& gp, const FantasyObservation& obs);

enum class McKind { EntropySearch, MinimumRegret, MinimumRegretPoint };

struct McSettings {
  int n_f = 1000;
  int n_y = 51;
  /// Reuse one set of base draws for the current posterior, every fantasy
  /// and every query point.
  bool common_random_numbers = true;
  /// Estimate p* from the same draws used for the regret estimates.
  bool reuse_samples = true;
  /// Midpoint quantiles of the predictive normal instead of iid fantasy
  /// values.
  bool stratified_y = true;
};

struct McValues {
  double entropy_search = 0.0;
  double minimum_regret = 0.0;
  double minimum_regret_point = 0.0;

  [[nodiscard]] double get(McKind kind) const;
};

/// Precomputed state for evaluating ES, MRS and MRS-point at many query
/// points against one posterior and one representer set.
///
/// A fantasy observation y at x_q changes the posterior over the representers
/// by a rank-one update: the mean moves along c = Cov(f_R, f(x_q)) / s and the
/// covariance loses c c^T, with s^2 = Var(f(x_q)) + noise. Writing
/// y = mu_q + s * e, every fantasy draw is mu_R + L' z + e * c, so one
/// downdated factor L' serves all n_y fantasies.
class McAcquisition {
 public:
  McAcquisition(const GaussianProcess& gp, RepresenterSet representers, const McSettings& settings,
                Rng& rng);

  /// All three acquisitions at x. `fresh` supplies new draws per fantasy and
  /// is required when common random numbers are disabled.
  [[nodiscard]] McValues evaluate(const Eigen::Ref<const Vector>& x, Rng* fresh = nullptr) const;
  [[nodiscard]] double evaluate(McKind kind, const Eigen::Ref<const Vector>& x, Rng* fresh = nullptr) const;

  /// Representers with weights estimated on the current posterior.
  [[nodiscard]] const RepresenterSet& representers() const { return reps_; }
  [[nodiscard]] const Vector& current_regrets() const { return current_er_; }
  [[nodiscard]] const McSettings& settings() const { return settings_; }

 private:
  struct Summary {
    Vector weights;
    Vector regrets;
  };
  // p* and ER of the draws G + 1 * shift^T, given the column means of G.
  static Summary summarize(const Matrix& g, const Vector& g_colmean, const Vector& shift);

  GaussianProcess gp_;
  RepresenterSet reps_;
  McSettings settings_;

  Matrix whitened_reps_;  // L^{-1} K(X, R)
  Vector mean_r_;
  Eigen::LLT<Matrix> cov_r_llt_;
  Matrix cov_r_;  // factor_r * factor_r^T, including any jitter
  Matrix draws_;          // n_f x n_r
  Matrix pstar_draws_;    // independent draws when samples are not reused
  Vector fantasy_quantiles_;

  Vector current_w_;
  Vector current_er_;
  double current_entropy_ = 0.0;
  double current_weighted_regret_ = 0.0;
  double current_min_regret_ = 0.0;
};

double acq_es(const GaussianProcess& gp, const Eigen::Ref<const Vector>& x, const RepresenterSet& reps,
              int n_f, int n_y, Rng& rng);
double acq_mrs(const GaussianProcess& gp, const Eigen::Ref<const Vector>& x, const RepresenterSet& reps,
               int n_f, int n_y, Rng& rng);
double acq_mrs_point(const GaussianProcess& gp, const Eigen::Ref<const Vector>& x,
                     const RepresenterSet& reps, int n_f, int n_y, Rng& rng);

}  // namespace mrs
