#pragma once

#include <optional>

#include "mrs/common.hpp"
#include "mrs/kernel.hpp"

namespace mrs {

/// Observed (input, target) pairs. Inputs are stored one per row.
struct Dataset {
  PointSet inputs;
  Vector targets;

  Dataset() = default;
  explicit Dataset(int dim) : inputs(0, dim), targets(0) {}
  Dataset(PointSet x, Vector y);

  [[nodiscard]] Eigen::Index size() const { return targets.size(); }
  [[nodiscard]] Eigen::Index dim() const { return inputs.cols(); }
  [[nodiscard]] bool empty() const { return targets.size() == 0; }

  void append(const Eigen::Ref<const Vector>& x, double y);
  /// Largest observed target (the incumbent); throws on an empty dataset.
  [[nodiscard]] double max_target() const;
};

/// Latent posterior moments at a set of query points. `covariance` is only
/// filled when the full covariance was requested.
struct Prediction {
  Vector mean;
  Vector variance;
  Matrix covariance;
};

/// Joint posterior draws at a fixed point set. Row s of `values` is one
/// sampled function, generated as mean + L * base_draws.row(s)^T.
struct FunctionSampleBlock {
  Matrix values;
  Matrix base_draws;
  PointSet points;

  [[nodiscard]] Eigen::Index n_samples() const { return values.rows(); }
  [[nodiscard]] Eigen::Index n_points() const { return values.cols(); }
};

/// Lower Cholesky factor of a symmetric matrix, retrying with diagonal jitter
/// of 1e-10 .. 1e-6 times the mean diagonal before giving up.
struct CholeskyResult {
  Matrix factor;
  double jitter = 0.0;
};
CholeskyResult robust_cholesky(const Matrix& a);

/// Zero-mean GP regression model. Immutable after construction.
class GaussianProcess {
 public:
  /// Conditions the prior on `data`. An empty dataset yields the prior.
  static GaussianProcess fit(Dataset data, Kernel kernel, double noise_variance);
  static GaussianProcess prior(Kernel kernel, double noise_variance, int dim);

  [[nodiscard]] const Kernel& kernel() const { return kernel_; }
  [[nodiscard]] double noise_variance() const { return noise_variance_; }
  [[nodiscard]] const Dataset& data() const { return data_; }
  [[nodiscard]] Eigen::Index dim() const { return data_.dim(); }
  [[nodiscard]] const Matrix& factor() const { return factor_; }
  [[nodiscard]] double jitter() const { return jitter_; }

  [[nodiscard]] Prediction predict(const PointSet& queries, bool full_cov = false) const;
  [[nodiscard]] Vector predict_mean(const PointSet& queries) const;
  [[nodiscard]] double mean(const Eigen::Ref<const Vector>& x) const;
  /// Mean and latent variance at a single point.
  [[nodiscard]] std::pair<double, double> moments(const Eigen::Ref<const Vector>& x) const;

  /// L^{-1} K(X, queries); the building block of every posterior covariance.
  [[nodiscard]] Matrix whiten(const PointSet& queries) const;
  [[nodiscard]] Vector whiten(const Eigen::Ref<const Vector>& x) const;

  /// Joint draws at `queries`. With `base_draws` (n_samples x |queries|) the
  /// result is a deterministic function of the draws.
  [[nodiscard]] FunctionSampleBlock sample_joint(const PointSet& queries, Eigen::Index n_samples,
                                                 Rng& rng) const;
  [[nodiscard]] FunctionSampleBlock sample_joint(const PointSet& queries, Matrix base_draws) const;

  [[nodiscard]] double log_marginal_likelihood() const;

  /// Posterior after additionally observing y at x. Uses a rank-one extension
  /// of the cached factor and falls back to a jittered refit when the
  /// extension is not positive.
  [[nodiscard]] GaussianProcess condition_on(const Eigen::Ref<const Vector>& x, double y) const;

 private:
  GaussianProcess(Kernel kernel, double noise_variance, Dataset data);

  void solve_weights();
  [[nodiscard]] double clamp_variance(double v) const;

  Kernel kernel_;
  double noise_variance_;
  Dataset data_;
  Matrix factor_;
  Vector weights_;
  double jitter_ = 0.0;
};

}  // namespace mrs
