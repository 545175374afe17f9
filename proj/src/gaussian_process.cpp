#include "mrs/gaussian_process.hpp"

#include <cmath>
#include <numbers>

namespace mrs {

Dataset::Dataset(PointSet x, Vector y) : inputs(std::move(x)), targets(std::move(y)) {
  if (inputs.rows() != targets.size()) {
    throw InvalidArgument("dataset needs as many targets as inputs");
  }
}

void Dataset::append(const Eigen::Ref<const Vector>& x, double y) {
  if (inputs.cols() != 0 && x.size() != inputs.cols()) {
    throw InvalidArgument("appended point has wrong dimension");
  }
  const Eigen::Index n = size();
  PointSet grown(n + 1, x.size());
  if (n > 0) grown.topRows(n) = inputs;
  grown.row(n) = x.transpose();
  inputs = std::move(grown);
  targets.conservativeResize(n + 1);
  targets(n) = y;
}

double Dataset::max_target() const {
  if (empty()) throw InvalidArgument("incumbent of an empty dataset");
  return targets.maxCoeff();
}

CholeskyResult robust_cholesky(const Matrix& a) {
  if (a.rows() == 0) return {Matrix(0, 0), 0.0};
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() == Eigen::Success) return {llt.matrixL(), 0.0};
  const double scale = std::max(a.diagonal().mean(), std::numeric_limits<double>::min());
  for (double rel = 1e-10; rel <= 1e-6 * 1.0001; rel *= 10.0) {
    Matrix jittered = a;
    jittered.diagonal().array() += rel * scale;
    llt.compute(jittered);
    if (llt.info() == Eigen::Success) return {llt.matrixL(), rel * scale};
  }
  throw NumericalError("Cholesky factorization failed after jitter up to 1e-6");
}

GaussianProcess::GaussianProcess(Kernel kernel, double noise_variance, Dataset data)
    : kernel_(std::move(kernel)), noise_variance_(noise_variance), data_(std::move(data)) {
  if (!(noise_variance_ >= 0.0)) throw InvalidArgument("noise variance must be nonnegative");
}

GaussianProcess GaussianProcess::fit(Dataset data, Kernel kernel, double noise_variance) {
  GaussianProcess gp(std::move(kernel), noise_variance, std::move(data));
  if (!gp.data_.empty()) {
    Matrix k = gp.kernel_(gp.data_.inputs, gp.data_.inputs);
    k.diagonal().array() += noise_variance;
    auto chol = robust_cholesky(k);
    gp.factor_ = std::move(chol.factor);
    gp.jitter_ = chol.jitter;
  } else {
    gp.factor_.resize(0, 0);
  }
  gp.solve_weights();
  return gp;
}

GaussianProcess GaussianProcess::prior(Kernel kernel, double noise_variance, int dim) {
  return fit(Dataset(dim), std::move(kernel), noise_variance);
}

void GaussianProcess::solve_weights() {
  if (data_.empty()) {
    weights_.resize(0);
    return;
  }
  weights_ = factor_.triangularView<Eigen::Lower>().solve(data_.targets);
  factor_.transpose().triangularView<Eigen::Upper>().solveInPlace(weights_);
}

double GaussianProcess::clamp_variance(double v) const {
  const double tol = 1e-8 * std::max(1.0, kernel_.signal_variance());
  if (v < -tol) throw NumericalError("predictive variance " + std::to_string(v) + " is negative");
  return std::max(v, 0.0);
}

Matrix GaussianProcess::whiten(const PointSet& queries) const {
  if (data_.empty()) return Matrix(0, queries.rows());
  Matrix v = kernel_(data_.inputs, queries);
  factor_.triangularView<Eigen::Lower>().solveInPlace(v);
  return v;
}

Vector GaussianProcess::whiten(const Eigen::Ref<const Vector>& x) const {
  if (data_.empty()) return Vector(0);
  Vector v = kernel_.cross(data_.inputs, x);
  factor_.triangularView<Eigen::Lower>().solveInPlace(v);
  return v;
}

Prediction GaussianProcess::predict(const PointSet& queries, bool full_cov) const {
  if (!data_.empty() && queries.cols() != dim()) throw InvalidArgument("query dimension mismatch");
  Prediction out;
  const Eigen::Index m = queries.rows();
  if (data_.empty()) {
    out.mean = Vector::Zero(m);
    out.variance = Vector::Constant(m, kernel_.signal_variance());
    if (full_cov) out.covariance = kernel_(queries, queries);
    return out;
  }
  const Matrix kx = kernel_(data_.inputs, queries);
  out.mean = kx.transpose() * weights_;
  const Matrix v = factor_.triangularView<Eigen::Lower>().solve(kx);
  out.variance.resize(m);
  const Vector reduction = v.colwise().squaredNorm().transpose();
  for (Eigen::Index i = 0; i < m; ++i) {
    out.variance(i) = clamp_variance(kernel_.signal_variance() - reduction(i));
  }
  if (full_cov) {
    out.covariance = kernel_(queries, queries);
    out.covariance.noalias() -= v.transpose() * v;
    out.covariance.diagonal() = out.variance;
  }
  return out;
}

Vector GaussianProcess::predict_mean(const PointSet& queries) const {
  if (data_.empty()) return Vector::Zero(queries.rows());
  if (queries.cols() != dim()) throw InvalidArgument("query dimension mismatch");
  return kernel_(queries, data_.inputs) * weights_;
}

double GaussianProcess::mean(const Eigen::Ref<const Vector>& x) const {
  if (data_.empty()) return 0.0;
  return kernel_.cross(data_.inputs, x).dot(weights_);
}

std::pair<double, double> GaussianProcess::moments(const Eigen::Ref<const Vector>& x) const {
  if (data_.empty()) return {0.0, kernel_.signal_variance()};
  Vector k = kernel_.cross(data_.inputs, x);
  const double mu = k.dot(weights_);
  factor_.triangularView<Eigen::Lower>().solveInPlace(k);
  return {mu, clamp_variance(kernel_.signal_variance() - k.squaredNorm())};
}

FunctionSampleBlock GaussianProcess::sample_joint(const PointSet& queries, Eigen::Index n_samples,
                                                  Rng& rng) const {
  return sample_joint(queries, standard_normal(rng, n_samples, queries.rows()));
}

FunctionSampleBlock GaussianProcess::sample_joint(const PointSet& queries, Matrix base_draws) const {
  if (base_draws.cols() != queries.rows()) {
    throw InvalidArgument("base draws must have one column per query point");
  }
  const Prediction pred = predict(queries, true);
  const Matrix l = robust_cholesky(pred.covariance).factor;
  FunctionSampleBlock block;
  block.values = base_draws * l.transpose();
  block.values.rowwise() += pred.mean.transpose();
  block.base_draws = std::move(base_draws);
  block.points = queries;
  return block;
}

double GaussianProcess::log_marginal_likelihood() const {
  const auto n = static_cast<double>(data_.size());
  if (data_.empty()) return 0.0;
  const double log_det_half = factor_.diagonal().array().log().sum();
  return -0.5 * data_.targets.dot(weights_) - log_det_half - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

GaussianProcess GaussianProcess::condition_on(const Eigen::Ref<const Vector>& x, double y) const {
  Dataset grown = data_;
  grown.append(x, y);
  if (data_.empty()) return fit(std::move(grown), kernel_, noise_variance_);

  const Eigen::Index n = data_.size();
  const Vector l21 = whiten(x);
  const double d2 = kernel_.signal_variance() + noise_variance_ + jitter_ - l21.squaredNorm();
  // A pivot this small means x duplicates an existing noise-free input.
  if (!(d2 > 1e-10 * kernel_.signal_variance())) return fit(std::move(grown), kernel_, noise_variance_);

  GaussianProcess gp(kernel_, noise_variance_, std::move(grown));
  gp.jitter_ = jitter_;
  gp.factor_ = Matrix::Zero(n + 1, n + 1);
  gp.factor_.topLeftCorner(n, n) = factor_;
  gp.factor_.block(n, 0, 1, n) = l21.transpose();
  gp.factor_(n, n) = std::sqrt(d2);
  gp.solve_weights();
  return gp;
}

}  // namespace mrs
