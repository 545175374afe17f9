#include "mrs/kernel.hpp"

#include <cmath>

namespace mrs {

namespace {
constexpr double kSqrt5 = 2.2360679774997896964;
}

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::RBF: return "rbf";
    case KernelFamily::Matern52: return "matern52";
    case KernelFamily::RationalQuadratic: return "rational_quadratic";
  }
  return "unknown";
}

KernelFamily kernel_family_from_string(std::string_view name) {
  if (name == "rbf") return KernelFamily::RBF;
  if (name == "matern52") return KernelFamily::Matern52;
  if (name == "rational_quadratic" || name == "rq") return KernelFamily::RationalQuadratic;
  throw InvalidArgument("unknown kernel family: " + std::string(name));
}

Kernel::Kernel(KernelFamily family, Vector length_scales, double signal_variance, double alpha)
    : family_(family),
      length_scales_(std::move(length_scales)),
      signal_variance_(signal_variance),
      alpha_(alpha) {
  if (length_scales_.size() == 0) throw InvalidArgument("kernel needs at least one length scale");
  if (!(length_scales_.array() > 0.0).all() || !(signal_variance_ > 0.0) || !(alpha_ > 0.0)) {
    throw InvalidArgument("kernel hyperparameters must be strictly positive");
  }
}

Kernel Kernel::rbf(double length_scale, double signal_variance) {
  return {KernelFamily::RBF, Vector::Constant(1, length_scale), signal_variance};
}

Kernel Kernel::matern52(Vector length_scales, double signal_variance) {
  return {KernelFamily::Matern52, std::move(length_scales), signal_variance};
}

Kernel Kernel::rational_quadratic(double length_scale, double alpha, double signal_variance) {
  return {KernelFamily::RationalQuadratic, Vector::Constant(1, length_scale), signal_variance, alpha};
}

void Kernel::check_dim(Eigen::Index dim) const {
  if (!isotropic() && dim != length_scales_.size()) {
    throw InvalidArgument("point dimension " + std::to_string(dim) +
                          " does not match anisotropic length scales of size " +
                          std::to_string(length_scales_.size()));
  }
}

double Kernel::from_scaled_sqdist(double r2) const {
  switch (family_) {
    case KernelFamily::RBF:
      return signal_variance_ * std::exp(-0.5 * r2);
    case KernelFamily::Matern52: {
      const double r = std::sqrt(r2);
      return signal_variance_ * (1.0 + kSqrt5 * r + 5.0 / 3.0 * r2) * std::exp(-kSqrt5 * r);
    }
    case KernelFamily::RationalQuadratic:
      return signal_variance_ * std::pow(1.0 + r2 / (2.0 * alpha_), -alpha_);
  }
  return 0.0;
}

double Kernel::value(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) const {
  if (a.size() != b.size()) throw InvalidArgument("kernel arguments differ in dimension");
  check_dim(a.size());
  double r2 = 0.0;
  for (Eigen::Index d = 0; d < a.size(); ++d) {
    const double l = isotropic() ? length_scales_(0) : length_scales_(d);
    const double diff = (a(d) - b(d)) / l;
    r2 += diff * diff;
  }
  return from_scaled_sqdist(r2);
}

Matrix Kernel::operator()(const PointSet& a, const PointSet& b) const {
  if (a.cols() != b.cols()) throw InvalidArgument("kernel point sets differ in dimension");
  check_dim(a.cols());
  const Eigen::Index dim = a.cols();
  Eigen::RowVectorXd inv_l(dim);
  for (Eigen::Index d = 0; d < dim; ++d) inv_l(d) = 1.0 / (isotropic() ? length_scales_(0) : length_scales_(d));
  const Matrix as = a.array().rowwise() * inv_l.array();
  const Matrix bs = b.array().rowwise() * inv_l.array();

  Matrix k(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      double r2 = 0.0;
      for (Eigen::Index d = 0; d < dim; ++d) {
        const double diff = as(i, d) - bs(j, d);
        r2 += diff * diff;
      }
      k(i, j) = from_scaled_sqdist(r2);
    }
  }
  return k;
}

Vector Kernel::cross(const PointSet& a, const Eigen::Ref<const Vector>& b) const {
  if (a.cols() != b.size()) throw InvalidArgument("kernel point sets differ in dimension");
  check_dim(b.size());
  Vector k(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    double r2 = 0.0;
    for (Eigen::Index d = 0; d < b.size(); ++d) {
      const double l = isotropic() ? length_scales_(0) : length_scales_(d);
      const double diff = (a(i, d) - b(d)) / l;
      r2 += diff * diff;
    }
    k(i) = from_scaled_sqdist(r2);
  }
  return k;
}

Vector Kernel::log_params() const {
  Vector p(length_scales_.size() + 1);
  p.head(length_scales_.size()) = length_scales_.array().log();
  p(length_scales_.size()) = std::log(signal_variance_);
  return p;
}

Kernel Kernel::with_log_params(const Eigen::Ref<const Vector>& log_params) const {
  if (log_params.size() != length_scales_.size() + 1) {
    throw InvalidArgument("log parameter vector has wrong size");
  }
  const Eigen::Index n_ls = length_scales_.size();
  return {family_, log_params.head(n_ls).array().exp().matrix(), std::exp(log_params(n_ls)), alpha_};
}

std::vector<Matrix> Kernel::log_param_gradients(const PointSet& x) const {
  check_dim(x.cols());
  const Eigen::Index n = x.rows();
  const Eigen::Index dim = x.cols();
  const Eigen::Index n_ls = length_scales_.size();
  std::vector<Matrix> grads(static_cast<std::size_t>(n_ls + 1), Matrix::Zero(n, n));
  Vector per_dim(dim);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) {
      double r2 = 0.0;
      for (Eigen::Index d = 0; d < dim; ++d) {
        const double l = isotropic() ? length_scales_(0) : length_scales_(d);
        const double diff = (x(i, d) - x(j, d)) / l;
        per_dim(d) = diff * diff;
        r2 += per_dim(d);
      }
      const double k = from_scaled_sqdist(r2);
      // dk/d(log l_d) = g(r) * r_d^2, with g depending on the family.
      double g = 0.0;
      switch (family_) {
        case KernelFamily::RBF:
          g = k;
          break;
        case KernelFamily::Matern52: {
          const double r = std::sqrt(r2);
          g = signal_variance_ * 5.0 / 3.0 * (1.0 + kSqrt5 * r) * std::exp(-kSqrt5 * r);
          break;
        }
        case KernelFamily::RationalQuadratic:
          g = signal_variance_ * std::pow(1.0 + r2 / (2.0 * alpha_), -alpha_ - 1.0);
          break;
      }
      if (isotropic()) {
        grads[0](i, j) = grads[0](j, i) = g * r2;
      } else {
        for (Eigen::Index d = 0; d < dim; ++d) {
          grads[static_cast<std::size_t>(d)](i, j) = grads[static_cast<std::size_t>(d)](j, i) = g * per_dim(d);
        }
      }
      grads[static_cast<std::size_t>(n_ls)](i, j) = grads[static_cast<std::size_t>(n_ls)](j, i) = k;
    }
  }
  return grads;
}

}  // namespace mrs
