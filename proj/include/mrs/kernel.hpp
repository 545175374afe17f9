#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mrs/common.hpp"

namespace mrs {

enum class KernelFamily { RBF, Matern52, RationalQuadratic };

std::string_view to_string(KernelFamily family);
KernelFamily kernel_family_from_string(std::string_view name);

/// Stationary covariance function.
///
/// Length scales are either isotropic (one entry, shared by all input
/// dimensions) or anisotropic (one entry per input dimension). `alpha` is
/// only read by the rational quadratic family.
class Kernel {
 public:
  Kernel(KernelFamily family, Vector length_scales, double signal_variance, double alpha = 1.0);

  static Kernel rbf(double length_scale, double signal_variance = 1.0);
  static Kernel matern52(Vector length_scales, double signal_variance = 1.0);
  static Kernel rational_quadratic(double length_scale, double alpha, double signal_variance = 1.0);

  [[nodiscard]] KernelFamily family() const { return family_; }
  [[nodiscard]] const Vector& length_scales() const { return length_scales_; }
  [[nodiscard]] double signal_variance() const { return signal_variance_; }
  [[nodiscard]] double alpha() const { return alpha_; }
  [[nodiscard]] bool isotropic() const { return length_scales_.size() == 1; }

  /// Covariance between two single points.
  [[nodiscard]] double value(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) const;
  /// Covariance matrix between the rows of `a` and the rows of `b`.
  [[nodiscard]] Matrix operator()(const PointSet& a, const PointSet& b) const;
  /// Covariance between each row of `a` and the single point `b`.
  [[nodiscard]] Vector cross(const PointSet& a, const Eigen::Ref<const Vector>& b) const;

  // Hyperparameter vector in log space: [log l_1 .. log l_L, log signal_variance].
  [[nodiscard]] Vector log_params() const;
  [[nodiscard]] Kernel with_log_params(const Eigen::Ref<const Vector>& log_params) const;

  /// Derivatives of K(x, x) with respect to each entry of log_params().
  [[nodiscard]] std::vector<Matrix> log_param_gradients(const PointSet& x) const;

 private:
  void check_dim(Eigen::Index dim) const;
  [[nodiscard]] double from_scaled_sqdist(double r2) const;

  KernelFamily family_;
  Vector length_scales_;
  double signal_variance_;
  double alpha_;
};

}  // namespace mrs
