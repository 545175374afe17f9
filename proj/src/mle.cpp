#include "mrs/mle.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace mrs {

double log_marginal_likelihood(const Dataset& data, const Kernel& kernel, double noise_variance,
                               Vector* gradient) {
  const Eigen::Index n = data.size();
  if (n == 0) {
    if (gradient) *gradient = Vector::Zero(kernel.log_params().size());
    return 0.0;
  }
  Matrix k = kernel(data.inputs, data.inputs);
  k.diagonal().array() += noise_variance;
  const auto chol = robust_cholesky(k);
  const auto l = chol.factor.triangularView<Eigen::Lower>();
  const auto lt = chol.factor.transpose().triangularView<Eigen::Upper>();
  Vector alpha = l.solve(data.targets);
  lt.solveInPlace(alpha);
  const double lml = -0.5 * data.targets.dot(alpha) - chol.factor.diagonal().array().log().sum() -
                     0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  if (gradient) {
    Matrix k_inv = Matrix::Identity(n, n);
    l.solveInPlace(k_inv);
    lt.solveInPlace(k_inv);
    const Matrix inner = alpha * alpha.transpose() - k_inv;
    const auto grads = kernel.log_param_gradients(data.inputs);
    gradient->resize(static_cast<Eigen::Index>(grads.size()));
    for (std::size_t i = 0; i < grads.size(); ++i) {
      (*gradient)(static_cast<Eigen::Index>(i)) = 0.5 * inner.cwiseProduct(grads[i]).sum();
    }
  }
  return lml;
}

namespace {

using Objective = std::function<double(const Vector&, Vector*)>;

// Minimizes f by BFGS with an Armijo backtracking line search. Never returns a
// point worse than x0.
Vector minimize_bfgs(const Objective& f, Vector x, int max_iterations, double* f_out) {
  const Eigen::Index n = x.size();
  Vector g(n);
  double fx = f(x, &g);
  Matrix h = Matrix::Identity(n, n);
  for (int it = 0; it < max_iterations; ++it) {
    if (g.lpNorm<Eigen::Infinity>() < 1e-6) break;
    Vector dir = -h * g;
    double slope = g.dot(dir);
    if (slope >= 0.0) {
      h.setIdentity();
      dir = -g;
      slope = -g.squaredNorm();
    }
    double step = 1.0;
    Vector x_new(n), g_new(n);
    double f_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls) {
      x_new = x + step * dir;
      try {
        f_new = f(x_new, &g_new);
      } catch (const NumericalError&) {
        f_new = std::numeric_limits<double>::infinity();
      }
      if (std::isfinite(f_new) && f_new <= fx + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const Vector s = x_new - x;
    const Vector y = g_new - g;
    const double sy = s.dot(y);
    const double improvement = fx - f_new;
    x = x_new;
    g = g_new;
    fx = f_new;
    if (sy > 1e-12) {
      const double rho = 1.0 / sy;
      const Matrix i_rho = Matrix::Identity(n, n) - rho * s * y.transpose();
      h = i_rho * h * i_rho.transpose() + rho * s * s.transpose();
    }
    if (improvement < 1e-10 * (1.0 + std::abs(fx))) break;
  }
  *f_out = fx;
  return x;
}

double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }

}  // namespace

MleResult fit_mle(const Dataset& data, KernelFamily family, const HyperBounds& bounds,
                  double noise_variance, Rng& rng, const MleOptions& options) {
  if (data.empty()) throw InvalidArgument("fit_mle needs at least one observation");
  if (!(bounds.length_scale_min > 0.0 && bounds.length_scale_min <= bounds.length_scale_max &&
        bounds.signal_variance_min > 0.0 && bounds.signal_variance_min <= bounds.signal_variance_max)) {
    throw InvalidArgument("hyperparameter bounds must be positive and ordered");
  }
  const Eigen::Index n_ls = options.anisotropic ? data.dim() : 1;
  const Eigen::Index n_params = n_ls + 1;
  Vector lo(n_params), hi(n_params);
  lo.head(n_ls).setConstant(std::log(bounds.length_scale_min));
  hi.head(n_ls).setConstant(std::log(bounds.length_scale_max));
  lo(n_ls) = std::log(bounds.signal_variance_min);
  hi(n_ls) = std::log(bounds.signal_variance_max);
  const Vector span = hi - lo;

  const Kernel shape(family, Vector::Ones(n_ls), 1.0, options.alpha);

  // Optimization runs over u in R^p with log-params = lo + span * sigmoid(u).
  auto to_log = [&](const Vector& u) {
    Vector p(n_params);
    for (Eigen::Index i = 0; i < n_params; ++i) p(i) = lo(i) + span(i) * sigmoid(u(i));
    return p;
  };
  auto to_u = [&](const Vector& p) {
    Vector u(n_params);
    for (Eigen::Index i = 0; i < n_params; ++i) {
      const double frac = span(i) > 0.0 ? std::clamp((p(i) - lo(i)) / span(i), 1e-6, 1.0 - 1e-6) : 0.5;
      u(i) = std::log(frac / (1.0 - frac));
    }
    return u;
  };
  const Objective negative_lml = [&](const Vector& u, Vector* grad) {
    const Vector p = to_log(u);
    Vector g;
    const double value = log_marginal_likelihood(data, shape.with_log_params(p), noise_variance, &g);
    if (!std::isfinite(value)) return std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n_params; ++i) {
      const double s = sigmoid(u(i));
      (*grad)(i) = -g(i) * span(i) * s * (1.0 - s);
    }
    return -value;
  };

  std::vector<Vector> starts;
  if (options.warm_start) {
    const Kernel& w = *options.warm_start;
    Vector p(n_params);
    for (Eigen::Index i = 0; i < n_ls; ++i) {
      p(i) = std::log(w.length_scales()(w.isotropic() ? 0 : i));
    }
    p(n_ls) = std::log(w.signal_variance());
    starts.push_back(p.cwiseMax(lo).cwiseMin(hi));
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int r = 0; r <= options.n_restarts; ++r) {
    Vector p(n_params);
    for (Eigen::Index i = 0; i < n_params; ++i) p(i) = lo(i) + span(i) * unif(rng);
    starts.push_back(p);
  }

  double best_value = -std::numeric_limits<double>::infinity();
  Vector best_params = starts.front();
  bool any_local = false;
  for (const Vector& start : starts) {
    const Vector u0 = to_u(start);
    // The transform clips starts at the bounds; score the point actually used.
    const Vector p0 = to_log(u0);
    double start_value = -std::numeric_limits<double>::infinity();
    try {
      start_value = log_marginal_likelihood(data, shape.with_log_params(p0), noise_variance);
    } catch (const NumericalError&) {
      continue;
    }
    if (start_value > best_value) {
      best_value = start_value;
      best_params = p0;
    }
    try {
      double f_opt = 0.0;
      const Vector u_opt = minimize_bfgs(negative_lml, u0, options.max_iterations, &f_opt);
      any_local = true;
      if (-f_opt > best_value) {
        best_value = -f_opt;
        best_params = to_log(u_opt);
      }
    } catch (const NumericalError&) {
      // keep the start point
    }
  }
  if (!std::isfinite(best_value)) throw NumericalError("marginal likelihood failed at every start point");
  return {shape.with_log_params(best_params), best_value, any_local};
}

}  // namespace mrs
