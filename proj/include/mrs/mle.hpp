#pragma once

#include <optional>

#include "mrs/gaussian_process.hpp"
#include "mrs/kernel.hpp"

namespace mrs {

/// Box constraints on kernel hyperparameters (applied per length scale).
struct HyperBounds {
  double length_scale_min = 0.05;
  double length_scale_max = 10.0;
  double signal_variance_min = 0.01;
  double signal_variance_max = 100.0;
};

struct MleOptions {
  int n_restarts = 3;
  bool anisotropic = true;
  double alpha = 1.0;  // rational quadratic only; not optimized
  int max_iterations = 100;
  std::optional<Kernel> warm_start;
};

struct MleResult {
  Kernel kernel;
  double log_likelihood;
  // False when every local search failed numerically and the best start point
  // was returned as-is.
  bool converged;
};

/// Log marginal likelihood of `data` under (kernel, noise_variance) and, when
/// `gradient` is non-null, its gradient with respect to kernel.log_params().
double log_marginal_likelihood(const Dataset& data, const Kernel& kernel, double noise_variance,
                               Vector* gradient = nullptr);

/// Type-II maximum likelihood point estimate of length scales and signal
/// variance. Starts are drawn uniformly in log-hyperparameter space
/// (n_restarts + 1 of them, plus the optional warm start) and each is refined
/// by BFGS. Observation noise stays fixed.
MleResult fit_mle(const Dataset& data, KernelFamily family, const HyperBounds& bounds,
                  double noise_variance, Rng& rng, const MleOptions& options = {});

}  // namespace mrs
