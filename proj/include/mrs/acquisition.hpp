#pragma once

#include "mrs/gaussian_process.hpp"

namespace mrs {

/// Reference value for improvement-based acquisitions.
struct Incumbent {
  double value;

  /// Best observed target, tau = max_i y_i.
  static Incumbent from(const Dataset& data) { return {data.max_target()}; }
};

// Formula-level forms on latent moments (mean, standard deviation). At zero
// standard deviation the limits of the closed forms are returned.
double probability_of_improvement(double mean, double stddev, double tau);
double expected_improvement(double mean, double stddev, double tau);
double upper_confidence_bound(double mean, double stddev, double kappa);

double acq_pi(const GaussianProcess& gp, const Eigen::Ref<const Vector>& x, Incumbent tau);
double acq_ei(const GaussianProcess& gp, const Eigen::Ref<const Vector>& x, Incumbent tau);
/// kappa = 0 gives the greedy (posterior mean) acquisition.
double acq_ucb(const GaussianProcess& gp, const Eigen::Ref<const Vector>& x, double kappa);

/// GP-UCB exploration weight sqrt(2 log(|D| n^2 pi^2 / (6 delta))), clamped at
/// zero when the log argument drops below one.
double gp_ucb_kappa(int n, double domain_size_proxy, double delta = 0.1);

}  // namespace mrs
