#include "mrs/acquisition.hpp"

#include <cmath>
#include <numbers>

namespace mrs {

double probability_of_improvement(double mean, double stddev, double tau) {
  if (!(stddev > 0.0)) return mean > tau ? 1.0 : 0.0;
  return normal_cdf((mean - tau) / stddev);
}

double expected_improvement(double mean, double stddev, double tau) {
  if (!(stddev > 0.0)) return std::max(mean - tau, 0.0);
  const double gamma = (mean - tau) / stddev;
  return std::max(stddev * (gamma * normal_cdf(gamma) + normal_pdf(gamma)), 0.0);
}

double upper_confidence_bound(double mean, double stddev, double kappa) { return mean + kappa * stddev; }

double acq_pi(const GaussianProcess& gp, const Eigen::Ref<const Vector>& x, Incumbent tau) {
  const auto [mu, var] = gp.moments(x);
  return probability_of_improvement(mu, std::sqrt(var), tau.value);
}

double acq_ei(const GaussianProcess& gp, const Eigen::Ref<const Vector>& x, Incumbent tau) {
  const auto [mu, var] = gp.moments(x);
  return expected_improvement(mu, std::sqrt(var), tau.value);
}

double acq_ucb(const GaussianProcess& gp, const Eigen::Ref<const Vector>& x, double kappa) {
  if (kappa < 0.0) throw InvalidArgument("UCB kappa must be nonnegative");
  if (kappa == 0.0) return gp.mean(x);
  const auto [mu, var] = gp.moments(x);
  return upper_confidence_bound(mu, std::sqrt(var), kappa);
}

double gp_ucb_kappa(int n, double domain_size_proxy, double delta) {
  if (n < 1) throw InvalidArgument("GP-UCB trial index starts at 1");
  if (!(domain_size_proxy > 0.0) || !(delta > 0.0)) {
    throw InvalidArgument("GP-UCB needs a positive domain size proxy and delta");
  }
  const double nn = static_cast<double>(n);
  const double arg = domain_size_proxy * nn * nn * std::numbers::pi * std::numbers::pi / (6.0 * delta);
  return std::sqrt(2.0 * std::max(std::log(arg), 0.0));
}

}  // namespace mrs
