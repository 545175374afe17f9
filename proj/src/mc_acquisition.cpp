#include "mrs/mc_acquisition.hpp"

#include <cmath>
#include <limits>

namespace mrs {

RepresenterSet sample_representers(const GaussianProcess& gp, const Box& domain, int n_r,
                                   int n_candidates_per_point, Rng& rng) {
  if (n_r < 1 || n_candidates_per_point < 1) {
    throw InvalidArgument("representer sampling needs positive counts");
  }
  RepresenterSet reps;
  reps.points.resize(n_r, domain.dim());
  for (int r = 0; r < n_r; ++r) {
    const PointSet candidates = domain.sample(rng, n_candidates_per_point);
    const FunctionSampleBlock draw = gp.sample_joint(candidates, 1, rng);
    Eigen::Index best = 0;
    draw.values.row(0).maxCoeff(&best);
    reps.points.row(r) = candidates.row(best);
  }
  return reps;
}

Vector estimate_pstar(const Matrix& values) {
  const Eigen::Index n_f = values.rows();
  const Eigen::Index n_p = values.cols();
  if (n_f == 0 || n_p == 0) throw InvalidArgument("estimate_pstar needs a nonempty sample block");
  Vector counts = Vector::Zero(n_p);
  for (Eigen::Index s = 0; s < n_f; ++s) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < n_p; ++j) {
      if (values(s, j) > values(s, best)) best = j;
    }
    counts(best) += 1.0;
  }
  return counts / static_cast<double>(n_f);
}

Vector expected_regrets(const Matrix& values) {
  if (values.size() == 0) throw InvalidArgument("expected_regrets needs a nonempty sample block");
  if (values.cols() == 1) return Vector::Zero(1);
  const double mean_max = values.rowwise().maxCoeff().mean();
  // mean_max - colmean keeps argmin(ER) == argmax(colmean) exact in floating point.
  return (mean_max - values.colwise().mean().array()).matrix().transpose();
}

double expected_regret(const FunctionSampleBlock& block, Eigen::Index candidate) {
  if (candidate < 0 || candidate >= block.n_points()) throw InvalidArgument("candidate index out of range");
  return expected_regrets(block.values)(candidate);
}

double discrete_entropy(const Vector& weights) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (weights(i) > 0.0) h -= weights(i) * std::log(weights(i));
  }
  return h;
}

GaussianProcess fantasize(const GaussianProcess& gp, const FantasyObservation& obs) {
  return gp.condition_on(obs.x, obs.y);
}

double McValues::get(McKind kind) const {
  switch (kind) {
    case McKind::EntropySearch: return entropy_search;
    case McKind::MinimumRegret: return minimum_regret;
    case McKind::MinimumRegretPoint: return minimum_regret_point;
  }
  return 0.0;
}

McAcquisition::McAcquisition(const GaussianProcess& gp, RepresenterSet representers,
                             const McSettings& settings, Rng& rng)
    : gp_(gp), reps_(std::move(representers)), settings_(settings) {
  if (settings_.n_f < 1 || settings_.n_y < 1) throw InvalidArgument("n_f and n_y must be positive");
  if (reps_.size() < 1) throw InvalidArgument("representer set is empty");
  const Eigen::Index n_r = reps_.size();

  const Prediction pred = gp_.predict(reps_.points, true);
  mean_r_ = pred.mean;
  whitened_reps_ = gp_.whiten(reps_.points);
  const CholeskyResult chol = robust_cholesky(pred.covariance);
  cov_r_ = pred.covariance;
  cov_r_.diagonal().array() += chol.jitter;
  cov_r_llt_.compute(cov_r_);

  draws_ = standard_normal(rng, settings_.n_f, n_r);
  if (!settings_.reuse_samples) pstar_draws_ = standard_normal(rng, settings_.n_f, n_r);

  fantasy_quantiles_.resize(settings_.n_y);
  if (settings_.stratified_y) {
    for (int m = 0; m < settings_.n_y; ++m) {
      fantasy_quantiles_(m) = normal_quantile((m + 0.5) / settings_.n_y);
    }
  } else {
    fantasy_quantiles_ = standard_normal(rng, settings_.n_y, 1).col(0);
  }

  const Matrix factor = cov_r_llt_.matrixL();
  Matrix g = draws_ * factor.transpose();
  g.rowwise() += mean_r_.transpose();
  const Vector zero = Vector::Zero(n_r);
  Summary now = summarize(g, g.colwise().mean().transpose(), zero);
  if (!settings_.reuse_samples) {
    Matrix g2 = pstar_draws_ * factor.transpose();
    g2.rowwise() += mean_r_.transpose();
    now.weights = summarize(g2, g2.colwise().mean().transpose(), zero).weights;
  }
  current_w_ = now.weights;
  current_er_ = now.regrets;
  reps_.weights = current_w_;
  current_entropy_ = discrete_entropy(current_w_);
  current_weighted_regret_ = current_w_.dot(current_er_);
  current_min_regret_ = current_er_.minCoeff();
}

McAcquisition::Summary McAcquisition::summarize(const Matrix& g, const Vector& g_colmean,
                                                const Vector& shift) {
  const Eigen::Index n_f = g.rows();
  const Eigen::Index n_r = g.cols();
  Vector row_max = g.col(0).array() + shift(0);
  Eigen::VectorXi arg(n_f);
  arg.setZero();
  for (Eigen::Index j = 1; j < n_r; ++j) {
    const double* col = g.col(j).data();
    const double d = shift(j);
    const int jj = static_cast<int>(j);
    for (Eigen::Index i = 0; i < n_f; ++i) {
      const double v = col[i] + d;
      if (v > row_max(i)) {
        row_max(i) = v;
        arg(i) = jj;
      }
    }
  }
  Summary out;
  out.weights = Vector::Zero(n_r);
  for (Eigen::Index i = 0; i < n_f; ++i) out.weights(arg(i)) += 1.0;
  out.weights /= static_cast<double>(n_f);
  if (n_r == 1) {
    out.regrets = Vector::Zero(1);
    return out;
  }
  const double mean_max = row_max.mean();
  out.regrets = (mean_max - (g_colmean + shift).array()).matrix();
  return out;
}

McValues McAcquisition::evaluate(const Eigen::Ref<const Vector>& x, Rng* fresh) const {
  if (!settings_.common_random_numbers && fresh == nullptr) {
    throw InvalidArgument("evaluation without common random numbers needs a fresh generator");
  }
  const Kernel& kernel = gp_.kernel();
  const auto [mu_q, var_q] = gp_.moments(x);
  const double s2 = var_q + gp_.noise_variance();
  // No information can be gained from a query whose outcome is already known.
  if (!(s2 > 1e-12 * kernel.signal_variance())) return {};
  const double s = std::sqrt(s2);

  Vector cov_rq = kernel.cross(reps_.points, x);
  if (gp_.data().size() > 0) cov_rq.noalias() -= whitened_reps_.transpose() * gp_.whiten(x);
  const Vector c = cov_rq / s;

  Eigen::LLT<Matrix> updated = cov_r_llt_;
  updated.rankUpdate(c, -1.0);
  Matrix factor;
  if (updated.info() == Eigen::Success && (updated.matrixLLT().diagonal().array() > 0.0).all()) {
    factor = updated.matrixL();
  } else {
    factor = robust_cholesky(cov_r_ - c * c.transpose()).factor;
  }

  const Eigen::Index n_r = reps_.size();
  auto fantasy_block = [&](const Matrix& z) {
    Matrix g = z * factor.transpose();
    g.rowwise() += mean_r_.transpose();
    return g;
  };

  Matrix g, g2;
  Vector g_mean, g2_mean;
  if (settings_.common_random_numbers) {
    g = fantasy_block(draws_);
    g_mean = g.colwise().mean().transpose();
    if (!settings_.reuse_samples) {
      g2 = fantasy_block(pstar_draws_);
      g2_mean = g2.colwise().mean().transpose();
    }
  }

  double entropy_sum = 0.0, weighted_sum = 0.0, min_sum = 0.0;
  for (int m = 0; m < settings_.n_y; ++m) {
    if (!settings_.common_random_numbers) {
      g = fantasy_block(standard_normal(*fresh, settings_.n_f, n_r));
      g_mean = g.colwise().mean().transpose();
      if (!settings_.reuse_samples) {
        g2 = fantasy_block(standard_normal(*fresh, settings_.n_f, n_r));
        g2_mean = g2.colwise().mean().transpose();
      }
    }
    const Vector shift = fantasy_quantiles_(m) * c;
    Summary after = summarize(g, g_mean, shift);
    if (!settings_.reuse_samples) after.weights = summarize(g2, g2_mean, shift).weights;
    entropy_sum += discrete_entropy(after.weights);
    weighted_sum += after.weights.dot(after.regrets);
    min_sum += after.regrets.minCoeff();
  }
  const double n_y = settings_.n_y;
  McValues out;
  out.entropy_search = current_entropy_ - entropy_sum / n_y;
  out.minimum_regret = current_weighted_regret_ - weighted_sum / n_y;
  out.minimum_regret_point = current_min_regret_ - min_sum / n_y;
  return out;
}

double McAcquisition::evaluate(McKind kind, const Eigen::Ref<const Vector>& x, Rng* fresh) const {
  return evaluate(x, fresh).get(kind);
}

namespace {
double one_shot(McKind kind, const GaussianProcess& gp, const Eigen::Ref<const Vector>& x,
                const RepresenterSet& reps, int n_f, int n_y, Rng& rng) {
  McSettings settings;
  settings.n_f = n_f;
  settings.n_y = n_y;
  const McAcquisition acq(gp, reps, settings, rng);
  return acq.evaluate(kind, x);
}
}  // namespace

double acq_es(const GaussianProcess& gp, const Eigen::Ref<const Vector>& x, const RepresenterSet& reps,
              int n_f, int n_y, Rng& rng) {
  return one_shot(McKind::EntropySearch, gp, x, reps, n_f, n_y, rng);
}

double acq_mrs(const GaussianProcess& gp, const Eigen::Ref<const Vector>& x, const RepresenterSet& reps,
               int n_f, int n_y, Rng& rng) {
  return one_shot(McKind::MinimumRegret, gp, x, reps, n_f, n_y, rng);
}

double acq_mrs_point(const GaussianProcess& gp, const Eigen::Ref<const Vector>& x,
                     const RepresenterSet& reps, int n_f, int n_y, Rng& rng) {
  return one_shot(McKind::MinimumRegretPoint, gp, x, reps, n_f, n_y, rng);
}

}  // namespace mrs
