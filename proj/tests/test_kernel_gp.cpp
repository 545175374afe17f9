#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mrs/gaussian_process.hpp"
#include "mrs/kernel.hpp"
#include "test_util.hpp"

using namespace mrs;

namespace {
Vector pt(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  std::copy(v.begin(), v.end(), x.data());
  return x;
}
}  // namespace

TEST(Kernel, ZeroLagReturnsSignalVariance) {
  Rng rng(1);
  for (auto k : {Kernel::rbf(0.3, 2.5), Kernel::matern52(pt({0.2, 0.7}), 2.5),
                 Kernel::rational_quadratic(0.1, 1.0, 2.5)}) {
    const Vector x = Box::unit(2).sample(rng);
    EXPECT_DOUBLE_EQ(k.value(x, x), 2.5);
  }
}

TEST(Kernel, HandEvaluatedValues) {
  const Vector a = pt({0.0, 0.0});
  const Vector b = pt({0.1, 0.0});
  EXPECT_NEAR(Kernel::rbf(0.1).value(a, b), std::exp(-0.5), 1e-12);
  EXPECT_NEAR(Kernel::rbf(0.1).value(a, b), 0.606531, 1e-6);
  EXPECT_NEAR(Kernel::rational_quadratic(0.1, 1.0).value(a, b), 2.0 / 3.0, 1e-12);
  // Matern-5/2 at r = 1: (1 + sqrt5 + 5/3) exp(-sqrt5)
  const double s5 = std::sqrt(5.0);
  EXPECT_NEAR(Kernel::matern52(pt({0.1, 1.0})).value(a, b), (1 + s5 + 5.0 / 3.0) * std::exp(-s5), 1e-12);
}

TEST(Kernel, AnisotropicDimensionMismatchThrows) {
  const Kernel k = Kernel::matern52(pt({0.1, 0.2, 0.3}));
  EXPECT_THROW((void)k.value(pt({0.0, 0.0}), pt({1.0, 1.0})), InvalidArgument);
  EXPECT_THROW(Kernel(KernelFamily::RBF, pt({-1.0}), 1.0), InvalidArgument);
  EXPECT_THROW(Kernel::rbf(0.1, 0.0), InvalidArgument);
}

TEST(Kernel, GramMatrixSymmetricPsdAndBounded) {
  Rng rng(7);
  for (auto k : {Kernel::rbf(0.1), Kernel::matern52(pt({0.3, 0.05}), 3.0),
                 Kernel::rational_quadratic(0.2, 0.5)}) {
    const PointSet x = Box::unit(2).sample(rng, 60);
    Matrix g = k(x, x);
    EXPECT_LT((g - g.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LE(g.maxCoeff(), k.signal_variance() + 1e-15);
    EXPECT_NO_THROW((void)robust_cholesky(g));
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(g);
    EXPECT_GT(eig.eigenvalues().minCoeff(), -1e-6 * k.signal_variance());
  }
}

TEST(Kernel, LogParamGradientsMatchFiniteDifferences) {
  Rng rng(3);
  const PointSet x = Box::unit(2).sample(rng, 6);
  for (auto k : {Kernel::rbf(0.4, 1.3), Kernel::matern52(pt({0.3, 0.6}), 0.7),
                 Kernel::rational_quadratic(0.5, 2.0, 1.1)}) {
    const auto grads = k.log_param_gradients(x);
    const Vector p = k.log_params();
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      Vector hi = p, lo = p;
      hi(i) += 1e-6;
      lo(i) -= 1e-6;
      const Matrix fd = (k.with_log_params(hi)(x, x) - k.with_log_params(lo)(x, x)) / 2e-6;
      EXPECT_LT((fd - grads[static_cast<std::size_t>(i)]).cwiseAbs().maxCoeff(), 1e-7);
    }
  }
}

TEST(GaussianProcess, PriorMomentsWithoutData) {
  const auto gp = GaussianProcess::prior(Kernel::rbf(0.2, 1.7), 0.0, 2);
  Rng rng(2);
  const PointSet q = Box::unit(2).sample(rng, 5);
  const Prediction p = gp.predict(q);
  EXPECT_TRUE(p.mean.isZero());
  EXPECT_TRUE((p.variance.array() == 1.7).all());
}

TEST(GaussianProcess, SingleNoiseFreeObservationInterpolates) {
  Dataset d(1);
  d.append(pt({0.3}), 1.25);
  const auto gp = GaussianProcess::fit(d, Kernel::rbf(0.2), 0.0);
  const auto [mu, var] = gp.moments(pt({0.3}));
  EXPECT_DOUBLE_EQ(mu, 1.25);
  EXPECT_NEAR(var, 0.0, 1e-12);
}

TEST(GaussianProcess, SmallNoiseReproducesTrainingTargets) {
  Rng rng(11);
  const Dataset d = oracle::random_dataset(rng, 5, 2);
  const auto gp = GaussianProcess::fit(d, Kernel::rbf(0.3), 1e-6);
  const Vector mu = gp.predict_mean(d.inputs);
  EXPECT_LT((mu - d.targets).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(GaussianProcess, NoiseFreeTrainingPointsHaveZeroVariance) {
  Rng rng(12);
  const Dataset d = oracle::random_dataset(rng, 8, 2);
  const auto gp = GaussianProcess::fit(d, Kernel::matern52(pt({0.3, 0.4})), 0.0);
  const Prediction p = gp.predict(d.inputs);
  EXPECT_LT((p.mean - d.targets).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT(p.variance.maxCoeff(), 1e-8);
}

TEST(GaussianProcess, MatchesDenseSolveOracle) {
  Rng rng(13);
  const Kernel k = Kernel::rbf(0.35, 1.4);
  const Dataset d = oracle::random_dataset(rng, 3, 2);
  const PointSet q = Box::unit(2).sample(rng, 2);
  const auto gp = GaussianProcess::fit(d, k, 0.01);
  const Prediction p = gp.predict(q, true);
  const auto oracle = oracle::dense_posterior(d, k, 0.01, q);
  EXPECT_LT((p.mean - oracle.mean).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT((p.covariance - oracle.cov).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT((p.covariance.diagonal() - p.variance).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(GaussianProcess, FactorReproducesRegularizedGram) {
  Rng rng(14);
  const Kernel k = Kernel::rbf(0.2);
  const Dataset d = oracle::random_dataset(rng, 30, 2);
  const auto gp = GaussianProcess::fit(d, k, 1e-4);
  Matrix a = k(d.inputs, d.inputs);
  a.diagonal().array() += 1e-4 + gp.jitter();
  const Matrix rec = gp.factor() * gp.factor().transpose();
  EXPECT_LT((rec - a).norm() / a.norm(), 1e-8);
}

TEST(GaussianProcess, DuplicateNoiseFreeInputsUseJitter) {
  Dataset d(1);
  d.append(pt({0.5}), 1.0);
  d.append(pt({0.5}), 1.0);
  const auto gp = GaussianProcess::fit(d, Kernel::rbf(0.1), 0.0);
  EXPECT_GT(gp.jitter(), 0.0);
  EXPECT_LE(gp.jitter(), 1e-6);
  EXPECT_NEAR(gp.mean(pt({0.5})), 1.0, 1e-6);
}

TEST(GaussianProcess, PredictiveVariancesStayInRange) {
  Rng rng(15);
  for (int rep = 0; rep < 20; ++rep) {
    const Dataset d = oracle::random_dataset(rng, 10, 2);
    const auto gp = GaussianProcess::fit(d, Kernel::rbf(0.15, 2.0), rep % 2 ? 0.0 : 1e-3);
    const Prediction p = gp.predict(Box::unit(2).sample(rng, 50));
    EXPECT_GE(p.variance.minCoeff(), 0.0);
    EXPECT_LE(p.variance.maxCoeff(), 2.0 + 1e-12);
  }
}

TEST(GaussianProcess, ConditioningNeverIncreasesVariance) {
  Rng rng(16);
  for (int rep = 0; rep < 20; ++rep) {
    const Dataset d = oracle::random_dataset(rng, 6, 2);
    const auto gp = GaussianProcess::fit(d, Kernel::rbf(0.2), 0.0);
    const Vector xq = Box::unit(2).sample(rng);
    const auto gp2 = gp.condition_on(xq, 0.3);
    const PointSet q = Box::unit(2).sample(rng, 40);
    const Vector before = gp.predict(q).variance;
    const Vector after = gp2.predict(q).variance;
    EXPECT_LE((after - before).maxCoeff(), 1e-8);
  }
}

TEST(GaussianProcess, ConditionOnMatchesFullRefit) {
  Rng rng(17);
  for (int rep = 0; rep < 10; ++rep) {
    const Kernel k = Kernel::rbf(0.25);
    Dataset d = oracle::random_dataset(rng, 7, 2);
    const double noise = rep % 2 ? 1e-6 : 1e-2;
    const auto gp = GaussianProcess::fit(d, k, noise);
    const Vector xq = Box::unit(2).sample(rng);
    const auto updated = gp.condition_on(xq, -0.4);
    d.append(xq, -0.4);
    const auto refit = GaussianProcess::fit(d, k, noise);
    const PointSet q = Box::unit(2).sample(rng, 20);
    const Prediction a = updated.predict(q, true);
    const Prediction b = refit.predict(q, true);
    EXPECT_LT((a.mean - b.mean).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT((a.covariance - b.covariance).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(GaussianProcess, ConditionOnExistingNoiseFreePointFallsBack) {
  Rng rng(18);
  const Dataset d = oracle::random_dataset(rng, 4, 1);
  const auto gp = GaussianProcess::fit(d, Kernel::rbf(0.3), 0.0);
  const Vector x0 = d.inputs.row(0).transpose();
  const auto gp2 = gp.condition_on(x0, d.targets(0));
  EXPECT_EQ(gp2.data().size(), 5);
  EXPECT_NEAR(gp2.mean(x0), d.targets(0), 1e-5);
}

TEST(GaussianProcess, LogMarginalLikelihoodSinglePoint) {
  Dataset d(1);
  d.append(pt({0.0}), 0.0);
  const auto gp = GaussianProcess::fit(d, Kernel::rbf(1.0), 0.0);
  EXPECT_NEAR(gp.log_marginal_likelihood(), -0.5 * std::log(2 * M_PI), 1e-12);
  EXPECT_NEAR(gp.log_marginal_likelihood(), -0.918939, 1e-6);
}

TEST(GaussianProcess, LogMarginalLikelihoodZeroTargetsIsDeterminantTerm) {
  Rng rng(19);
  Dataset d = oracle::random_dataset(rng, 4, 2);
  d.targets.setZero();
  const Kernel k = Kernel::rbf(0.3);
  const auto gp = GaussianProcess::fit(d, k, 0.1);
  Matrix a = k(d.inputs, d.inputs);
  a.diagonal().array() += 0.1;
  EXPECT_NEAR(gp.log_marginal_likelihood(), -0.5 * std::log(a.determinant()) - 2.0 * std::log(2 * M_PI), 1e-10);
}

TEST(GaussianProcess, LogMarginalLikelihoodMatchesDenseOracle) {
  Rng rng(20);
  const Kernel k = Kernel::matern52(pt({0.4, 0.2}), 1.5);
  const Dataset d = oracle::random_dataset(rng, 4, 2);
  const auto gp = GaussianProcess::fit(d, k, 0.05);
  EXPECT_NEAR(gp.log_marginal_likelihood(), oracle::dense_lml(d, k, 0.05), 1e-8);
}

TEST(GaussianProcess, LogMarginalLikelihoodPermutationInvariant) {
  Rng rng(21);
  const Kernel k = Kernel::rbf(0.3);
  const Dataset d = oracle::random_dataset(rng, 12, 2);
  std::vector<int> perm(12);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Dataset shuffled(2);
  for (int i : perm) shuffled.append(d.inputs.row(i).transpose(), d.targets(i));
  EXPECT_NEAR(GaussianProcess::fit(d, k, 1e-3).log_marginal_likelihood(),
              GaussianProcess::fit(shuffled, k, 1e-3).log_marginal_likelihood(), 1e-9);
}

TEST(GaussianProcess, SampleJointZeroDrawsGivePriorMean) {
  const auto gp = GaussianProcess::prior(Kernel::rbf(0.1), 0.0, 1);
  const FunctionSampleBlock b = gp.sample_joint(PointSet::Constant(1, 1, 0.4), Matrix::Zero(5, 1));
  EXPECT_TRUE(b.values.isZero());
}

TEST(GaussianProcess, SampleJointDeterministicGivenDraws) {
  Rng rng(22);
  const Dataset d = oracle::random_dataset(rng, 5, 2);
  const auto gp = GaussianProcess::fit(d, Kernel::rbf(0.3), 1e-4);
  const PointSet q = Box::unit(2).sample(rng, 7);
  const Matrix z = standard_normal(rng, 30, 7);
  const auto a = gp.sample_joint(q, z);
  const auto b = gp.sample_joint(q, z);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.base_draws, z);
  EXPECT_THROW((void)gp.sample_joint(q, Matrix::Zero(3, 2)), InvalidArgument);
}

TEST(GaussianProcess, SampleJointMomentsMatchPrediction) {
  Rng rng(23);
  const Dataset d = oracle::random_dataset(rng, 4, 1);
  const auto gp = GaussianProcess::fit(d, Kernel::rbf(0.3), 1e-3);
  PointSet q(2, 1);
  q << 0.21, 0.37;
  const int n = 100000;
  const auto block = gp.sample_joint(q, n, rng);
  const Prediction p = gp.predict(q, true);
  const Vector emp_mean = block.values.colwise().mean().transpose();
  const Matrix centered = block.values.rowwise() - emp_mean.transpose();
  const Matrix emp_cov = centered.transpose() * centered / (n - 1.0);
  for (int i = 0; i < 2; ++i) {
    const double se_mean = std::sqrt(p.covariance(i, i) / n);
    EXPECT_LT(std::abs(emp_mean(i) - p.mean(i)), 3 * se_mean + 1e-12);
    for (int j = 0; j < 2; ++j) {
      // Var of a sample covariance entry is (S_ii S_jj + S_ij^2) / n.
      const double se_cov = std::sqrt((p.covariance(i, i) * p.covariance(j, j) +
                                       p.covariance(i, j) * p.covariance(i, j)) / n);
      EXPECT_LT(std::abs(emp_cov(i, j) - p.covariance(i, j)), 3 * se_cov + 1e-12);
    }
  }
}
