#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "mrs/mc_acquisition.hpp"
#include "test_util.hpp"

using namespace mrs;

namespace {
Vector pt(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  std::copy(v.begin(), v.end(), x.data());
  return x;
}

PointSet rows1d(std::initializer_list<double> v) { return pt(v); }

GaussianProcess three_point_gp() {
  Dataset data(1);
  data.append(pt({0.35}), 0.4);
  data.append(pt({0.9}), -0.3);
  return GaussianProcess::fit(data, Kernel::rbf(0.25), 1e-2);
}

RepresenterSet reps_of(const PointSet& p) { return {p, Vector()}; }
}  // namespace

TEST(EstimatePstar, CountsArgmaxPerDraw) {
  Matrix v(4, 2);
  v << 1, 0, 0, 1, 1, 0, 0, 1;
  const Vector w = estimate_pstar(v);
  EXPECT_DOUBLE_EQ(w(0), 0.5);
  EXPECT_DOUBLE_EQ(w(1), 0.5);

  Matrix all(3, 4);
  all << 5, 1, 2, 3, 9, 0, 0, 0, 1, -1, -2, 0;
  EXPECT_EQ(estimate_pstar(all), pt({1.0, 0.0, 0.0, 0.0}));
}

TEST(EstimatePstar, TiesGoToLowestIndex) {
  Matrix v(2, 3);
  v << 1, 1, 1, 0, 2, 2;
  EXPECT_EQ(estimate_pstar(v), pt({0.5, 0.5, 0.0}));
}

TEST(EstimatePstar, ExchangeablePriorIsUniform) {
  const GaussianProcess prior = GaussianProcess::prior(Kernel::rbf(0.5), 0.0, 1);
  // Equidistant points on a circle would be exchangeable; in 1D use three
  // mutually uncorrelated points.
  const PointSet pts = rows1d({0.0, 10.0, 20.0});
  Rng rng(3);
  const int n_f = 10000;
  const Vector w = estimate_pstar(prior.sample_joint(pts, n_f, rng));
  EXPECT_NEAR(w.sum(), 1.0, 1e-12);
  const double se = std::sqrt((1.0 / 3.0) * (2.0 / 3.0) / n_f);
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(w(j), 1.0 / 3.0, 3 * se);
}

TEST(ExpectedRegret, HandValues) {
  FunctionSampleBlock one;
  one.values = Matrix(1, 3);
  one.values << 0.2, 0.9, -1.0;
  EXPECT_DOUBLE_EQ(expected_regret(one, 1), 0.0);
  EXPECT_DOUBLE_EQ(expected_regret(one, 0), 0.7);

  FunctionSampleBlock two;
  two.values = Matrix(2, 2);
  two.values << 1, 0, 0, 1;
  EXPECT_DOUBLE_EQ(expected_regret(two, 0), 0.5);
  EXPECT_DOUBLE_EQ(expected_regret(two, 1), 0.5);
  EXPECT_THROW((void)expected_regret(two, 2), InvalidArgument);
}

TEST(ExpectedRegret, DifferenceIdentityAndArgmin) {
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    const Dataset data = oracle::random_dataset(rng, 4, 2);
    const GaussianProcess gp = GaussianProcess::fit(data, Kernel::rbf(0.3), 1e-3);
    const FunctionSampleBlock block = gp.sample_joint(Box::unit(2).sample(rng, 20), 200, rng);
    const Vector er = expected_regrets(block.values);
    const Vector mean = block.values.colwise().mean().transpose();
    EXPECT_GE(er.minCoeff(), 0.0);
    for (int i = 0; i < 20; ++i) {
      for (int j = 0; j < 20; ++j) EXPECT_NEAR(er(i) - er(j), mean(j) - mean(i), 1e-12);
    }
    Eigen::Index a = 0, b = 0;
    er.minCoeff(&a);
    mean.maxCoeff(&b);
    EXPECT_EQ(a, b);
  }
}

TEST(DiscreteEntropy, Values) {
  EXPECT_DOUBLE_EQ(discrete_entropy(pt({1.0, 0.0, 0.0})), 0.0);
  EXPECT_NEAR(discrete_entropy(Vector::Constant(4, 0.25)), std::log(4.0), 1e-15);
}

TEST(Representers, InsideDomain) {
  Rng rng(8);
  const Box box(pt({-1.0, 2.0}), pt({0.5, 3.0}));
  const Dataset data(2);
  const GaussianProcess gp = GaussianProcess::prior(Kernel::rbf(0.2), 0.0, 2);
  const RepresenterSet reps = sample_representers(gp, box, 30, 50, rng);
  ASSERT_EQ(reps.size(), 30);
  for (Eigen::Index i = 0; i < reps.size(); ++i) EXPECT_TRUE(box.contains(reps.points.row(i).transpose()));
  EXPECT_THROW(sample_representers(gp, box, 0, 50, rng), InvalidArgument);
}

TEST(Representers, ConcentrateAroundSharpPeak) {
  Dataset data(1);
  data.append(pt({0.3}), 4.0);
  const double l = 0.02;
  const GaussianProcess gp = GaussianProcess::fit(data, Kernel::rbf(l), 0.0);
  int ok = 0;
  for (int seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const RepresenterSet reps = sample_representers(gp, Box::unit(1), 25, 250, rng);
    const auto near = ((reps.points.col(0).array() - 0.3).abs() < 3 * l).count();
    if (2 * near >= reps.size()) ++ok;
  }
  EXPECT_EQ(ok, 20);
}

TEST(Representers, PriorIsNearUniform) {
  Rng rng(2024);
  const GaussianProcess prior = GaussianProcess::prior(Kernel::rbf(0.1), 0.0, 2);
  const RepresenterSet reps = sample_representers(prior, Box::unit(2), 1000, 250, rng);
  int counts[4] = {0, 0, 0, 0};
  for (Eigen::Index i = 0; i < reps.size(); ++i) {
    counts[(reps.points(i, 0) > 0.5 ? 1 : 0) + (reps.points(i, 1) > 0.5 ? 2 : 0)]++;
  }
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - 250.0) * (c - 250.0) / 250.0;
  EXPECT_LT(chi2, 11.345);  // chi-square(3) quantile at 0.99
}

TEST(Fantasize, MatchesRefit) {
  Rng rng(13);
  const Dataset data = oracle::random_dataset(rng, 8, 2);
  const Kernel k = Kernel::matern52(pt({0.3, 0.5}), 1.5);
  const GaussianProcess gp = GaussianProcess::fit(data, k, 1e-3);
  const PointSet q = Box::unit(2).sample(rng, 30);
  for (int t = 0; t < 5; ++t) {
    const FantasyObservation obs{Box::unit(2).sample(rng), 2.0 * (t - 2)};
    const GaussianProcess updated = fantasize(gp, obs);
    Dataset grown = data;
    grown.append(obs.x, obs.y);
    const Prediction a = updated.predict(q, true);
    const Prediction b = GaussianProcess::fit(grown, k, 1e-3).predict(q, true);
    EXPECT_LT((a.mean - b.mean).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT((a.covariance - b.covariance).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Fantasize, PosteriorMeanFantasyAndDistantPoint) {
  Rng rng(4);
  const Dataset data = oracle::random_dataset(rng, 3, 1);
  const GaussianProcess gp = GaussianProcess::fit(data, Kernel::rbf(0.1), 1e-4);
  const Vector xq = pt({0.5});
  const auto [mu, var] = gp.moments(xq);
  const GaussianProcess updated = fantasize(gp, {xq, mu});
  const auto [mu2, var2] = updated.moments(xq);
  EXPECT_NEAR(mu2, mu, 1e-10);
  EXPECT_LE(var2, 1e-4 + 1e-12);
  EXPECT_LT(var2, var);

  const Vector far = pt({0.5 + 10 * 0.1 + 5.0});
  const GaussianProcess shifted = fantasize(gp, {xq, mu + 3.0});
  EXPECT_LT(std::abs(shifted.mean(far) - gp.mean(far)), 1e-6);
}

TEST(McAcquisition, WeightsFormProbabilityVector) {
  Rng rng(1);
  const GaussianProcess gp = three_point_gp();
  const McAcquisition acq(gp, sample_representers(gp, Box::unit(1), 25, 100, rng), {}, rng);
  EXPECT_NEAR(acq.representers().weights.sum(), 1.0, 1e-12);
  EXPECT_GE(acq.representers().weights.minCoeff(), 0.0);
  EXPECT_GE(acq.current_regrets().minCoeff(), 0.0);
}

TEST(McAcquisition, ObservedPointInNoiseFreeGpIsZero) {
  Rng rng(21);
  Dataset data(1);
  data.append(pt({0.2}), 0.5);
  data.append(pt({0.7}), -0.2);
  const GaussianProcess gp = GaussianProcess::fit(data, Kernel::rbf(0.15), 0.0);
  McSettings settings;
  settings.n_f = 2000;
  const McAcquisition acq(gp, sample_representers(gp, Box::unit(1), 25, 250, rng), settings, rng);
  for (double x : {0.2, 0.7}) {
    const McValues v = acq.evaluate(pt({x}));
    EXPECT_LE(std::abs(v.entropy_search), 0.02);
    EXPECT_LE(std::abs(v.minimum_regret), 0.02);
    EXPECT_LE(std::abs(v.minimum_regret_point), 0.02);
  }
  EXPECT_GT(acq.evaluate(McKind::EntropySearch, pt({0.45})), 0.0);
}

TEST(McAcquisition, InformativeQueryUnderSymmetricPrior) {
  Rng rng(6);
  const GaussianProcess prior = GaussianProcess::prior(Kernel::rbf(0.1), 1e-4, 1);
  const RepresenterSet reps = reps_of(rows1d({0.1, 0.9}));
  EXPECT_GT(acq_es(prior, pt({0.1}), reps, 1000, 51, rng), 0.0);
  EXPECT_GT(acq_mrs_point(prior, pt({0.1}), reps, 1000, 51, rng), 0.0);
  EXPECT_GT(acq_mrs_point(prior, pt({0.6}), reps, 1000, 51, rng), 0.0);
  EXPECT_GT(acq_mrs(prior, pt({0.9}), reps, 1000, 51, rng), 0.0);
}

TEST(McAcquisition, SingleRepresenterGivesZeroRegretReduction) {
  Rng rng(9);
  const GaussianProcess gp = three_point_gp();
  const RepresenterSet reps = reps_of(rows1d({0.5}));
  for (double x : {0.0, 0.3, 0.5, 0.95}) {
    EXPECT_EQ(acq_mrs(gp, pt({x}), reps, 500, 21, rng), 0.0);
    EXPECT_EQ(acq_mrs_point(gp, pt({x}), reps, 500, 21, rng), 0.0);
    EXPECT_EQ(acq_es(gp, pt({x}), reps, 500, 21, rng), 0.0);
  }
}

TEST(McAcquisition, WrappersMatchPrecomputedEvaluator) {
  const GaussianProcess gp = three_point_gp();
  const RepresenterSet reps = reps_of(rows1d({0.2, 0.5, 0.8}));
  McSettings settings;
  settings.n_f = 300;
  settings.n_y = 11;
  const Vector x = pt({0.6});
  Rng a(77), b(77);
  const McAcquisition acq(gp, reps, settings, a);
  EXPECT_DOUBLE_EQ(acq_mrs(gp, x, reps, 300, 11, b), acq.evaluate(McKind::MinimumRegret, x));
}

TEST(McAcquisition, DeterministicGivenSeed) {
  const GaussianProcess gp = three_point_gp();
  const RepresenterSet reps = reps_of(rows1d({0.2, 0.5, 0.8}));
  Rng a(5), b(5);
  const McAcquisition first(gp, reps, {}, a);
  const McAcquisition second(gp, reps, {}, b);
  for (double x : {0.1, 0.45, 0.99}) {
    const McValues u = first.evaluate(pt({x}));
    const McValues v = second.evaluate(pt({x}));
    EXPECT_EQ(u.entropy_search, v.entropy_search);
    EXPECT_EQ(u.minimum_regret, v.minimum_regret);
    EXPECT_EQ(u.minimum_regret_point, v.minimum_regret_point);
  }
}

TEST(McAcquisition, IndependentDrawsNeedGenerator) {
  const GaussianProcess gp = three_point_gp();
  McSettings settings;
  settings.common_random_numbers = false;
  settings.n_f = 100;
  settings.n_y = 5;
  Rng rng(1);
  const McAcquisition acq(gp, reps_of(rows1d({0.2, 0.5, 0.8})), settings, rng);
  EXPECT_THROW((void)acq.evaluate(pt({0.5})), InvalidArgument);
  EXPECT_NO_THROW((void)acq.evaluate(pt({0.5}), &rng));
}

TEST(McAcquisition, RepresenterOrderDoesNotMatterBeyondNoise) {
  const GaussianProcess gp = three_point_gp();
  const PointSet fwd = rows1d({0.2, 0.5, 0.8});
  const PointSet rev = rows1d({0.8, 0.2, 0.5});
  McSettings settings;
  settings.n_f = 20000;
  for (double x : {0.15, 0.6}) {
    Rng a(1), b(2);
    const McValues u = McAcquisition(gp, reps_of(fwd), settings, a).evaluate(pt({x}));
    const McValues v = McAcquisition(gp, reps_of(rev), settings, b).evaluate(pt({x}));
    EXPECT_NEAR(u.entropy_search, v.entropy_search, 0.02);
    EXPECT_NEAR(u.minimum_regret, v.minimum_regret, 0.01);
    EXPECT_NEAR(u.minimum_regret_point, v.minimum_regret_point, 0.01);
  }
}

TEST(McAcquisition, MatchesNestedMonteCarloOracleOnThreePoints) {
  const GaussianProcess gp = three_point_gp();
  const PointSet reps = rows1d({0.2, 0.5, 0.8});
  McSettings settings;
  settings.n_f = 20000;
  settings.n_y = 101;
  for (double x : {0.05, 0.5, 0.75}) {
    const Vector xq = pt({x});
    double impl[3] = {0, 0, 0}, impl2[3] = {0, 0, 0};
    const int seeds = 5;
    for (int s = 0; s < seeds; ++s) {
      Rng rng(1000 + s);
      const McValues v = McAcquisition(gp, reps_of(reps), settings, rng).evaluate(xq);
      const double vals[3] = {v.entropy_search, v.minimum_regret, v.minimum_regret_point};
      for (int k = 0; k < 3; ++k) {
        impl[k] += vals[k] / seeds;
        impl2[k] += vals[k] * vals[k] / seeds;
      }
    }
    Rng rng(55);
    const auto ref = oracle::nested_mc(gp.data(), gp.kernel(), gp.noise_variance(), reps, xq, 20000, 200, rng);
    for (int k = 0; k < 3; ++k) {
      const double se_impl = std::sqrt(std::max(impl2[k] - impl[k] * impl[k], 0.0) / (seeds - 1));
      const double tol = 3 * std::hypot(se_impl, ref.se[k]);
      EXPECT_NEAR(impl[k], ref.value[k], tol) << "x=" << x << " kind=" << k;
    }
  }
}

TEST(McAcquisition, CommonRandomNumbersReduceVariance) {
  const GaussianProcess gp = three_point_gp();
  Rng rep_rng(3);
  const RepresenterSet reps = sample_representers(gp, Box::unit(1), 10, 100, rep_rng);
  const Vector xq = pt({0.6});
  McSettings crn;
  crn.n_f = 200;
  McSettings indep = crn;
  indep.common_random_numbers = false;
  std::vector<double> a, b;
  for (int s = 0; s < 50; ++s) {
    Rng r1(s), r2(s);
    a.push_back(McAcquisition(gp, reps, crn, r1).evaluate(McKind::MinimumRegret, xq));
    Rng fresh(10000 + s);
    b.push_back(McAcquisition(gp, reps, indep, r2).evaluate(McKind::MinimumRegret, xq, &fresh));
  }
  auto var = [](const std::vector<double>& v) {
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return acc / (v.size() - 1);
  };
  EXPECT_LE(var(a), 0.5 * var(b));
}
