#include <gtest/gtest.h>

#include <cmath>

#include "mrs/optimizer.hpp"
#include "test_util.hpp"

using namespace mrs;

namespace {
Vector pt(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  std::copy(v.begin(), v.end(), x.data());
  return x;
}
}  // namespace

TEST(Halton, PointsInUnitCubeAndDeterministic) {
  Rng a(3), b(3);
  const PointSet p = scrambled_halton(500, 5, a);
  EXPECT_EQ(p, scrambled_halton(500, 5, b));
  EXPECT_GE(p.minCoeff(), 0.0);
  EXPECT_LT(p.maxCoeff(), 1.0);
  // Low discrepancy: every half of every axis holds close to half the points.
  for (int d = 0; d < 5; ++d) {
    const auto lower = (p.col(d).array() < 0.5).count();
    EXPECT_NEAR(static_cast<double>(lower), 250.0, 10.0);
  }
  EXPECT_THROW(scrambled_halton(10, 17, a), InvalidArgument);
}

TEST(MaximizeClosedForm, ConcaveQuadratic) {
  const Box box(pt({-1.0, 0.0, 2.0}), pt({1.0, 3.0, 2.5}));
  const Vector c = pt({0.3, 2.2, 2.1});
  Rng rng(1);
  const Maximum m = maximize_closed_form([&](const Vector& x) { return -(x - c).squaredNorm(); }, box,
                                         SearchBudget{}, rng);
  EXPECT_LT((m.point - c).cwiseAbs().maxCoeff(), 1e-4);
  EXPECT_TRUE(box.contains(m.point));
}

TEST(MaximizeClosedForm, OptimumOnBoundaryStaysInside) {
  const Box box = Box::unit(2);
  Rng rng(2);
  const Maximum m = maximize_closed_form([](const Vector& x) { return x.sum(); }, box, SearchBudget{}, rng);
  EXPECT_TRUE(box.contains(m.point));
  EXPECT_NEAR(m.value, 2.0, 1e-6);
}

TEST(MaximizeClosedForm, ConstantFunction) {
  Rng rng(4);
  const Box box = Box::unit(3);
  const Maximum m = maximize_closed_form([](const Vector&) { return 7.0; }, box, SearchBudget{}, rng);
  EXPECT_EQ(m.value, 7.0);
  EXPECT_TRUE(box.contains(m.point));
}

TEST(MaximizeClosedForm, NeverWorseThanSweep) {
  Rng rng(5), replay(5);
  const Box box = Box::unit(2);
  auto f = [](const Vector& x) { return std::sin(13 * x(0)) * std::cos(7 * x(1)); };
  SearchBudget budget{200, 2, 50};
  const Maximum m = maximize_closed_form(f, box, budget, rng);
  const PointSet sweep = scrambled_halton(200, 2, replay);
  double best = -1e300;
  for (Eigen::Index i = 0; i < sweep.rows(); ++i) best = std::max(best, f(sweep.row(i).transpose()));
  EXPECT_GE(m.value, best);
}

TEST(MaximizeClosedForm, PosteriorMeanMatchesDenseGrid) {
  Rng rng(9);
  const Dataset data = oracle::random_dataset(rng, 5, 2);
  const GaussianProcess gp = GaussianProcess::fit(data, Kernel::rbf(0.3), 1e-4);
  const Maximum m = maximize_closed_form([&](const Vector& x) { return gp.mean(x); }, Box::unit(2),
                                         SearchBudget{}, rng);
  const int n = 1000;
  PointSet grid(n * n, 2);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      grid(i * n + j, 0) = (i + 0.5) / n;
      grid(i * n + j, 1) = (j + 0.5) / n;
    }
  }
  const double grid_max = gp.predict_mean(grid).maxCoeff();
  EXPECT_NEAR(m.value, grid_max, 1e-3);
  EXPECT_GE(m.value, grid_max - 1e-3);
}

TEST(MaximizeClosedForm, RejectsBadInputs) {
  Rng rng(1);
  EXPECT_THROW(maximize_closed_form([](const Vector&) { return 0.0; }, Box::unit(1), SearchBudget{0, 1, 1}, rng),
               InvalidArgument);
  EXPECT_THROW(maximize_closed_form([](const Vector&) { return std::nan(""); }, Box::unit(1), SearchBudget{}, rng),
               NumericalError);
}

TEST(MaximizeMcAcq, PicksBestCandidateAndSingleCandidate) {
  const Box box = Box::unit(1);
  PointSet cands(3, 1);
  cands << 0.1, 0.5, 0.9;
  auto f = [](const Vector& x) { return x(0) == 0.5 ? 1.0 : 0.0; };
  const Maximum m = maximize_mc_acq(f, box, cands, SearchBudget{1, 0, 0});
  EXPECT_EQ(m.point(0), 0.5);
  const Maximum single = maximize_mc_acq(f, box, cands.topRows(1), SearchBudget{1, 0, 0});
  EXPECT_EQ(single.point(0), 0.1);
  EXPECT_THROW(maximize_mc_acq(f, box, PointSet(0, 1), SearchBudget{}), InvalidArgument);
}

TEST(MaximizeMcAcq, PolishOnlyAcceptsImprovements) {
  const Box box = Box::unit(2);
  PointSet cands(2, 2);
  cands << 0.2, 0.2, 0.6, 0.7;
  const Vector c = pt({0.63, 0.66});
  int calls = 0;
  auto f = [&](const Vector& x) {
    ++calls;
    return -(x - c).squaredNorm();
  };
  const Maximum m = maximize_mc_acq(f, box, cands, SearchBudget{1, 0, 40});
  EXPECT_EQ(calls, 2 + 40);
  EXPECT_GT(m.value, -(cands.row(1).transpose() - c).squaredNorm());
  EXPECT_NEAR(m.value, f(m.point), 0.0);
  EXPECT_TRUE(box.contains(m.point));
}

TEST(WithSpaceFillingPoints, KeepsSeedsAndAddsPoints) {
  Rng rng(3);
  const Box box(pt({2.0}), pt({4.0}));
  PointSet seeds(2, 1);
  seeds << 2.5, 3.5;
  const PointSet all = with_space_filling_points(seeds, box, 8, rng);
  ASSERT_EQ(all.rows(), 10);
  EXPECT_EQ(all.topRows(2), seeds);
  for (Eigen::Index i = 0; i < all.rows(); ++i) EXPECT_TRUE(box.contains(all.row(i).transpose()));
}
