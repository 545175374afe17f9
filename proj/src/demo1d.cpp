#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "mrs/acquisition.hpp"
#include "mrs/bench.hpp"

namespace mrs {

namespace {

Vector scaled_to_half_mean(const Vector& a) {
  const double m = a.mean();
  if (!(std::abs(m) > 0.0)) return Vector::Constant(a.size(), 0.5);
  return a * (0.5 / m);
}

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

Demo1dFixture demo1d_fixture() {
  Dataset data(1);
  const double xs[] = {0.2, 0.7, 1.2, 1.7, 2.2, 2.7};
  const double ys[] = {-0.204, 0.111, 0.582, 0.646, 0.206, -0.165};
  for (int i = 0; i < 6; ++i) data.append(Vector::Constant(1, xs[i]), ys[i]);
  return {data, Kernel::rbf(0.5, 1.0), 0.0, Box(Vector::Constant(1, 0.0), Vector::Constant(1, 5.0))};
}

Demo1dTable demo1d(const Demo1dFixture& fixture, int n_grid, const McSettings& settings, int n_r, Rng& rng) {
  if (n_grid < 2) throw InvalidArgument("demo grid needs at least two points");
  if (fixture.domain.dim() != 1) throw InvalidArgument("demo fixture must be one-dimensional");
  const GaussianProcess gp = GaussianProcess::fit(fixture.data, fixture.kernel, fixture.noise_variance);

  // Regular grid with the observed inputs merged in.
  std::vector<double> xs;
  const double lo = fixture.domain.lower(0), hi = fixture.domain.upper(0);
  for (int i = 0; i < n_grid; ++i) xs.push_back(lo + (hi - lo) * i / (n_grid - 1));
  for (Eigen::Index i = 0; i < fixture.data.size(); ++i) xs.push_back(fixture.data.inputs(i, 0));
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  const auto n = static_cast<Eigen::Index>(xs.size());

  Demo1dTable t;
  t.x = Eigen::Map<const Vector>(xs.data(), n);
  const PointSet grid = t.x;
  const Prediction pred = gp.predict(grid, false);
  t.mu = pred.mean;
  t.sigma = pred.variance.cwiseSqrt();

  // Antithetic pairs keep the block mean equal to the posterior mean, so the
  // regret minimum sits exactly at the mean maximum.
  const int half = std::max(1, settings.n_f / 2);
  Matrix z(2 * half, n);
  z.topRows(half) = standard_normal(rng, half, n);
  z.bottomRows(half) = -z.topRows(half);
  const FunctionSampleBlock block = gp.sample_joint(grid, z);
  const Vector counts = estimate_pstar(block);
  const double spacing = (hi - lo) / (n_grid - 1);
  t.pstar_density = counts / spacing;
  t.expected_regret = (block.values.rowwise().maxCoeff().mean() - t.mu.array()).matrix();

  const Incumbent tau = Incumbent::from(fixture.data);
  t.a_pi.resize(n);
  t.a_ei.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    t.a_pi(i) = probability_of_improvement(t.mu(i), t.sigma(i), tau.value);
    t.a_ei(i) = expected_improvement(t.mu(i), t.sigma(i), tau.value);
  }

  RepresenterSet reps = sample_representers(gp, fixture.domain, n_r, 250, rng);
  const McAcquisition acq(gp, std::move(reps), settings, rng);
  t.raw_es.resize(n);
  t.raw_mrs.resize(n);
  t.raw_mrs_point.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const McValues v = acq.evaluate(grid.row(i).transpose());
    t.raw_es(i) = v.entropy_search;
    t.raw_mrs(i) = v.minimum_regret;
    t.raw_mrs_point(i) = v.minimum_regret_point;
  }
  t.a_pi = scaled_to_half_mean(t.a_pi);
  t.a_ei = scaled_to_half_mean(t.a_ei);
  t.a_es = scaled_to_half_mean(t.raw_es);
  t.a_mrs = scaled_to_half_mean(t.raw_mrs);
  t.a_mrs_point = scaled_to_half_mean(t.raw_mrs_point);
  return t;
}

std::string demo1d_csv(const Demo1dTable& t) {
  std::ostringstream out;
  out << "x,mu,sigma,pstar_density,expected_regret,a_pi,a_ei,a_es,a_mrs,a_mrs_point\n";
  for (Eigen::Index i = 0; i < t.x.size(); ++i) {
    out << fmt(t.x(i)) << ',' << fmt(t.mu(i)) << ',' << fmt(t.sigma(i)) << ',' << fmt(t.pstar_density(i)) << ','
        << fmt(t.expected_regret(i)) << ',' << fmt(t.a_pi(i)) << ',' << fmt(t.a_ei(i)) << ',' << fmt(t.a_es(i))
        << ',' << fmt(t.a_mrs(i)) << ',' << fmt(t.a_mrs_point(i)) << '\n';
  }
  return out.str();
}

}  // namespace mrs
