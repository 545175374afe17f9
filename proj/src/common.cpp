#include "mrs/common.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

namespace mrs {

Box::Box(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size() || lower.size() == 0) {
    throw InvalidArgument("box bounds must be nonempty and of equal dimension");
  }
  if ((upper.array() < lower.array()).any()) {
    throw InvalidArgument("box upper bound below lower bound");
  }
}

Box Box::unit(int dim) { return {Vector::Zero(dim), Vector::Ones(dim)}; }

bool Box::contains(const Eigen::Ref<const Vector>& x, double tol) const {
  if (x.size() != lower.size()) return false;
  return ((x.array() >= lower.array() - tol) && (x.array() <= upper.array() + tol)).all();
}

Vector Box::clamp(const Eigen::Ref<const Vector>& x) const {
  return x.cwiseMax(lower).cwiseMin(upper);
}

Vector Box::sample(Rng& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector x(dim());
  for (int d = 0; d < dim(); ++d) x(d) = lower(d) + unif(rng) * (upper(d) - lower(d));
  return x;
}

PointSet Box::sample(Rng& rng, int n) const {
  PointSet pts(n, dim());
  for (int i = 0; i < n; ++i) pts.row(i) = sample(rng).transpose();
  return pts;
}

PointSet Box::from_unit(const PointSet& unit_points) const {
  PointSet out = unit_points;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    out.row(i) = lower.transpose().array() + unit_points.row(i).array() * width().transpose().array();
  }
  return out;
}

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("normal_quantile needs p in (0, 1)");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

Matrix standard_normal(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix z(rows, cols);
  // Row-major fill so that a prefix of rows does not depend on `rows`.
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) z(i, j) = normal(rng);
  return z;
}

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ (b + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ (c + 0x8cb92ba72f3d8dd7ULL));
  return h;
}

}  // namespace mrs
