#include "mrs/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace mrs {

void SearchBudget::validate() const {
  if (n_global_candidates < 1 || n_local_restarts < 0 || local_max_iters < 0) {
    throw InvalidArgument("search budget counts must be nonnegative with at least one global candidate");
  }
}

namespace {

constexpr std::array<int, 16> kPrimes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

double radical_inverse(std::uint64_t index, int base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
    f /= base;
  }
  return result;
}

// Compass search: poll +-step along each axis, move on improvement, halve the
// step otherwise.
Maximum pattern_search(const ScalarFunction& acq, const Box& domain, Maximum start, int max_iters,
                       double initial_step, double min_step) {
  Vector step = initial_step * domain.width();
  const Vector floor_step = min_step * domain.width();
  for (int it = 0; it < max_iters; ++it) {
    bool moved = false;
    for (int d = 0; d < domain.dim() && !moved; ++d) {
      if (step(d) <= 0.0) continue;
      for (double sign : {1.0, -1.0}) {
        Vector trial = start.point;
        trial(d) += sign * step(d);
        trial = domain.clamp(trial);
        if (trial(d) == start.point(d)) continue;
        const double v = acq(trial);
        if (std::isfinite(v) && v > start.value) {
          start = {trial, v};
          moved = true;
          break;
        }
      }
    }
    if (!moved) {
      step *= 0.5;
      if ((step.array() <= floor_step.array()).all()) break;
    }
  }
  return start;
}

}  // namespace

PointSet scrambled_halton(int n, int dim, Rng& rng) {
  if (dim < 1 || dim > static_cast<int>(kPrimes.size())) {
    throw InvalidArgument("scrambled_halton supports 1..16 dimensions");
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector shift(dim);
  for (int d = 0; d < dim; ++d) shift(d) = unif(rng);
  PointSet pts(n, dim);
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < dim; ++d) {
      double v = radical_inverse(static_cast<std::uint64_t>(i) + 1, kPrimes[static_cast<std::size_t>(d)]) + shift(d);
      pts(i, d) = v - std::floor(v);
    }
  }
  return pts;
}

Maximum maximize_closed_form(const ScalarFunction& acq, const Box& domain, const SearchBudget& budget,
                             Rng& rng) {
  budget.validate();
  const PointSet sweep = domain.from_unit(scrambled_halton(budget.n_global_candidates, domain.dim(), rng));
  std::vector<double> values(static_cast<std::size_t>(sweep.rows()));
  for (Eigen::Index i = 0; i < sweep.rows(); ++i) {
    const double v = acq(sweep.row(i).transpose());
    values[static_cast<std::size_t>(i)] = std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  if (!std::isfinite(values[order[0]])) throw NumericalError("acquisition is non-finite on every sweep point");

  Maximum best{sweep.row(static_cast<Eigen::Index>(order[0])).transpose(), values[order[0]]};
  const auto n_local = std::min<std::size_t>(static_cast<std::size_t>(budget.n_local_restarts), order.size());
  for (std::size_t k = 0; k < n_local; ++k) {
    const std::size_t idx = order[k];
    if (!std::isfinite(values[idx])) break;
    Maximum local = pattern_search(acq, domain, {sweep.row(static_cast<Eigen::Index>(idx)).transpose(), values[idx]},
                                   budget.local_max_iters, 0.05, 1e-9);
    if (local.value > best.value) best = local;
  }
  return best;
}

Maximum maximize_mc_acq(const ScalarFunction& acq, const Box& domain, const PointSet& candidates,
                        const SearchBudget& budget) {
  if (candidates.rows() == 0) throw InvalidArgument("maximize_mc_acq needs candidates");
  Maximum best{domain.clamp(candidates.row(0).transpose()), -std::numeric_limits<double>::infinity()};
  for (Eigen::Index i = 0; i < candidates.rows(); ++i) {
    const Vector x = domain.clamp(candidates.row(i).transpose());
    const double v = acq(x);
    if (std::isfinite(v) && v > best.value) best = {x, v};
  }
  if (!std::isfinite(best.value)) {
    best.value = acq(best.point);
    return best;
  }
  if (budget.local_max_iters <= 0) return best;

  // Coordinate polish with a fixed evaluation budget.
  int evals = 0;
  Vector step = 0.02 * domain.width();
  while (evals < budget.local_max_iters) {
    bool moved = false;
    for (int d = 0; d < domain.dim() && evals < budget.local_max_iters; ++d) {
      for (double sign : {1.0, -1.0}) {
        if (evals >= budget.local_max_iters) break;
        Vector trial = best.point;
        trial(d) += sign * step(d);
        trial = domain.clamp(trial);
        if (trial(d) == best.point(d)) continue;
        const double v = acq(trial);
        ++evals;
        if (std::isfinite(v) && v > best.value) {
          best = {trial, v};
          moved = true;
          break;
        }
      }
    }
    if (!moved) {
      step *= 0.5;
      if (step.maxCoeff() < 1e-12) break;
    }
  }
  return best;
}

PointSet with_space_filling_points(const PointSet& seeds, const Box& domain, int extra, Rng& rng) {
  PointSet out(seeds.rows() + std::max(extra, 0), domain.dim());
  if (seeds.rows() > 0) out.topRows(seeds.rows()) = seeds;
  if (extra > 0) out.bottomRows(extra) = domain.from_unit(scrambled_halton(extra, domain.dim(), rng));
  return out;
}

}  // namespace mrs
