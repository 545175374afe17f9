#pragma once

#include <functional>

#include "mrs/common.hpp"

namespace mrs {

struct SearchBudget {
  int n_global_candidates = 1000;
  int n_local_restarts = 3;
  int local_max_iters = 200;

  void validate() const;
};

struct Maximum {
  Vector point;
  double value;
};

using ScalarFunction = std::function<double(const Vector&)>;

/// First n points of the Halton sequence in [0,1)^dim under a random
/// Cranley-Patterson shift. Supports dim <= 16.
PointSet scrambled_halton(int n, int dim, Rng& rng);

/// Global sweep over a scrambled low-discrepancy set followed by compass
/// pattern search from the best n_local_restarts sweep points. The result is
/// never worse than the best sweep point and always lies inside the box.
Maximum maximize_closed_form(const ScalarFunction& acq, const Box& domain, const SearchBudget& budget,
                             Rng& rng);

/// Argmax of a seed-fixed stochastic acquisition over a candidate set, with
/// an optional coordinate polish (budget.local_max_iters evaluations) that only
/// accepts strict improvements of the estimate.
Maximum maximize_mc_acq(const ScalarFunction& acq, const Box& domain, const PointSet& candidates,
                        const SearchBudget& budget);

/// `extra` fresh low-discrepancy points appended below the given rows.
PointSet with_space_filling_points(const PointSet& seeds, const Box& domain, int extra, Rng& rng);

}  // namespace mrs
