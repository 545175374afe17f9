#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mrs/gaussian_process.hpp"
#include "mrs/mc_acquisition.hpp"
#include "mrs/optimizer.hpp"

namespace mrs {

enum class Strategy { Random, Greedy, PI, EI, UCB, GpUcb, ES, MRS, MRSPoint };

std::string_view to_string(Strategy strategy);
Strategy strategy_from_string(std::string_view name);
bool is_sampling_based(Strategy strategy);

using Objective = std::function<double(const Vector&)>;

struct BoConfig {
  Box domain;
  Strategy strategy = Strategy::MRS;
  double noise_std = 1e-3;
  int n_trials = 100;
  int n_initial = 1;

  double ucb_kappa = 5.0;
  double gp_ucb_delta = 0.1;

  McSettings mc;
  int n_representers = 25;
  int n_representer_candidates = 250;
  int n_mc_candidates = 100;

  SearchBudget acq_budget{1000, 3, 100};
  SearchBudget mc_budget{1, 0, 20};
  SearchBudget recommend_budget{1000, 3, 200};
};

/// One acquisition-driven trial.
struct RunRecord {
  int trial_index = 0;
  Vector query;
  double observation = 0.0;
  Vector recommendation;
  double simple_regret = 0.0;
  double wall_time = 0.0;
};

/// Error raised when the objective fails; carries the trial index.
class TrialError : public std::runtime_error {
 public:
  TrialError(int trial, const std::string& what);
  [[nodiscard]] int trial() const { return trial_; }

 private:
  int trial_;
};

/// Maximizer of the posterior mean. Deterministic given the GP: the sweep
/// uses a fixed internal seed.
Vector recommend(const GaussianProcess& gp, const Box& domain, const SearchBudget& budget);

/// Next query according to the configured strategy.
Vector select_query(const GaussianProcess& gp, const BoConfig& config, Rng& rng);

struct BoState {
  GaussianProcess gp;
  Rng rng;
  int trial = 0;
};

/// Query, observe objective(x) plus Gaussian noise, update the posterior and
/// score the new recommendation against true_max.
RunRecord bo_step(BoState& state, const BoConfig& config, const Objective& objective, double true_max);

/// Seeds the model with n_initial uniform queries, then runs n_trials steps.
std::vector<RunRecord> run_bo(const BoConfig& config, const Kernel& kernel, const Objective& objective,
                              double true_max, Rng& rng);

}  // namespace mrs
