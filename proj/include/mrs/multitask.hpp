#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "mrs/bo_loop.hpp"
#include "mrs/mle.hpp"

namespace mrs {

/// Analytic stand-in for a simulated throwing arm. Parameters are
/// theta = (tau, g_1..g_k) with tau the execution time and g_i joint offsets;
/// the context is the 2D target position.
class ToyThrowTask {
 public:
  explicit ToyThrowTask(int n_joints = 1);

  [[nodiscard]] int n_joints() const { return n_joints_; }
  [[nodiscard]] Box parameter_box() const;
  [[nodiscard]] static Box context_box();
  [[nodiscard]] Vector default_theta() const;

  /// Landing point b(theta) of the ball.
  [[nodiscard]] Vector landing(const Eigen::Ref<const Vector>& theta) const;
  [[nodiscard]] double penalty(const Eigen::Ref<const Vector>& theta) const;
  /// -||s - b(theta)||^2 - 0.01 penalty(theta); throws for theta outside the box.
  [[nodiscard]] double operator()(const Eigen::Ref<const Vector>& theta, const Eigen::Ref<const Vector>& s) const;

 private:
  int n_joints_;
};

struct ContextualProblem {
  Box parameter_box;
  Box context_box;
  std::function<double(const Vector& theta, const Vector& s)> return_fn;

  static ContextualProblem toy_throw(int n_joints);

  [[nodiscard]] int parameter_dim() const { return parameter_box.dim(); }
  [[nodiscard]] int context_dim() const { return context_box.dim(); }
  /// Box over the joint input (theta, s).
  [[nodiscard]] Box joint_box() const;
  /// Joint box with the context coordinates pinned to s.
  [[nodiscard]] Box slice(const Eigen::Ref<const Vector>& s) const;
  [[nodiscard]] Vector join(const Eigen::Ref<const Vector>& theta, const Eigen::Ref<const Vector>& s) const;
  [[nodiscard]] Vector theta_of(const Eigen::Ref<const Vector>& joint) const;
  [[nodiscard]] Vector sample_context(Rng& rng) const { return context_box.sample(rng); }
};

/// Centers of a per_axis x per_axis grid of equal cells over a 2D context box.
PointSet context_grid(const Box& context_box, int per_axis = 4);

struct CpsConfig {
  Strategy strategy = Strategy::MRS;
  double ucb_kappa = 5.0;
  int n_initial = 5;
  double noise_std = 0.0;
  /// Floor on the GP noise variance; keeps repeated contexts well conditioned.
  double min_noise_variance = 1e-6;

  McSettings mc;
  int n_representers = 25;
  int n_representer_candidates = 250;
  int n_mc_candidates = 100;
  SearchBudget acq_budget{1000, 3, 100};
  SearchBudget mc_budget{1, 0, 20};
  SearchBudget policy_budget{500, 2, 100};

  HyperBounds bounds;
  MleOptions mle;
  /// Policy evaluation on the context grid after every eval_every episodes.
  int eval_every = 10;
};

struct EpisodeRecord {
  int episode = 0;
  Vector context;
  Vector theta;
  double episode_return = 0.0;
  /// Mean grid return of the greedy policy; NaN when not evaluated.
  double policy_return = 0.0;
  double wall_time = 0.0;
};

struct CpsState {
  GaussianProcess gp;
  Rng rng;
  int episode = 0;
};

/// theta maximizing the posterior mean at context s. Deterministic given the GP.
Vector greedy_policy(const GaussianProcess& gp, const ContextualProblem& problem, const Eigen::Ref<const Vector>& s,
                     const SearchBudget& budget);

/// Mean true return of the greedy policy over the grid contexts.
double evaluate_policy(const GaussianProcess& gp, const ContextualProblem& problem, const PointSet& grid,
                       const SearchBudget& budget);

/// Parameters for context s chosen by the configured strategy.
Vector select_parameters(const GaussianProcess& gp, const ContextualProblem& problem,
                         const Eigen::Ref<const Vector>& s, const CpsConfig& config, Rng& rng);

/// Posterior over the joint space with MLE hyperparameters, warm-started from
/// `previous` when given.
GaussianProcess refit_joint_gp(const Dataset& data, const CpsConfig& config, const std::optional<Kernel>& previous,
                               Rng& rng);

/// One episode: sample a context, choose parameters, observe the return and
/// refit the joint GP.
EpisodeRecord cps_step(CpsState& state, const ContextualProblem& problem, const CpsConfig& config);

/// n_initial random episodes followed by n_episodes acquisition-driven ones.
/// Initial episodes are not recorded.
std::vector<EpisodeRecord> run_cps(const ContextualProblem& problem, const CpsConfig& config, int n_episodes,
                                   Rng& rng);

}  // namespace mrs
