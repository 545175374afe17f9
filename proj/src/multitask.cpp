#include "mrs/multitask.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "mrs/acquisition.hpp"

namespace mrs {

namespace {
constexpr std::uint64_t kPolicySeed = 0x90d1c7ULL;
}

ToyThrowTask::ToyThrowTask(int n_joints) : n_joints_(n_joints) {
  if (n_joints < 1 || n_joints > 4) throw InvalidArgument("toy throw task supports 1 to 4 joints");
}

Box ToyThrowTask::parameter_box() const {
  Vector lo(n_joints_ + 1), hi(n_joints_ + 1);
  lo(0) = 0.4;
  hi(0) = 2.0;
  lo.tail(n_joints_).setConstant(-std::numbers::pi / 2);
  hi.tail(n_joints_).setConstant(std::numbers::pi / 2);
  return {lo, hi};
}

Box ToyThrowTask::context_box() {
  Vector lo(2), hi(2);
  lo << 1.0, -1.0;
  hi << 2.5, 1.0;
  return {lo, hi};
}

Vector ToyThrowTask::default_theta() const {
  Vector theta = Vector::Zero(n_joints_ + 1);
  theta(0) = 1.0;
  return theta;
}

Vector ToyThrowTask::landing(const Eigen::Ref<const Vector>& theta) const {
  if (theta.size() != n_joints_ + 1) throw InvalidArgument("theta has the wrong dimension");
  const Eigen::ArrayXd g = theta.tail(n_joints_).array();
  const double r = 1.75 / theta(0) * (1.0 + 0.3 * g.sin().sum() / n_joints_);
  const double phi = 0.5 * theta(1);
  Vector b(2);
  b << r * std::cos(phi), r * std::sin(phi);
  return b;
}

double ToyThrowTask::penalty(const Eigen::Ref<const Vector>& theta) const {
  return theta.tail(n_joints_).squaredNorm() + (theta(0) - 1.0) * (theta(0) - 1.0);
}

double ToyThrowTask::operator()(const Eigen::Ref<const Vector>& theta, const Eigen::Ref<const Vector>& s) const {
  if (s.size() != 2) throw InvalidArgument("context must be two-dimensional");
  if (theta.size() != n_joints_ + 1 || !parameter_box().contains(theta, 1e-12)) {
    throw InvalidArgument("theta lies outside the parameter box");
  }
  return -(s - landing(theta)).squaredNorm() - 0.01 * penalty(theta);
}

ContextualProblem ContextualProblem::toy_throw(int n_joints) {
  const ToyThrowTask task(n_joints);
  return {task.parameter_box(), ToyThrowTask::context_box(),
          [task](const Vector& theta, const Vector& s) { return task(theta, s); }};
}

Box ContextualProblem::joint_box() const {
  Vector lo(parameter_dim() + context_dim()), hi(parameter_dim() + context_dim());
  lo << parameter_box.lower, context_box.lower;
  hi << parameter_box.upper, context_box.upper;
  return {lo, hi};
}

Box ContextualProblem::slice(const Eigen::Ref<const Vector>& s) const {
  if (s.size() != context_dim()) throw InvalidArgument("context has the wrong dimension");
  Box box = joint_box();
  box.lower.tail(context_dim()) = s;
  box.upper.tail(context_dim()) = s;
  return box;
}

Vector ContextualProblem::join(const Eigen::Ref<const Vector>& theta, const Eigen::Ref<const Vector>& s) const {
  Vector x(theta.size() + s.size());
  x << theta, s;
  return x;
}

Vector ContextualProblem::theta_of(const Eigen::Ref<const Vector>& joint) const {
  return joint.head(parameter_dim());
}

PointSet context_grid(const Box& context_box, int per_axis) {
  if (context_box.dim() != 2 || per_axis < 1) throw InvalidArgument("context grid needs a 2D box");
  PointSet grid(per_axis * per_axis, 2);
  const Vector w = context_box.width() / per_axis;
  for (int i = 0; i < per_axis; ++i) {
    for (int j = 0; j < per_axis; ++j) {
      grid(i * per_axis + j, 0) = context_box.lower(0) + (i + 0.5) * w(0);
      grid(i * per_axis + j, 1) = context_box.lower(1) + (j + 0.5) * w(1);
    }
  }
  return grid;
}

Vector greedy_policy(const GaussianProcess& gp, const ContextualProblem& problem, const Eigen::Ref<const Vector>& s,
                     const SearchBudget& budget) {
  Rng rng(kPolicySeed);
  const Maximum best =
      maximize_closed_form([&](const Vector& x) { return gp.mean(x); }, problem.slice(s), budget, rng);
  return problem.parameter_box.clamp(problem.theta_of(best.point));
}

double evaluate_policy(const GaussianProcess& gp, const ContextualProblem& problem, const PointSet& grid,
                       const SearchBudget& budget) {
  if (grid.rows() == 0) throw InvalidArgument("policy evaluation needs at least one context");
  double total = 0.0;
  for (Eigen::Index i = 0; i < grid.rows(); ++i) {
    const Vector s = grid.row(i).transpose();
    total += problem.return_fn(greedy_policy(gp, problem, s, budget), s);
  }
  return total / static_cast<double>(grid.rows());
}

Vector select_parameters(const GaussianProcess& gp, const ContextualProblem& problem,
                         const Eigen::Ref<const Vector>& s, const CpsConfig& config, Rng& rng) {
  const Box slice = problem.slice(s);
  Vector x;
  switch (config.strategy) {
    case Strategy::Random:
      return problem.parameter_box.sample(rng);
    case Strategy::Greedy:
      return greedy_policy(gp, problem, s, config.acq_budget);
    case Strategy::UCB:
      x = maximize_closed_form([&](const Vector& p) { return acq_ucb(gp, p, config.ucb_kappa); }, slice,
                               config.acq_budget, rng)
              .point;
      break;
    case Strategy::ES:
    case Strategy::MRS:
    case Strategy::MRSPoint: {
      const McKind kind = config.strategy == Strategy::ES    ? McKind::EntropySearch
                          : config.strategy == Strategy::MRS ? McKind::MinimumRegret
                                                             : McKind::MinimumRegretPoint;
      RepresenterSet reps =
          sample_representers(gp, slice, config.n_representers, config.n_representer_candidates, rng);
      const McAcquisition acq(gp, std::move(reps), config.mc, rng);
      const PointSet candidates = with_space_filling_points(
          acq.representers().points, slice, config.n_mc_candidates - static_cast<int>(acq.representers().size()),
          rng);
      x = maximize_mc_acq([&](const Vector& p) { return acq.evaluate(kind, p); }, slice, candidates,
                          config.mc_budget)
              .point;
      break;
    }
    default:
      throw InvalidArgument("strategy " + std::string(to_string(config.strategy)) +
                            " needs an incumbent and is not available for contextual tasks");
  }
  return problem.parameter_box.clamp(problem.theta_of(x));
}

GaussianProcess refit_joint_gp(const Dataset& data, const CpsConfig& config, const std::optional<Kernel>& previous,
                               Rng& rng) {
  const double noise = std::max(config.noise_std * config.noise_std, config.min_noise_variance);
  MleOptions options = config.mle;
  options.anisotropic = true;
  options.warm_start = previous;
  const MleResult fit = fit_mle(data, KernelFamily::Matern52, config.bounds, noise, rng, options);
  return GaussianProcess::fit(data, fit.kernel, noise);
}

namespace {
double observe(const ContextualProblem& problem, const Vector& theta, const Vector& s, double noise_std, Rng& rng,
               int episode) {
  double value = 0.0;
  try {
    value = problem.return_fn(theta, s);
  } catch (const std::exception& e) {
    throw TrialError(episode, e.what());
  }
  if (!std::isfinite(value)) throw TrialError(episode, "return is not finite");
  if (noise_std > 0.0) value += noise_std * std::normal_distribution<double>(0.0, 1.0)(rng);
  return value;
}
}  // namespace

EpisodeRecord cps_step(CpsState& state, const ContextualProblem& problem, const CpsConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  EpisodeRecord rec;
  rec.episode = ++state.episode;
  rec.context = problem.sample_context(state.rng);
  rec.theta = select_parameters(state.gp, problem, rec.context, config, state.rng);
  rec.episode_return = observe(problem, rec.theta, rec.context, config.noise_std, state.rng, rec.episode);
  Dataset data = state.gp.data();
  data.append(problem.join(rec.theta, rec.context), rec.episode_return);
  state.gp = refit_joint_gp(data, config, state.gp.kernel(), state.rng);
  rec.policy_return = std::numeric_limits<double>::quiet_NaN();
  rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<EpisodeRecord> run_cps(const ContextualProblem& problem, const CpsConfig& config, int n_episodes,
                                   Rng& rng) {
  if (n_episodes < 1) throw InvalidArgument("run_cps needs at least one episode");
  if (config.n_initial < 1) throw InvalidArgument("contextual runs need at least one initial episode");
  Rng local(rng());
  const Box joint = problem.joint_box();
  Dataset data(joint.dim());
  for (int i = 0; i < config.n_initial; ++i) {
    const Vector theta = problem.parameter_box.sample(local);
    const Vector s = problem.sample_context(local);
    data.append(problem.join(theta, s), observe(problem, theta, s, config.noise_std, local, 0));
  }
  CpsState state{refit_joint_gp(data, config, std::nullopt, local), std::move(local), 0};
  const PointSet grid = context_grid(problem.context_box);
  std::vector<EpisodeRecord> records;
  records.reserve(static_cast<std::size_t>(n_episodes));
  for (int e = 0; e < n_episodes; ++e) {
    EpisodeRecord rec = cps_step(state, problem, config);
    if ((config.eval_every > 0 && rec.episode % config.eval_every == 0) || e + 1 == n_episodes) {
      rec.policy_return = evaluate_policy(state.gp, problem, grid, config.policy_budget);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace mrs
