#include "mrs/bo_loop.hpp"

#include <chrono>
#include <cmath>

#include "mrs/acquisition.hpp"

namespace mrs {

namespace {
constexpr std::uint64_t kRecommendSeed = 0x5eed2ec0ULL;
}

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::Random: return "random";
    case Strategy::Greedy: return "greedy";
    case Strategy::PI: return "pi";
    case Strategy::EI: return "ei";
    case Strategy::UCB: return "ucb";
    case Strategy::GpUcb: return "gp-ucb";
    case Strategy::ES: return "es";
    case Strategy::MRS: return "mrs";
    case Strategy::MRSPoint: return "mrs-point";
  }
  return "unknown";
}

Strategy strategy_from_string(std::string_view name) {
  for (Strategy s : {Strategy::Random, Strategy::Greedy, Strategy::PI, Strategy::EI, Strategy::UCB,
                     Strategy::GpUcb, Strategy::ES, Strategy::MRS, Strategy::MRSPoint}) {
    if (to_string(s) == name) return s;
  }
  throw InvalidArgument("unknown strategy: " + std::string(name));
}

bool is_sampling_based(Strategy strategy) {
  return strategy == Strategy::ES || strategy == Strategy::MRS || strategy == Strategy::MRSPoint;
}

TrialError::TrialError(int trial, const std::string& what)
    : std::runtime_error("trial " + std::to_string(trial) + ": " + what), trial_(trial) {}

Vector recommend(const GaussianProcess& gp, const Box& domain, const SearchBudget& budget) {
  Rng rng(kRecommendSeed);
  return maximize_closed_form([&](const Vector& x) { return gp.mean(x); }, domain, budget, rng).point;
}

Vector select_query(const GaussianProcess& gp, const BoConfig& config, Rng& rng) {
  const Box& domain = config.domain;
  switch (config.strategy) {
    case Strategy::Random:
      return domain.sample(rng);
    case Strategy::Greedy:
      return recommend(gp, domain, config.recommend_budget);
    case Strategy::PI: {
      const Incumbent tau = Incumbent::from(gp.data());
      return maximize_closed_form([&](const Vector& x) { return acq_pi(gp, x, tau); }, domain,
                                  config.acq_budget, rng)
          .point;
    }
    case Strategy::EI: {
      const Incumbent tau = Incumbent::from(gp.data());
      return maximize_closed_form([&](const Vector& x) { return acq_ei(gp, x, tau); }, domain,
                                  config.acq_budget, rng)
          .point;
    }
    case Strategy::UCB:
    case Strategy::GpUcb: {
      const double kappa =
          config.strategy == Strategy::UCB
              ? config.ucb_kappa
              : gp_ucb_kappa(static_cast<int>(std::max<Eigen::Index>(gp.data().size(), 1)),
                             config.acq_budget.n_global_candidates, config.gp_ucb_delta);
      return maximize_closed_form([&](const Vector& x) { return acq_ucb(gp, x, kappa); }, domain,
                                  config.acq_budget, rng)
          .point;
    }
    case Strategy::ES:
    case Strategy::MRS:
    case Strategy::MRSPoint: {
      const McKind kind = config.strategy == Strategy::ES    ? McKind::EntropySearch
                          : config.strategy == Strategy::MRS ? McKind::MinimumRegret
                                                             : McKind::MinimumRegretPoint;
      RepresenterSet reps =
          sample_representers(gp, domain, config.n_representers, config.n_representer_candidates, rng);
      const McAcquisition acq(gp, std::move(reps), config.mc, rng);
      const PointSet candidates =
          with_space_filling_points(acq.representers().points, domain,
                                    config.n_mc_candidates - static_cast<int>(acq.representers().size()), rng);
      return maximize_mc_acq([&](const Vector& x) { return acq.evaluate(kind, x); }, domain, candidates,
                             config.mc_budget)
          .point;
    }
  }
  throw InvalidArgument("unhandled strategy");
}

namespace {
double observe(const Objective& objective, const Vector& x, double noise_std, Rng& rng, int trial) {
  double value = 0.0;
  try {
    value = objective(x);
  } catch (const std::exception& e) {
    throw TrialError(trial, e.what());
  }
  if (!std::isfinite(value)) throw TrialError(trial, "objective returned a non-finite value");
  if (noise_std > 0.0) value += noise_std * std::normal_distribution<double>(0.0, 1.0)(rng);
  return value;
}
}  // namespace

RunRecord bo_step(BoState& state, const BoConfig& config, const Objective& objective, double true_max) {
  const auto start = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.trial_index = ++state.trial;
  rec.query = config.domain.clamp(select_query(state.gp, config, state.rng));
  rec.observation = observe(objective, rec.query, config.noise_std, state.rng, rec.trial_index);
  state.gp = state.gp.condition_on(rec.query, rec.observation);
  rec.recommendation = recommend(state.gp, config.domain, config.recommend_budget);
  double achieved = 0.0;
  try {
    achieved = objective(rec.recommendation);
  } catch (const std::exception& e) {
    throw TrialError(rec.trial_index, e.what());
  }
  if (!std::isfinite(achieved)) throw TrialError(rec.trial_index, "objective returned a non-finite value");
  rec.simple_regret = std::max(true_max - achieved, 0.0);
  rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<RunRecord> run_bo(const BoConfig& config, const Kernel& kernel, const Objective& objective,
                              double true_max, Rng& rng) {
  if (config.n_trials < 1) throw InvalidArgument("run_bo needs at least one trial");
  if (config.n_initial < 0) throw InvalidArgument("negative initial design size");
  BoState state{GaussianProcess::prior(kernel, config.noise_std * config.noise_std, config.domain.dim()),
                Rng(rng()), 0};
  for (int i = 0; i < config.n_initial; ++i) {
    const Vector x = config.domain.sample(state.rng);
    const double y = observe(objective, x, config.noise_std, state.rng, 0);
    state.gp = state.gp.condition_on(x, y);
  }
  std::vector<RunRecord> records;
  records.reserve(static_cast<std::size_t>(config.n_trials));
  for (int t = 0; t < config.n_trials; ++t) records.push_back(bo_step(state, config, objective, true_max));
  return records;
}

}  // namespace mrs
