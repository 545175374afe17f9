#include "mrs/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace mrs {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::uint64_t kTestFunctionStream = 0x7e57f00dULL;
constexpr std::uint64_t kRunStream = 0x52554eULL;
constexpr double kFailureBudget = 0.05;

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

// Runs job(i) for i in [0, n) on up to `threads` workers. Results must be
// written to preallocated slots so the outcome does not depend on scheduling.
template <typename Job>
void parallel_for(int n, int threads, const Job& job) {
  const int workers = std::max(1, std::min(threads, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) job(i);
    });
  }
  for (auto& t : pool) t.join();
}

Kernel generative_kernel(Experiment e) {
  return e == Experiment::Mismatch ? Kernel::rational_quadratic(0.1, 1.0, 1.0) : Kernel::rbf(0.1, 1.0);
}

BoConfig bo_config_for(const ExperimentConfig& config, Strategy strategy) {
  BoConfig bo;
  bo.domain = Box::unit(2);
  bo.strategy = strategy;
  bo.noise_std = config.noise_std;
  bo.n_trials = config.n_trials;
  bo.mc.n_f = config.n_f;
  bo.mc.n_y = config.n_y;
  bo.n_representers = config.n_r;
  return bo;
}

CpsConfig cps_config_for(const ExperimentConfig& config, Strategy strategy) {
  CpsConfig c;
  c.strategy = strategy;
  c.noise_std = config.noise_std;
  c.mc.n_f = config.n_f;
  c.mc.n_y = config.n_y;
  c.n_representers = config.n_r;
  return c;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::string strategy_file_stem(Strategy s) {
  std::string name(to_string(s));
  std::replace(name.begin(), name.end(), '-', '_');
  return name;
}

}  // namespace

std::string_view to_string(Experiment experiment) {
  switch (experiment) {
    case Experiment::SingleTask: return "single-task";
    case Experiment::Mismatch: return "mismatch";
    case Experiment::Multitask: return "multitask";
    case Experiment::Demo1d: return "demo-1d";
  }
  return "unknown";
}

Experiment experiment_from_string(std::string_view name) {
  for (Experiment e : {Experiment::SingleTask, Experiment::Mismatch, Experiment::Multitask, Experiment::Demo1d}) {
    if (to_string(e) == name) return e;
  }
  if (name == "single_task") return Experiment::SingleTask;
  if (name == "demo1d") return Experiment::Demo1d;
  throw InvalidArgument("unknown experiment: " + std::string(name));
}

ExperimentConfig ExperimentConfig::defaults(Experiment experiment, bool paper_scale) {
  ExperimentConfig c;
  c.experiment = experiment;
  c.paper_scale = paper_scale;
  switch (experiment) {
    case Experiment::SingleTask:
    case Experiment::Mismatch:
      c.n_repetitions = paper_scale ? 250 : 50;
      c.n_trials = 100;
      c.n_f = paper_scale ? 1000 : 500;
      c.strategies = {Strategy::PI, Strategy::EI, Strategy::GpUcb, Strategy::ES, Strategy::MRS, Strategy::MRSPoint};
      break;
    case Experiment::Multitask:
      c.n_repetitions = paper_scale ? 30 : 10;
      c.n_trials = 200;
      c.n_f = paper_scale ? 1000 : 500;
      c.noise_std = 0.0;
      c.strategies = {Strategy::MRS, Strategy::ES, Strategy::UCB, Strategy::Greedy, Strategy::Random};
      c.joints = paper_scale ? std::vector<int>{1, 2, 3, 4} : std::vector<int>{1};
      break;
    case Experiment::Demo1d:
      c.n_repetitions = 1;
      c.n_trials = 501;  // grid size
      c.n_f = 1000;
      c.n_r = 41;
      c.n_y = 11;
      c.noise_std = 0.0;
      c.strategies = {Strategy::PI, Strategy::EI, Strategy::ES, Strategy::MRS, Strategy::MRSPoint};
      break;
  }
  return c;
}

void ExperimentConfig::validate() const {
  if (n_repetitions < 1) throw InvalidArgument("reps must be positive");
  if (n_trials < 1) throw InvalidArgument("trials must be positive");
  if (n_f < 1 || n_y < 1) throw InvalidArgument("nf and ny must be positive");
  if (n_r < 2) throw InvalidArgument("nr must be at least 2");
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) throw InvalidArgument("noise-std must be nonnegative");
  if (threads < 1) throw InvalidArgument("threads must be positive");
  if (output_dir.empty()) throw InvalidArgument("output directory must not be empty");
  if (experiment != Experiment::Demo1d && strategies.empty()) throw InvalidArgument("no strategies given");
  for (std::size_t i = 0; i < strategies.size(); ++i) {
    for (std::size_t j = i + 1; j < strategies.size(); ++j) {
      if (strategies[i] == strategies[j]) throw InvalidArgument("duplicate strategy: " + std::string(to_string(strategies[i])));
    }
    if (experiment == Experiment::Multitask && (strategies[i] == Strategy::PI || strategies[i] == Strategy::EI)) {
      throw InvalidArgument("pi and ei need an incumbent and are not available for multitask runs");
    }
  }
  if (experiment == Experiment::Multitask) {
    if (joints.empty()) throw InvalidArgument("multitask runs need at least one joint count");
    for (int k : joints) {
      if (k < 1 || k > 4) throw InvalidArgument("joint counts must lie in 1..4");
    }
  }
}

std::string ExperimentConfig::to_json() const {
  Json j;
  j["experiment"] = std::string(to_string(experiment));
  j["reps"] = n_repetitions;
  j["trials"] = n_trials;
  j["nf"] = n_f;
  j["nr"] = n_r;
  j["ny"] = n_y;
  j["noise_std"] = noise_std;
  j["seed"] = master_seed;
  Json names = Json::array();
  for (Strategy s : strategies) names.push_back(std::string(to_string(s)));
  j["strategies"] = names;
  j["out"] = output_dir;
  j["threads"] = threads;
  j["joints"] = joints;
  j["paper_scale"] = paper_scale;
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(std::string_view text, const ExperimentConfig& base) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  ExperimentConfig c = base;
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& key = it.key();
      const Json& v = it.value();
      if (key == "experiment") {
        c.experiment = experiment_from_string(v.get<std::string>());
      } else if (key == "reps") {
        c.n_repetitions = v.get<int>();
      } else if (key == "trials") {
        c.n_trials = v.get<int>();
      } else if (key == "nf") {
        c.n_f = v.get<int>();
      } else if (key == "nr") {
        c.n_r = v.get<int>();
      } else if (key == "ny") {
        c.n_y = v.get<int>();
      } else if (key == "noise_std" || key == "noise-std") {
        c.noise_std = v.get<double>();
      } else if (key == "seed") {
        c.master_seed = v.get<std::uint64_t>();
      } else if (key == "strategies") {
        c.strategies.clear();
        if (v.is_string()) {
          std::stringstream ss(v.get<std::string>());
          std::string item;
          while (std::getline(ss, item, ',')) {
            if (!item.empty()) c.strategies.push_back(strategy_from_string(item));
          }
        } else {
          for (const auto& s : v) c.strategies.push_back(strategy_from_string(s.get<std::string>()));
        }
      } else if (key == "out") {
        c.output_dir = v.get<std::string>();
      } else if (key == "threads") {
        c.threads = v.get<int>();
      } else if (key == "joints") {
        c.joints = v.is_number() ? std::vector<int>{v.get<int>()} : v.get<std::vector<int>>();
      } else if (key == "paper_scale" || key == "paper-scale") {
        c.paper_scale = v.get<bool>();
      } else {
        throw InvalidArgument("unknown config key: " + key);
      }
    }
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("config value has the wrong type: ") + e.what());
  }
  return c;
}

TestFunction::TestFunction(GaussianProcess gp, double true_max, Vector true_argmax)
    : gp_(std::move(gp)), true_max_(true_max), true_argmax_(std::move(true_argmax)) {}

TestFunction generate_test_function(const Kernel& kernel, const Box& domain, int n_support, Rng& rng,
                                    int grid_per_axis) {
  if (n_support < 2) throw InvalidArgument("a test function needs at least two support points");
  if (grid_per_axis < 2) throw InvalidArgument("grid_per_axis must be at least 2");
  const PointSet support = domain.sample(rng, n_support);
  const GaussianProcess prior = GaussianProcess::prior(kernel, 0.0, domain.dim());
  const FunctionSampleBlock draw = prior.sample_joint(support, 1, rng);
  const GaussianProcess gp = GaussianProcess::fit(Dataset(support, draw.values.row(0).transpose()), kernel, 0.0);

  // Dense grid sweep, processed in slabs to bound memory.
  const int dim = domain.dim();
  long long total = 1;
  for (int d = 0; d < dim; ++d) total *= grid_per_axis;
  const Vector step = domain.width() / static_cast<double>(grid_per_axis - 1);
  constexpr long long kSlab = 20000;
  double best = -std::numeric_limits<double>::infinity();
  Vector best_x = domain.lower;
  std::vector<std::pair<double, Vector>> top;
  for (long long start = 0; start < total; start += kSlab) {
    const long long count = std::min(kSlab, total - start);
    PointSet pts(count, dim);
    for (long long i = 0; i < count; ++i) {
      long long idx = start + i;
      for (int d = 0; d < dim; ++d) {
        pts(i, d) = domain.lower(d) + static_cast<double>(idx % grid_per_axis) * step(d);
        idx /= grid_per_axis;
      }
    }
    const Vector values = gp.predict_mean(pts);
    for (long long i = 0; i < count; ++i) {
      if (values(i) > best) {
        best = values(i);
        best_x = pts.row(i).transpose();
      }
    }
  }
  // Polish from the grid maximum with shrinking compass steps.
  Vector x = best_x;
  Vector h = step;
  while (h.maxCoeff() > 1e-10) {
    bool moved = false;
    for (int d = 0; d < dim && !moved; ++d) {
      for (double sign : {1.0, -1.0}) {
        Vector t = x;
        t(d) += sign * h(d);
        t = domain.clamp(t);
        const double v = gp.mean(t);
        if (v > best) {
          best = v;
          x = t;
          moved = true;
          break;
        }
      }
    }
    if (!moved) h *= 0.5;
  }
  return {gp, best, x};
}

std::vector<double> regret_bin_edges() {
  std::vector<double> edges;
  for (int e = -8; e <= 0; ++e) edges.push_back(std::pow(10.0, e));
  return edges;
}

const StrategySummary& AggregateReport::at(Strategy s) const {
  for (const auto& summary : strategies) {
    if (summary.strategy == s) return summary;
  }
  throw InvalidArgument("strategy not in report: " + std::string(to_string(s)));
}

StrategySummary summarize_regrets(Strategy strategy, const std::vector<std::vector<double>>& curves, int n_trials,
                                  int attempted) {
  StrategySummary out;
  out.strategy = strategy;
  out.attempted = attempted;
  std::vector<const std::vector<double>*> done;
  for (const auto& c : curves) {
    if (static_cast<int>(c.size()) == n_trials) done.push_back(&c);
  }
  out.completed = static_cast<int>(done.size());
  const int n_bins = static_cast<int>(regret_bin_edges().size()) - 1;
  out.final_histogram.assign(static_cast<std::size_t>(n_bins), 0);
  out.median.resize(static_cast<std::size_t>(n_trials));
  out.mean.resize(static_cast<std::size_t>(n_trials));
  for (int t = 0; t < n_trials; ++t) {
    std::vector<double> at_t;
    at_t.reserve(done.size());
    for (const auto* c : done) at_t.push_back((*c)[static_cast<std::size_t>(t)]);
    out.median[static_cast<std::size_t>(t)] = median_of(at_t);
    out.mean[static_cast<std::size_t>(t)] = mean_of(at_t);
  }
  for (const auto* c : done) {
    const double r = c->back();
    int bin = r > 0.0 ? static_cast<int>(std::floor(std::log10(r))) + 8 : 0;
    bin = std::clamp(bin, 0, n_bins - 1);
    out.final_histogram[static_cast<std::size_t>(bin)]++;
    if (r > kOutlierRegret) out.outliers++;
  }
  if (!done.empty()) {
    out.final_median = out.median.back();
    out.final_mean = out.mean.back();
  } else {
    out.final_median = out.final_mean = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::filesystem::path target(path);
  const std::filesystem::path tmp = target.string() + ".tmp";
  try {
    if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
      out << contents;
      if (!out.flush()) throw IoError("failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
  } catch (const std::filesystem::filesystem_error& e) {
    throw IoError(e.what());
  }
}

namespace {

struct RunSlot {
  std::vector<RunRecord> records;
  std::string error;
  bool ok = false;
};

struct CpsSlot {
  std::vector<EpisodeRecord> records;
  std::string error;
  bool ok = false;
};

std::vector<TestFunction> make_test_functions(const ExperimentConfig& config) {
  std::vector<std::optional<TestFunction>> slots(static_cast<std::size_t>(config.n_repetitions));
  const Kernel kernel = generative_kernel(config.experiment);
  parallel_for(config.n_repetitions, config.threads, [&](int rep) {
    Rng rng(derive_seed(config.master_seed, static_cast<std::uint64_t>(rep), kTestFunctionStream,
                        static_cast<std::uint64_t>(config.experiment)));
    slots[static_cast<std::size_t>(rep)] = generate_test_function(kernel, Box::unit(2), 250, rng);
  });
  std::vector<TestFunction> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::vector<std::vector<RunSlot>> run_single_task_grid(const ExperimentConfig& config,
                                                       const std::vector<TestFunction>& functions) {
  const int n_s = static_cast<int>(config.strategies.size());
  const int n_rep = config.n_repetitions;
  std::vector<std::vector<RunSlot>> slots(static_cast<std::size_t>(n_s),
                                          std::vector<RunSlot>(static_cast<std::size_t>(n_rep)));
  const Kernel surrogate = Kernel::rbf(0.1, 1.0);
  // Repetition-major order keeps partial progress spread over strategies.
  parallel_for(n_s * n_rep, config.threads, [&](int job) {
    const int rep = job / n_s;
    const int si = job % n_s;
    const Strategy strategy = config.strategies[static_cast<std::size_t>(si)];
    RunSlot& slot = slots[static_cast<std::size_t>(si)][static_cast<std::size_t>(rep)];
    const TestFunction& f = functions[static_cast<std::size_t>(rep)];
    Rng rng(derive_seed(config.master_seed, static_cast<std::uint64_t>(rep),
                        kRunStream + static_cast<std::uint64_t>(strategy), static_cast<std::uint64_t>(config.experiment)));
    try {
      slot.records = run_bo(bo_config_for(config, strategy), surrogate, [&f](const Vector& x) { return f(x); },
                            f.true_max(), rng);
      slot.ok = true;
    } catch (const std::exception& e) {
      slot.error = e.what();
    }
  });
  return slots;
}

std::string single_task_csv(const std::vector<RunSlot>& runs) {
  std::ostringstream out;
  out << "repetition,trial,query_0,query_1,observation,recommendation_0,recommendation_1,simple_regret\n";
  for (std::size_t rep = 0; rep < runs.size(); ++rep) {
    if (!runs[rep].ok) continue;
    for (const auto& r : runs[rep].records) {
      out << rep << ',' << r.trial_index << ',' << fmt(r.query(0)) << ',' << fmt(r.query(1)) << ','
          << fmt(r.observation) << ',' << fmt(r.recommendation(0)) << ',' << fmt(r.recommendation(1)) << ','
          << fmt(r.simple_regret) << '\n';
    }
  }
  return out.str();
}

std::string single_task_timing_csv(const std::vector<RunSlot>& runs) {
  std::ostringstream out;
  out << "repetition,trial,wall_time\n";
  for (std::size_t rep = 0; rep < runs.size(); ++rep) {
    for (const auto& r : runs[rep].records) out << rep << ',' << r.trial_index << ',' << fmt(r.wall_time) << '\n';
  }
  return out.str();
}

Json summary_json(const StrategySummary& s) {
  Json j;
  j["strategy"] = std::string(to_string(s.strategy));
  j["attempted"] = s.attempted;
  j["completed"] = s.completed;
  j["final_median_regret"] = number_or_null(s.final_median);
  j["final_mean_regret"] = number_or_null(s.final_mean);
  j["outliers"] = s.outliers;
  j["final_histogram"] = s.final_histogram;
  Json med = Json::array(), mean = Json::array();
  for (double v : s.median) med.push_back(number_or_null(v));
  for (double v : s.mean) mean.push_back(number_or_null(v));
  j["median_regret"] = med;
  j["mean_regret"] = mean;
  return j;
}

ExperimentOutcome run_single_task(const ExperimentConfig& config) {
  const std::vector<TestFunction> functions = make_test_functions(config);
  const auto slots = run_single_task_grid(config, functions);
  ExperimentOutcome outcome;
  Json report;
  report["experiment"] = std::string(to_string(config.experiment));
  report["config"] = Json::parse(config.to_json());
  report["generative_kernel"] =
      config.experiment == Experiment::Mismatch ? "rational_quadratic(l=0.1, alpha=1)" : "rbf(l=0.1)";
  report["surrogate_kernel"] = "rbf(l=0.1)";
  report["histogram_bin_edges"] = regret_bin_edges();
  report["outlier_threshold"] = kOutlierRegret;
  Json strategies = Json::array();
  Json failures = Json::array();
  const std::string prefix(to_string(config.experiment));
  for (std::size_t si = 0; si < config.strategies.size(); ++si) {
    const Strategy s = config.strategies[si];
    std::vector<std::vector<double>> curves;
    for (std::size_t rep = 0; rep < slots[si].size(); ++rep) {
      const RunSlot& slot = slots[si][rep];
      outcome.total_runs++;
      if (!slot.ok) {
        outcome.failed_runs++;
        failures.push_back({{"strategy", std::string(to_string(s))}, {"repetition", rep}, {"error", slot.error}});
        continue;
      }
      std::vector<double> c;
      for (const auto& r : slot.records) c.push_back(r.simple_regret);
      curves.push_back(std::move(c));
    }
    strategies.push_back(summary_json(summarize_regrets(s, curves, config.n_trials, config.n_repetitions)));
    const std::string stem = prefix + "_" + strategy_file_stem(s);
    const std::string csv = join_path(config.output_dir, stem + ".csv");
    const std::string timing = join_path(config.output_dir, stem + "_timing.csv");
    write_file_atomic(csv, single_task_csv(slots[si]));
    write_file_atomic(timing, single_task_timing_csv(slots[si]));
    outcome.files.push_back(csv);
    outcome.files.push_back(timing);
  }
  report["strategies"] = strategies;
  report["failures"] = failures;
  report["complete"] = outcome.failed_runs == 0;
  outcome.failure_budget_exceeded =
      outcome.failed_runs > kFailureBudget * static_cast<double>(outcome.total_runs);
  outcome.report_json = report.dump(2);
  const std::string path = join_path(config.output_dir, prefix + "_report.json");
  write_file_atomic(path, outcome.report_json + "\n");
  outcome.files.push_back(path);
  return outcome;
}

ExperimentOutcome run_multitask(const ExperimentConfig& config) {
  ExperimentOutcome outcome;
  Json report;
  report["experiment"] = "multitask";
  report["config"] = Json::parse(config.to_json());
  report["task"] = "toy_throw";
  report["deviation"] =
      "analytic toy throwing model replaces the simulated robot arm; absolute returns are not comparable";
  report["test_contexts"] = "4x4 grid of cell centers over [1, 2.5] x [-1, 1]";
  Json per_joint = Json::array();
  Json failures = Json::array();
  const int n_s = static_cast<int>(config.strategies.size());
  const int n_rep = config.n_repetitions;
  for (int k : config.joints) {
    const ContextualProblem problem = ContextualProblem::toy_throw(k);
    std::vector<std::vector<CpsSlot>> slots(static_cast<std::size_t>(n_s),
                                            std::vector<CpsSlot>(static_cast<std::size_t>(n_rep)));
    parallel_for(n_s * n_rep, config.threads, [&](int job) {
      const int rep = job / n_s;
      const int si = job % n_s;
      const Strategy strategy = config.strategies[static_cast<std::size_t>(si)];
      CpsSlot& slot = slots[static_cast<std::size_t>(si)][static_cast<std::size_t>(rep)];
      Rng rng(derive_seed(config.master_seed, static_cast<std::uint64_t>(rep),
                          kRunStream + static_cast<std::uint64_t>(strategy), 100 + static_cast<std::uint64_t>(k)));
      try {
        slot.records = run_cps(problem, cps_config_for(config, strategy), config.n_trials, rng);
        slot.ok = true;
      } catch (const std::exception& e) {
        slot.error = e.what();
      }
    });

    Json joint;
    joint["joints"] = k;
    Json strategies = Json::array();
    for (int si = 0; si < n_s; ++si) {
      const Strategy s = config.strategies[static_cast<std::size_t>(si)];
      const auto& runs = slots[static_cast<std::size_t>(si)];
      std::vector<int> checkpoints;
      std::vector<std::vector<double>> values;  // [checkpoint][run]
      int completed = 0;
      for (std::size_t rep = 0; rep < runs.size(); ++rep) {
        outcome.total_runs++;
        if (!runs[rep].ok) {
          outcome.failed_runs++;
          failures.push_back({{"joints", k}, {"strategy", std::string(to_string(s))}, {"repetition", rep},
                              {"error", runs[rep].error}});
          continue;
        }
        ++completed;
        std::size_t c = 0;
        for (const auto& r : runs[rep].records) {
          if (std::isnan(r.policy_return)) continue;
          if (c == checkpoints.size()) {
            checkpoints.push_back(r.episode);
            values.emplace_back();
          }
          values[c++].push_back(r.policy_return);
        }
      }
      Json entry;
      entry["strategy"] = std::string(to_string(s));
      entry["attempted"] = n_rep;
      entry["completed"] = completed;
      entry["episodes"] = checkpoints;
      Json mean = Json::array(), median = Json::array(), sem = Json::array();
      for (const auto& v : values) {
        const double m = mean_of(v);
        double var = 0.0;
        for (double x : v) var += (x - m) * (x - m);
        var = v.size() > 1 ? var / static_cast<double>(v.size() - 1) : 0.0;
        mean.push_back(number_or_null(m));
        median.push_back(number_or_null(median_of(v)));
        sem.push_back(std::sqrt(var / static_cast<double>(v.size())));
      }
      entry["mean_return"] = mean;
      entry["median_return"] = median;
      entry["sem_return"] = sem;
      entry["final_mean_return"] = values.empty() ? Json(nullptr) : number_or_null(mean_of(values.back()));
      strategies.push_back(entry);

      std::ostringstream csv, timing;
      csv << "repetition,episode";
      for (int d = 0; d < problem.context_dim(); ++d) csv << ",context_" << d;
      for (int d = 0; d < problem.parameter_dim(); ++d) csv << ",theta_" << d;
      csv << ",episode_return,policy_return\n";
      timing << "repetition,episode,wall_time\n";
      for (std::size_t rep = 0; rep < runs.size(); ++rep) {
        for (const auto& r : runs[rep].records) {
          csv << rep << ',' << r.episode;
          for (Eigen::Index d = 0; d < r.context.size(); ++d) csv << ',' << fmt(r.context(d));
          for (Eigen::Index d = 0; d < r.theta.size(); ++d) csv << ',' << fmt(r.theta(d));
          csv << ',' << fmt(r.episode_return) << ',' << fmt(r.policy_return) << '\n';
          timing << rep << ',' << r.episode << ',' << fmt(r.wall_time) << '\n';
        }
      }
      const std::string stem = "multitask_j" + std::to_string(k) + "_" + strategy_file_stem(s);
      const std::string csv_path = join_path(config.output_dir, stem + ".csv");
      const std::string timing_path = join_path(config.output_dir, stem + "_timing.csv");
      write_file_atomic(csv_path, csv.str());
      write_file_atomic(timing_path, timing.str());
      outcome.files.push_back(csv_path);
      outcome.files.push_back(timing_path);
    }
    joint["strategies"] = strategies;
    per_joint.push_back(joint);
  }
  report["results"] = per_joint;
  report["failures"] = failures;
  report["complete"] = outcome.failed_runs == 0;
  outcome.failure_budget_exceeded =
      outcome.failed_runs > kFailureBudget * static_cast<double>(outcome.total_runs);
  outcome.report_json = report.dump(2);
  const std::string path = join_path(config.output_dir, "multitask_report.json");
  write_file_atomic(path, outcome.report_json + "\n");
  outcome.files.push_back(path);
  return outcome;
}

ExperimentOutcome run_demo1d(const ExperimentConfig& config) {
  Rng rng(derive_seed(config.master_seed, 0, kRunStream, static_cast<std::uint64_t>(Experiment::Demo1d)));
  McSettings settings;
  settings.n_f = config.n_f;
  settings.n_y = config.n_y;
  const Demo1dTable table = demo1d(demo1d_fixture(), config.n_trials, settings, config.n_r, rng);
  ExperimentOutcome outcome;
  const std::string csv = join_path(config.output_dir, "demo1d.csv");
  write_file_atomic(csv, demo1d_csv(table));
  outcome.files.push_back(csv);
  Eigen::Index i_mu = 0, i_er = 0, i_es = 0, i_mrs = 0, i_point = 0;
  table.mu.maxCoeff(&i_mu);
  table.expected_regret.minCoeff(&i_er);
  table.a_es.maxCoeff(&i_es);
  table.a_mrs.maxCoeff(&i_mrs);
  table.a_mrs_point.maxCoeff(&i_point);
  Json report;
  report["experiment"] = "demo-1d";
  report["config"] = Json::parse(config.to_json());
  report["argmax_mean"] = table.x(i_mu);
  report["argmin_expected_regret"] = table.x(i_er);
  report["argmax_es"] = table.x(i_es);
  report["argmax_mrs"] = table.x(i_mrs);
  report["argmax_mrs_point"] = table.x(i_point);
  report["complete"] = true;
  outcome.report_json = report.dump(2);
  const std::string path = join_path(config.output_dir, "demo1d_report.json");
  write_file_atomic(path, outcome.report_json + "\n");
  outcome.files.push_back(path);
  outcome.total_runs = 1;
  return outcome;
}

}  // namespace

std::vector<std::vector<std::vector<double>>> run_regret_grid(const ExperimentConfig& config) {
  config.validate();
  if (config.experiment != Experiment::SingleTask && config.experiment != Experiment::Mismatch) {
    throw InvalidArgument("regret grids exist for single-task and mismatch experiments only");
  }
  const auto slots = run_single_task_grid(config, make_test_functions(config));
  std::vector<std::vector<std::vector<double>>> out(slots.size());
  for (std::size_t si = 0; si < slots.size(); ++si) {
    for (const auto& slot : slots[si]) {
      std::vector<double> c;
      if (slot.ok) {
        for (const auto& r : slot.records) c.push_back(r.simple_regret);
      }
      out[si].push_back(std::move(c));
    }
  }
  return out;
}

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
  config.validate();
  switch (config.experiment) {
    case Experiment::SingleTask:
    case Experiment::Mismatch:
      return run_single_task(config);
    case Experiment::Multitask:
      return run_multitask(config);
    case Experiment::Demo1d:
      return run_demo1d(config);
  }
  throw InvalidArgument("unhandled experiment");
}

}  // namespace mrs
