#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mrs/bo_loop.hpp"
#include "mrs/multitask.hpp"

namespace mrs {

enum class Experiment { SingleTask, Mismatch, Multitask, Demo1d };

std::string_view to_string(Experiment experiment);
Experiment experiment_from_string(std::string_view name);

struct ExperimentConfig {
  Experiment experiment = Experiment::SingleTask;
  int n_repetitions = 50;
  int n_trials = 100;
  int n_f = 500;
  int n_r = 25;
  int n_y = 51;
  double noise_std = 1e-3;
  std::uint64_t master_seed = 1;
  std::vector<Strategy> strategies;
  std::string output_dir = "results";
  int threads = 1;
  /// Controllable joints of the toy throwing task, one sweep per entry.
  std::vector<int> joints;
  bool paper_scale = false;

  /// Desk-scale defaults for an experiment; paper_scale restores the larger
  /// repetition counts and sample sizes.
  static ExperimentConfig defaults(Experiment experiment, bool paper_scale = false);

  /// Throws InvalidArgument on non-positive counts, unknown or disallowed
  /// strategies, and similar problems.
  void validate() const;

  [[nodiscard]] std::string to_json() const;
  /// Overrides fields present in a JSON object. Keys mirror the CLI flags
  /// (reps, trials, nf, nr, ny, noise_std, seed, strategies, out, threads,
  /// joints, paper_scale, experiment).
  static ExperimentConfig from_json(std::string_view text, const ExperimentConfig& base);
};

/// Noise-free GP posterior mean through prior draws at random support points.
class TestFunction {
 public:
  TestFunction(GaussianProcess gp, double true_max, Vector true_argmax);

  [[nodiscard]] double operator()(const Eigen::Ref<const Vector>& x) const { return gp_.mean(x); }
  [[nodiscard]] double true_max() const { return true_max_; }
  [[nodiscard]] const Vector& true_argmax() const { return true_argmax_; }
  [[nodiscard]] const GaussianProcess& model() const { return gp_; }

 private:
  GaussianProcess gp_;
  double true_max_;
  Vector true_argmax_;
};

/// Samples n_support uniform points in the domain, draws joint prior values
/// there and returns the interpolating posterior mean. The maximum comes from
/// a grid_per_axis^dim grid followed by pattern-search polish.
TestFunction generate_test_function(const Kernel& kernel, const Box& domain, int n_support, Rng& rng,
                                    int grid_per_axis = 500);

/// Log10-spaced histogram edges 1e-8, 1e-7, ..., 1e0. Values outside the
/// range are counted in the first or last bin.
std::vector<double> regret_bin_edges();

struct StrategySummary {
  Strategy strategy = Strategy::Random;
  int attempted = 0;
  int completed = 0;
  std::vector<double> median;
  std::vector<double> mean;
  std::vector<int> final_histogram;
  int outliers = 0;
  double final_median = 0.0;
  double final_mean = 0.0;
};

struct AggregateReport {
  std::vector<StrategySummary> strategies;
  bool complete = true;

  [[nodiscard]] const StrategySummary& at(Strategy s) const;
};

/// Threshold above which a final regret counts as an outlier.
constexpr double kOutlierRegret = 1e-2;

/// Median and mean regret per trial over the completed runs (one curve per
/// run), final-trial histogram and outlier count.
StrategySummary summarize_regrets(Strategy strategy, const std::vector<std::vector<double>>& curves, int n_trials,
                                  int attempted);

struct ExperimentOutcome {
  std::string report_json;
  std::vector<std::string> files;
  int failed_runs = 0;
  int total_runs = 0;
  /// More than 5% of the runs failed.
  bool failure_budget_exceeded = false;
};

/// Runs the configured experiment, writes raw CSVs and a JSON report into
/// config.output_dir and returns the report.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

/// Per-run regret curves of a single-task or mismatch experiment, indexed by
/// [strategy][repetition]; empty curves mark failed runs. Writes nothing.
std::vector<std::vector<std::vector<double>>> run_regret_grid(const ExperimentConfig& config);

struct Demo1dFixture {
  Dataset data;
  Kernel kernel;
  double noise_variance;
  Box domain;
};

/// Noise-free 1D posterior with a well-explored peak on the left and a wide
/// unexplored stretch on the right.
Demo1dFixture demo1d_fixture();

struct Demo1dTable {
  Vector x, mu, sigma, pstar_density, expected_regret;
  Vector a_pi, a_ei, a_es, a_mrs, a_mrs_point;
  /// Unnormalized sampling-based acquisitions on the grid.
  Vector raw_es, raw_mrs, raw_mrs_point;
};

/// Acquisition surfaces on a dense grid (which includes the observed inputs).
/// Each acquisition column is scaled to grid mean 0.5.
Demo1dTable demo1d(const Demo1dFixture& fixture, int n_grid, const McSettings& settings, int n_r, Rng& rng);

std::string demo1d_csv(const Demo1dTable& table);

/// Writes `contents` to `path` via a temporary file and rename.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace mrs
