#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mrs/mrs.h"

namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitOther = 3;

struct Flags {
  std::optional<int> reps, trials, nf, nr, ny, threads;
  std::optional<double> noise_std;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> strategies, out;
  std::vector<int> joints;
  bool paper_scale = false;
  std::string config_path;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--reps", f.reps, "Repetitions per strategy");
  cmd->add_option("--trials", f.trials, "Evaluations per run (episodes for multitask, grid size for demo-1d)");
  cmd->add_option("--nf", f.nf, "Posterior function draws");
  cmd->add_option("--nr", f.nr, "Representer points");
  cmd->add_option("--ny", f.ny, "Fantasy observations");
  cmd->add_option("--noise-std", f.noise_std, "Observation noise standard deviation");
  cmd->add_option("--seed", f.seed, "Master seed");
  cmd->add_option("--strategies", f.strategies, "Comma-separated strategy list");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--threads", f.threads, "Worker threads");
  cmd->add_option("--joints", f.joints, "Joint counts for the throwing task")->delimiter(',');
  cmd->add_flag("--paper-scale", f.paper_scale, "Use the full-size repetition counts and sample sizes");
  cmd->add_option("--config", f.config_path, "JSON file with the same keys as the flags");
}

Json overrides_from(const Flags& f) {
  Json j = Json::object();
  if (f.reps) j["reps"] = *f.reps;
  if (f.trials) j["trials"] = *f.trials;
  if (f.nf) j["nf"] = *f.nf;
  if (f.nr) j["nr"] = *f.nr;
  if (f.ny) j["ny"] = *f.ny;
  if (f.noise_std) j["noise_std"] = *f.noise_std;
  if (f.seed) j["seed"] = *f.seed;
  if (f.strategies) j["strategies"] = *f.strategies;
  if (f.out) j["out"] = *f.out;
  if (f.threads) j["threads"] = *f.threads;
  if (!f.joints.empty()) j["joints"] = f.joints;
  if (f.paper_scale) j["paper_scale"] = true;
  return j;
}

std::optional<Json> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "bench: cannot read config file " << path << '\n';
    return std::nullopt;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  Json j = Json::parse(ss.str(), nullptr, false, true);
  if (j.is_discarded() || !j.is_object()) {
    std::cerr << "bench: config file " << path << " is not a JSON object\n";
    return std::nullopt;
  }
  return j;
}

int run(const std::string& experiment, const Flags& flags) {
  Json merged = Json::object();
  if (!flags.config_path.empty()) {
    auto file = read_config_file(flags.config_path);
    if (!file) return kExitConfig;
    merged = std::move(*file);
  }
  const Json overrides = overrides_from(flags);
  for (const auto& [key, value] : overrides.items()) merged[key] = value;
  merged["experiment"] = experiment;

  const std::string text = merged.dump();
  char* resolved = nullptr;
  // Resolve once up front so config problems surface before any work starts.
  if (mrs_config_resolve(experiment.c_str(), merged.value("paper_scale", false) ? 1 : 0, text.c_str(), &resolved) !=
      MRS_OK) {
    std::cerr << "bench: " << mrs_last_error() << '\n';
    return kExitConfig;
  }
  std::cerr << "bench: " << resolved << '\n';
  mrs_string_free(resolved);

  char* summary = nullptr;
  const mrs_status status = mrs_run_experiment(text.c_str(), &summary);
  if (summary != nullptr) {
    std::cout << summary << '\n';
    mrs_string_free(summary);
  }
  switch (status) {
    case MRS_OK: return 0;
    case MRS_CONFIG:
    case MRS_INVALID_ARGUMENT:
      std::cerr << "bench: " << mrs_last_error() << '\n';
      return kExitConfig;
    case MRS_NUMERICAL:
      std::cerr << "bench: " << mrs_last_error() << '\n';
      return kExitNumerical;
    default:
      std::cerr << "bench: " << mrs_last_error() << '\n';
      return kExitOther;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian optimization benchmark runner"};
  app.set_version_flag("--version", mrs_version());
  app.require_subcommand(1);

  Flags flags;
  std::string chosen;
  for (const char* name : {"single-task", "mismatch", "multitask", "demo-1d"}) {
    CLI::App* cmd = app.add_subcommand(name);
    add_flags(cmd, flags);
    cmd->callback([&chosen, name] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  return run(chosen, flags);
}
