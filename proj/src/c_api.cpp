#include "mrs/mrs.h"

#include <cstring>
#include <new>
#include <string>

#include "mrs/acquisition.hpp"
#include "mrs/bench.hpp"
#include "mrs/mc_acquisition.hpp"

struct mrs_gp {
  mrs::GaussianProcess gp;
};

struct mrs_mc_context {
  mrs::McAcquisition acq;
  Eigen::Index dim;
};

namespace {

thread_local std::string g_last_error;

mrs_status fail(mrs_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs body and translates exceptions. Config errors are reported as
// MRS_CONFIG by the caller passing it as the invalid-argument status.
template <typename F>
mrs_status guarded(F&& body, mrs_status invalid = MRS_INVALID_ARGUMENT) {
  try {
    g_last_error.clear();
    return body();
  } catch (const mrs::InvalidArgument& e) {
    return fail(invalid, e.what());
  } catch (const mrs::NumericalError& e) {
    return fail(MRS_NUMERICAL, e.what());
  } catch (const mrs::TrialError& e) {
    return fail(MRS_NUMERICAL, e.what());
  } catch (const mrs::IoError& e) {
    return fail(MRS_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(MRS_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MRS_INTERNAL, e.what());
  } catch (...) {
    return fail(MRS_INTERNAL, "unknown error");
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

mrs::Kernel make_kernel(const mrs_kernel_spec& spec) {
  if (spec.length_scales == nullptr || spec.n_length_scales == 0) {
    throw mrs::InvalidArgument("kernel needs at least one length scale");
  }
  mrs::Vector ls = Eigen::Map<const mrs::Vector>(spec.length_scales, static_cast<Eigen::Index>(spec.n_length_scales));
  switch (spec.family) {
    case MRS_KERNEL_RBF: return {mrs::KernelFamily::RBF, ls, spec.signal_variance};
    case MRS_KERNEL_MATERN52: return {mrs::KernelFamily::Matern52, ls, spec.signal_variance};
    case MRS_KERNEL_RATIONAL_QUADRATIC:
      return {mrs::KernelFamily::RationalQuadratic, ls, spec.signal_variance, spec.alpha};
  }
  throw mrs::InvalidArgument("unknown kernel family");
}

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

mrs::PointSet points_from(const double* x, size_t n, size_t dim) {
  if (n > 0 && x == nullptr) throw mrs::InvalidArgument("null point buffer");
  if (n == 0) return mrs::PointSet(0, static_cast<Eigen::Index>(dim));
  return Eigen::Map<const RowMajor>(x, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
}

}  // namespace

extern "C" {

const char* mrs_version(void) { return "0.1.0"; }

const char* mrs_last_error(void) { return g_last_error.c_str(); }

mrs_status mrs_gp_create(const mrs_kernel_spec* kernel, double noise_variance, const double* x, const double* y,
                         size_t n, size_t dim, mrs_gp** out) {
  return guarded([&] {
    if (kernel == nullptr || out == nullptr) throw mrs::InvalidArgument("null argument");
    if (dim == 0) throw mrs::InvalidArgument("dimension must be positive");
    if (n > 0 && y == nullptr) throw mrs::InvalidArgument("null target buffer");
    *out = nullptr;
    const mrs::Kernel k = make_kernel(*kernel);
    mrs::Dataset data(points_from(x, n, dim),
                      n == 0 ? mrs::Vector(0) : mrs::Vector(Eigen::Map<const mrs::Vector>(y, static_cast<Eigen::Index>(n))));
    *out = new mrs_gp{mrs::GaussianProcess::fit(std::move(data), k, noise_variance)};
    return MRS_OK;
  });
}

void mrs_gp_destroy(mrs_gp* gp) { delete gp; }

mrs_status mrs_gp_dim(const mrs_gp* gp, size_t* dim) {
  return guarded([&] {
    if (gp == nullptr || dim == nullptr) throw mrs::InvalidArgument("null argument");
    *dim = static_cast<size_t>(gp->gp.dim());
    return MRS_OK;
  });
}

mrs_status mrs_gp_predict(const mrs_gp* gp, const double* x, size_t n, double* mean, double* variance) {
  return guarded([&] {
    if (gp == nullptr || mean == nullptr || variance == nullptr) throw mrs::InvalidArgument("null argument");
    if (n == 0) return MRS_OK;
    const mrs::Prediction p = gp->gp.predict(points_from(x, n, static_cast<size_t>(gp->gp.dim())), false);
    for (size_t i = 0; i < n; ++i) {
      mean[i] = p.mean(static_cast<Eigen::Index>(i));
      variance[i] = p.variance(static_cast<Eigen::Index>(i));
    }
    return MRS_OK;
  });
}

mrs_status mrs_gp_log_marginal_likelihood(const mrs_gp* gp, double* out) {
  return guarded([&] {
    if (gp == nullptr || out == nullptr) throw mrs::InvalidArgument("null argument");
    *out = gp->gp.log_marginal_likelihood();
    return MRS_OK;
  });
}

mrs_status mrs_acq_closed_form(const mrs_gp* gp, mrs_closed_form kind, const double* x, double kappa, double* out) {
  return guarded([&] {
    if (gp == nullptr || x == nullptr || out == nullptr) throw mrs::InvalidArgument("null argument");
    const Eigen::Map<const mrs::Vector> point(x, gp->gp.dim());
    switch (kind) {
      case MRS_ACQ_PI: *out = mrs::acq_pi(gp->gp, point, mrs::Incumbent::from(gp->gp.data())); break;
      case MRS_ACQ_EI: *out = mrs::acq_ei(gp->gp, point, mrs::Incumbent::from(gp->gp.data())); break;
      case MRS_ACQ_UCB: *out = mrs::acq_ucb(gp->gp, point, kappa); break;
      default: throw mrs::InvalidArgument("unknown closed-form acquisition");
    }
    return MRS_OK;
  });
}

mrs_status mrs_mc_create(const mrs_gp* gp, const double* lower, const double* upper, int n_r, int n_f, int n_y,
                         uint64_t seed, mrs_mc_context** out) {
  return guarded([&] {
    if (gp == nullptr || lower == nullptr || upper == nullptr || out == nullptr) {
      throw mrs::InvalidArgument("null argument");
    }
    *out = nullptr;
    const Eigen::Index dim = gp->gp.dim();
    const mrs::Box box(Eigen::Map<const mrs::Vector>(lower, dim), Eigen::Map<const mrs::Vector>(upper, dim));
    mrs::McSettings settings;
    settings.n_f = n_f;
    settings.n_y = n_y;
    mrs::Rng rng(seed);
    mrs::RepresenterSet reps = mrs::sample_representers(gp->gp, box, n_r, 250, rng);
    *out = new mrs_mc_context{mrs::McAcquisition(gp->gp, std::move(reps), settings, rng), dim};
    return MRS_OK;
  });
}

void mrs_mc_destroy(mrs_mc_context* ctx) { delete ctx; }

mrs_status mrs_mc_evaluate(const mrs_mc_context* ctx, const double* x, mrs_mc_values* out) {
  return guarded([&] {
    if (ctx == nullptr || x == nullptr || out == nullptr) throw mrs::InvalidArgument("null argument");
    const mrs::McValues v = ctx->acq.evaluate(Eigen::Map<const mrs::Vector>(x, ctx->dim));
    out->entropy_search = v.entropy_search;
    out->minimum_regret = v.minimum_regret;
    out->minimum_regret_point = v.minimum_regret_point;
    return MRS_OK;
  });
}

mrs_status mrs_config_resolve(const char* experiment, int paper_scale, const char* overrides_json, char** resolved) {
  return guarded(
      [&] {
        if (experiment == nullptr || resolved == nullptr) throw mrs::InvalidArgument("null argument");
        *resolved = nullptr;
        mrs::ExperimentConfig c = mrs::ExperimentConfig::defaults(mrs::experiment_from_string(experiment), paper_scale != 0);
        if (overrides_json != nullptr) c = mrs::ExperimentConfig::from_json(overrides_json, c);
        c.validate();
        *resolved = copy_string(c.to_json());
        return MRS_OK;
      },
      MRS_CONFIG);
}

mrs_status mrs_run_experiment(const char* config_json, char** summary) {
  mrs::ExperimentConfig config;
  const mrs_status parsed = guarded(
      [&] {
        if (config_json == nullptr || summary == nullptr) throw mrs::InvalidArgument("null argument");
        *summary = nullptr;
        // First pass picks the experiment and scale, second overlays onto its defaults.
        const mrs::ExperimentConfig head = mrs::ExperimentConfig::from_json(config_json, mrs::ExperimentConfig{});
        config = mrs::ExperimentConfig::from_json(
            config_json, mrs::ExperimentConfig::defaults(head.experiment, head.paper_scale));
        config.validate();
        return MRS_OK;
      },
      MRS_CONFIG);
  if (parsed != MRS_OK) return parsed;
  return guarded([&] {
    const mrs::ExperimentOutcome outcome = mrs::run_experiment(config);
    *summary = copy_string(outcome.report_json);
    if (outcome.failure_budget_exceeded) {
      g_last_error = std::to_string(outcome.failed_runs) + " of " + std::to_string(outcome.total_runs) +
                     " runs failed, above the 5% budget";
      return MRS_NUMERICAL;
    }
    return MRS_OK;
  });
}

void mrs_string_free(char* s) { std::free(s); }

}  // extern "C"
