#ifndef MRS_MRS_H
#define MRS_MRS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(MRS_BUILDING_LIBRARY)
#define MRS_API __declspec(dllexport)
#else
#define MRS_API __declspec(dllimport)
#endif
#else
#define MRS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mrs_status {
  MRS_OK = 0,
  MRS_INVALID_ARGUMENT = 1,
  MRS_NUMERICAL = 2,
  MRS_IO = 3,
  MRS_CONFIG = 4,
  MRS_INTERNAL = 5
} mrs_status;

typedef enum mrs_kernel_family {
  MRS_KERNEL_RBF = 0,
  MRS_KERNEL_MATERN52 = 1,
  MRS_KERNEL_RATIONAL_QUADRATIC = 2
} mrs_kernel_family;

typedef enum mrs_closed_form {
  MRS_ACQ_PI = 0,
  MRS_ACQ_EI = 1,
  MRS_ACQ_UCB = 2
} mrs_closed_form;

typedef struct mrs_kernel_spec {
  mrs_kernel_family family;
  /* One entry for an isotropic kernel, otherwise one per input dimension. */
  const double* length_scales;
  size_t n_length_scales;
  double signal_variance;
  /* Only read for the rational quadratic family. */
  double alpha;
} mrs_kernel_spec;

typedef struct mrs_gp mrs_gp;
typedef struct mrs_mc_context mrs_mc_context;

typedef struct mrs_mc_values {
  double entropy_search;
  double minimum_regret;
  double minimum_regret_point;
} mrs_mc_values;

MRS_API const char* mrs_version(void);

/* Message for the most recent failure on the calling thread; empty after a
   successful call. Valid until the next call on the same thread. */
MRS_API const char* mrs_last_error(void);

/* Inputs are row-major, n rows of dim values. n may be 0 for the prior. */
MRS_API mrs_status mrs_gp_create(const mrs_kernel_spec* kernel, double noise_variance, const double* x,
                                 const double* y, size_t n, size_t dim, mrs_gp** out);
MRS_API void mrs_gp_destroy(mrs_gp* gp);
MRS_API mrs_status mrs_gp_dim(const mrs_gp* gp, size_t* dim);
/* Latent mean and variance at n row-major query points. */
MRS_API mrs_status mrs_gp_predict(const mrs_gp* gp, const double* x, size_t n, double* mean, double* variance);
MRS_API mrs_status mrs_gp_log_marginal_likelihood(const mrs_gp* gp, double* out);

/* PI and EI use the largest observed target as incumbent; UCB reads kappa. */
MRS_API mrs_status mrs_acq_closed_form(const mrs_gp* gp, mrs_closed_form kind, const double* x, double kappa,
                                       double* out);

/* Samples n_r representers on the box [lower, upper] and prepares the
   sampling-based acquisitions with common random numbers. */
MRS_API mrs_status mrs_mc_create(const mrs_gp* gp, const double* lower, const double* upper, int n_r, int n_f,
                                 int n_y, uint64_t seed, mrs_mc_context** out);
MRS_API void mrs_mc_destroy(mrs_mc_context* ctx);
MRS_API mrs_status mrs_mc_evaluate(const mrs_mc_context* ctx, const double* x, mrs_mc_values* out);

/* Runs one experiment described by a JSON object (keys as the CLI flags plus
   "experiment"). On success *summary receives the aggregate report, to be
   released with mrs_string_free. Returns MRS_NUMERICAL when too many runs
   failed; the report is still produced in that case. */
MRS_API mrs_status mrs_run_experiment(const char* config_json, char** summary);

/* Resolves defaults for an experiment and overlays a JSON object of
   overrides. The result is the full configuration as JSON. */
MRS_API mrs_status mrs_config_resolve(const char* experiment, int paper_scale, const char* overrides_json,
                                      char** resolved);

MRS_API void mrs_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
