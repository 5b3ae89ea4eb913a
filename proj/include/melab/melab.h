/* C interface to the measurement-error estimator library.
 *
 * Every fallible call returns a melab_status. On failure, melab_last_error()
 * describes the most recent error on the calling thread. Strings returned
 * through char** are released with melab_string_free; handles with their
 * matching *_free function.
 */
#ifndef MELAB_H
#define MELAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define MELAB_API __declspec(dllexport)
#else
#  define MELAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum melab_status {
  MELAB_OK = 0,
  MELAB_ERR_INVALID_ARGUMENT = 1,
  MELAB_ERR_DOMAIN = 2,
  MELAB_ERR_SINGULAR = 3,
  MELAB_ERR_DATA = 4,
  MELAB_ERR_ALL_SKIPPED = 5,
  MELAB_ERR_IO = 6,
  MELAB_ERR_INTERNAL = 7
} melab_status;

typedef enum melab_format {
  MELAB_FORMAT_CSV = 0,
  MELAB_FORMAT_JSON = 1,
  MELAB_FORMAT_MARKDOWN = 2
} melab_format;

typedef enum melab_estimator_kind {
  MELAB_MEAN_PER_UNIT = 0,
  MELAB_EXP_RATIO = 1,
  MELAB_WEIGHTED = 2,       /* c1 = omega1, c2 = omega2 */
  MELAB_SINGH_SOLANKI = 3,  /* alpha, beta */
  MELAB_GENERAL_CLASS = 4   /* c1 = m1, c2 = m2, alpha, beta */
} melab_estimator_kind;

typedef enum melab_error_law {
  MELAB_ERRORS_GAUSSIAN = 0,
  MELAB_ERRORS_UNIFORM = 1,
  MELAB_ERRORS_STUDENT_T = 2
} melab_error_law;

typedef struct melab_params {
  int n;
  double mu_y;
  double mu_x;
  double sigma_y2;
  double sigma_x2;
  double rho;
  double sigma_u2;
  double sigma_v2;
} melab_params;

typedef struct melab_moments {
  double V_ym;
  double V_xm;
  double V_yxm;
  double R_m;
  double C_y;
  double C_x;
} melab_moments;

typedef struct melab_estimator {
  melab_estimator_kind kind;
  double c1;
  double c2;
  double alpha;
  double beta;
} melab_estimator;

typedef struct melab_mse {
  double without_me;
  double me_contribution;
  double total;
} melab_mse;

typedef struct melab_optimum {
  double first;
  double second;
  double min_mse;
} melab_optimum;

typedef struct melab_sim_config {
  melab_params params;
  int sample_n;
  int64_t replicates;
  uint64_t seed;
  melab_error_law error_law;
  double student_df;
  int threads; /* 0: ME_LAB_THREADS or hardware concurrency */
} melab_sim_config;

typedef struct melab_sim_result {
  melab_estimator estimator;
  double empirical_bias;
  double mc_se_bias;
  double empirical_mse;
  double mc_se_mse;
  int64_t replicates_used;
  int64_t replicates_skipped;
  double theory_mse;
  double theory_bias;
} melab_sim_result;

typedef struct melab_columns {
  const char* Y_true;
  const char* X_true;
  const char* y_obs;
  const char* x_obs;
} melab_columns;

typedef struct melab_dataset melab_dataset;
typedef struct melab_report melab_report;

MELAB_API const char* melab_version(void);
MELAB_API const char* melab_last_error(void);
MELAB_API void melab_string_free(char* s);

/* Parameters */
MELAB_API melab_status melab_preset_table1(melab_params* out);
MELAB_API melab_status melab_params_validate(const melab_params* params);
MELAB_API melab_status melab_params_set(melab_params* params, const char* key, double value);
/* Keys absent from the JSON keep their value in *inout. */
MELAB_API melab_status melab_params_from_json(const char* json, melab_params* inout);
MELAB_API melab_status melab_params_to_json(const melab_params* params, char** out);
MELAB_API melab_status melab_derive_moments(const melab_params* params, melab_moments* out);

/* Estimators and first-order theory */
MELAB_API melab_status melab_evaluate(const melab_estimator* spec, const double* y,
                                      const double* x, size_t count, double mu_x,
                                      double* out);
MELAB_API melab_status melab_theory(const melab_estimator* spec, const melab_params* params,
                                    double* mse, double* bias);
MELAB_API melab_status melab_var_mean_per_unit(const melab_params* params, melab_mse* out);
MELAB_API melab_status melab_mse_t1(const melab_params* params, melab_mse* out);
MELAB_API melab_status melab_mse_t3(const melab_params* params, double alpha, double beta,
                                    melab_mse* out);
MELAB_API melab_status melab_opt_weights_t2(const melab_params* params, melab_optimum* out);
MELAB_API melab_status melab_opt_weights_t4(const melab_params* params, double alpha,
                                            double beta, melab_optimum* out);
MELAB_API melab_status melab_pre(double reference_mse, double mse, double* out);
/* Writes up to `capacity` specs; *count receives the number available. */
MELAB_API melab_status melab_table_estimators(const melab_params* params, const double* alphas,
                                              const double* betas, size_t pairs,
                                              melab_estimator* out, size_t capacity,
                                              size_t* count);

/* Monte Carlo */
MELAB_API melab_status melab_sim_config_default(const melab_params* params, melab_sim_config* out);
/* Keys absent from the JSON keep their value in *inout. */
MELAB_API melab_status melab_sim_config_from_json(const char* json, melab_sim_config* inout);
/* `out` must hold `count` results. */
MELAB_API melab_status melab_simulate(const melab_sim_config* config, const melab_estimator* specs,
                                      size_t count, melab_sim_result* out);

/* Datasets */
MELAB_API melab_status melab_dataset_load(const char* path, const melab_columns* columns,
                                          char delimiter, melab_dataset** out);
MELAB_API size_t melab_dataset_row_count(const melab_dataset* ds);
MELAB_API melab_status melab_dataset_params(const melab_dataset* ds, int n_for_theory,
                                            melab_params* out);
MELAB_API void melab_dataset_free(melab_dataset* ds);

/* Report tables */
MELAB_API melab_status melab_report_params(const melab_params* params, melab_report** out);
MELAB_API melab_status melab_report_theory(const melab_params* params, const double* alphas,
                                           const double* betas, size_t pairs,
                                           melab_report** out);
MELAB_API melab_status melab_report_simulate(const melab_sim_config* config,
                                             const melab_estimator* specs, size_t count,
                                             melab_report** out);
/* `spec_count` is 1 (same estimator at every n) or `grid_size` (one per n). */
MELAB_API melab_status melab_report_sweep(const melab_sim_config* config,
                                          const melab_estimator* specs, size_t spec_count,
                                          const int* n_grid, size_t grid_size,
                                          melab_report** out);
MELAB_API size_t melab_report_row_count(const melab_report* report);
/* MELAB_ERR_INVALID_ARGUMENT for an unknown column or a non-numeric cell. */
MELAB_API melab_status melab_report_value(const melab_report* report, size_t row,
                                          const char* column, double* out);
MELAB_API melab_status melab_report_render(const melab_report* report, melab_format format,
                                           char** out);
MELAB_API void melab_report_free(melab_report* report);

#ifdef __cplusplus
}
#endif

#endif /* MELAB_H */
