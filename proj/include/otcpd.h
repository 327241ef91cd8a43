/*
 * otcpd — optimal-transport rank statistics and sliding-window change point
 * detection behind a C interface.
 *
 * Conventions:
 *  - matrices are passed row-major (one observation per row);
 *  - every fallible call returns otcpd_status; on failure otcpd_last_error()
 *    holds a thread-local message until the next failing call;
 *  - handles are opaque and owned by the caller via the matching _free();
 *  - transport costs are 0.5 * ||x - y||^2, so the regularization epsilon is
 *    quoted relative to the half-squared cost.
 */
#ifndef OTCPD_H
#define OTCPD_H

#include <stdint.h>

#if defined(_WIN32)
#define OTCPD_API __declspec(dllexport)
#else
#define OTCPD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum otcpd_status {
  OTCPD_OK = 0,
  OTCPD_ERR_ARGUMENT = 2, /* bad parameter, shape, or precondition */
  OTCPD_ERR_DATA = 3,     /* malformed file or data content */
  OTCPD_ERR_NUMERIC = 4,  /* solver did not converge (strict mode) */
  OTCPD_ERR_IO = 5,       /* unreadable or unwritable path */
  OTCPD_ERR_INTERNAL = 6
} otcpd_status;

typedef struct otcpd_series otcpd_series;
typedef struct otcpd_stat_series otcpd_stat_series;

typedef enum otcpd_stat_kind {
  OTCPD_STAT_RE = 0,      /* rank energy (squared-statistic form) */
  OTCPD_STAT_SRE = 1,     /* soft rank energy */
  OTCPD_STAT_ED = 2,      /* energy distance */
  OTCPD_STAT_MMD = 3,     /* squared MMD, Gaussian kernel */
  OTCPD_STAT_W1 = 4,      /* exact Wasserstein-1 */
  OTCPD_STAT_SINKDIV = 5  /* debiased entropic transport cost */
} otcpd_stat_kind;

typedef enum otcpd_ref_scheme {
  OTCPD_REF_IID_UNIFORM = 0,
  OTCPD_REF_HALTON = 1
} otcpd_ref_scheme;

typedef struct otcpd_stat_config {
  otcpd_stat_kind kind;
  double epsilon;   /* sre, sinkdiv */
  double bandwidth; /* mmd; <= 0 selects the median heuristic */
  uint64_t ref_seed;
  otcpd_ref_scheme ref_scheme;
  double solver_tol;    /* <= 0 -> 1e-9 */
  long solver_max_iter; /* <= 0 -> 10000 */
  int normalize_cost;   /* interpret epsilon relative to the median cost */
} otcpd_stat_config;

typedef struct otcpd_detect_config {
  otcpd_stat_config stat;
  long window;
  double eta;
  long delta;
  long stride;
  int workers;
  int strict; /* non-convergent windows become OTCPD_ERR_NUMERIC */
} otcpd_detect_config;

OTCPD_API void otcpd_stat_config_init(otcpd_stat_config* cfg);
OTCPD_API void otcpd_detect_config_init(otcpd_detect_config* cfg);

OTCPD_API const char* otcpd_version(void);
OTCPD_API const char* otcpd_status_name(otcpd_status status);
OTCPD_API const char* otcpd_last_error(void);

/* series ------------------------------------------------------------- */
OTCPD_API otcpd_status otcpd_series_create(const double* values, long rows,
                                           long cols, otcpd_series** out);
OTCPD_API otcpd_status otcpd_series_set_truth(otcpd_series* series,
                                              const long* truth, long count);
OTCPD_API otcpd_status otcpd_series_load_csv(const char* path, int has_header,
                                             const char* labels_path_or_null,
                                             otcpd_series** out);
OTCPD_API otcpd_status otcpd_series_save_csv(const otcpd_series* series,
                                             const char* path,
                                             const char* labels_path_or_null);
OTCPD_API long otcpd_series_rows(const otcpd_series* series);
OTCPD_API long otcpd_series_cols(const otcpd_series* series);
OTCPD_API long otcpd_series_truth_count(const otcpd_series* series);
OTCPD_API otcpd_status otcpd_series_copy_truth(const otcpd_series* series,
                                               long* out, long capacity);
OTCPD_API otcpd_status otcpd_series_copy_values(const otcpd_series* series,
                                                double* out, long capacity);
OTCPD_API void otcpd_series_free(otcpd_series* series);

/* synthetic generation ------------------------------------------------ */
/* The 10-segment benchmark schedule (3300 rows, 9 change points). */
OTCPD_API otcpd_status otcpd_generate_benchmark(uint64_t seed, long dim,
                                                otcpd_series** out);
/* Custom schedule from a JSON document:
 *   {"d": 2, "segments": [
 *      {"dist": "gaussian", "length": 300, "mean": 0.0, "cov_scale": 0.01},
 *      {"dist": "gaussian", "length": 200, "mean": 1.0,
 *       "cov": [[1.0, 0.5], [0.5, 1.0]]},
 *      {"dist": "laplace",  "length": 100, "loc": 0.0, "scale": 1.0},
 *      {"dist": "gamma",    "length": 100, "shape": 2.0, "rate": 2.0}]}  */
OTCPD_API otcpd_status otcpd_generate_from_json(const char* spec_json,
                                                uint64_t seed,
                                                otcpd_series** out);

/* two-sample statistics ------------------------------------------------ */
OTCPD_API otcpd_status otcpd_two_sample_stat(const otcpd_stat_config* cfg,
                                             const double* x, long m,
                                             const double* y, long n, long d,
                                             double* value_out);

/* detection ------------------------------------------------------------ */
OTCPD_API otcpd_status otcpd_detect(const otcpd_series* series,
                                    const otcpd_detect_config* cfg,
                                    otcpd_stat_series** z_out);
OTCPD_API long otcpd_stat_series_count(const otcpd_stat_series* z);
OTCPD_API long otcpd_stat_series_warnings(const otcpd_stat_series* z);
OTCPD_API otcpd_status otcpd_stat_series_copy(const otcpd_stat_series* z,
                                              long* t_out, double* z_values_out,
                                              long capacity);
OTCPD_API otcpd_status otcpd_stat_series_create(const long* t, const double* z,
                                                long count,
                                                otcpd_stat_series** out);
OTCPD_API otcpd_status otcpd_stat_series_save_csv(const otcpd_stat_series* z,
                                                  const char* path);
OTCPD_API otcpd_status otcpd_stat_series_load_csv(const char* path,
                                                  otcpd_stat_series** out);
OTCPD_API void otcpd_stat_series_free(otcpd_stat_series* z);

OTCPD_API otcpd_status otcpd_peak_search(const otcpd_stat_series* z, double eta,
                                         long delta, long* indices_out,
                                         long capacity, long* count_out);

/* evaluation ------------------------------------------------------------ */
typedef struct otcpd_eval_result {
  double auc_pr;
  double best_f1;
  double best_eta;
  long tp, fp, fn;          /* counts at the best threshold */
  double precision, recall; /* at the best threshold */
} otcpd_eval_result;

OTCPD_API otcpd_status otcpd_evaluate(const otcpd_stat_series* z,
                                      const long* truth, long truth_count,
                                      long xi, long delta,
                                      otcpd_eval_result* out);
OTCPD_API otcpd_status otcpd_match_counts(const long* pred, long pred_count,
                                          const long* truth, long truth_count,
                                          long xi, long* tp, long* fp, long* fn);

/* permutation null ------------------------------------------------------ */
/* values_out receives b statistic values under random (m, total-m) splits,
 * each scaled by m*(total-m)/total. */
OTCPD_API otcpd_status otcpd_null_calibration(const otcpd_stat_config* cfg,
                                              const double* pooled, long total,
                                              long d, long m, long b,
                                              uint64_t seed, double* values_out);

/* plots ------------------------------------------------------------------ */
OTCPD_API otcpd_status otcpd_plot_detection_svg(const otcpd_stat_series* z,
                                                const long* cps, long cps_count,
                                                const long* truth,
                                                long truth_count, double eta,
                                                const char* path);
OTCPD_API otcpd_status otcpd_plot_kde_svg(const char* const* names,
                                          const double* const* value_arrays,
                                          const long* value_counts,
                                          long set_count, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* OTCPD_H */
