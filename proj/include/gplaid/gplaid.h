/* gplaid C interface: Bayesian plaid biclustering with relational graph priors.
 *
 * Every call returns a gp_status. On failure the message is available from
 * gp_last_error() on the same thread until the next call. Configuration is
 * passed as JSON documents (see README for the keys). */
#ifndef GPLAID_H
#define GPLAID_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(GPLAID_BUILD)
#    define GP_API __declspec(dllexport)
#  else
#    define GP_API __declspec(dllimport)
#  endif
#else
#  define GP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gp_status {
    GP_OK = 0,
    GP_ERR_ARGUMENT = 1, /* null pointer or invalid call */
    GP_ERR_CONFIG = 2,   /* bad configuration */
    GP_ERR_DATA = 3,     /* unreadable or inconsistent input */
    GP_ERR_RUNTIME = 4   /* sampler or output failure */
} gp_status;

typedef struct gp_matrix gp_matrix;
typedef struct gp_fit gp_fit;

typedef void (*gp_progress_fn)(size_t iteration, size_t max_iters, double log_likelihood, void* user);

GP_API const char* gp_version(void);
GP_API const char* gp_last_error(void);

/* Labelled numeric matrix (expression data, distances, memberships). */
GP_API gp_status gp_matrix_read(const char* path, gp_matrix** out);
GP_API size_t gp_matrix_rows(const gp_matrix* m);
GP_API size_t gp_matrix_cols(const gp_matrix* m);
GP_API double gp_matrix_get(const gp_matrix* m, size_t i, size_t j);
GP_API void gp_matrix_free(gp_matrix* m);

/* Runs one chain described by a fit configuration. `progress` may be NULL;
 * it is called every progress_interval iterations. */
GP_API gp_status gp_fit_run(const char* config_json, gp_progress_fn progress, void* user, gp_fit** out);
/* trace.jsonl, summary.json, memberships_rows.csv, memberships_cols.csv, criteria.json */
GP_API gp_status gp_fit_write(const gp_fit* fit, const char* out_dir);
GP_API gp_status gp_fit_criteria(const gp_fit* fit, double* dic_c, double* p_c, double* aic);
/* Marginal membership probability of gene i (or condition j) in bicluster k. */
GP_API size_t gp_fit_biclusters(const gp_fit* fit);
GP_API double gp_fit_row_membership(const gp_fit* fit, size_t i, size_t k);
GP_API double gp_fit_col_membership(const gp_fit* fit, size_t j, size_t k);
GP_API size_t gp_fit_retained(const gp_fit* fit);
GP_API void gp_fit_free(gp_fit* fit);

/* Synthetic dataset: dataset.csv, truth.json, gene_distances.csv and a
 * condition graph file in the configured output directory. */
GP_API gp_status gp_simulate(const char* config_json);

/* Compares the "biclusters" of two summary/truth JSON files; writes f1.csv,
 * f1_pairs.csv and redundancy.csv. Either pointer output may be NULL. */
GP_API gp_status gp_evaluate(const char* estimated_path, const char* truth_path, const char* out_dir,
                             double* f1_estimated_vs_truth, double* f1_truth_vs_estimated);

/* K sweep with replicate seeds: criteria.csv, criteria.json, runs.csv. */
GP_API gp_status gp_select(const char* config_json);

#ifdef __cplusplus
}
#endif

#endif
