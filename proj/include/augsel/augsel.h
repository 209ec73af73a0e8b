/* augsel C API: augmentation subset selection over weighted linear models.
 *
 * All functions return aug_status; on failure, aug_last_error() holds a
 * thread-local message describing what went wrong. Out-parameters are only
 * written on AUG_OK. Handles are opaque and freed with their *_free function
 * (NULL is accepted and ignored).
 */
#ifndef AUGSEL_H
#define AUGSEL_H

#include <stddef.h>
#include <stdint.h>

#if defined(AUGSEL_BUILD_SHARED)
#define AUGSEL_API __attribute__((visibility("default")))
#else
#define AUGSEL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum aug_status {
  AUG_OK = 0,
  AUG_ERROR_INVALID = 1, /* bad arguments, sizes, labels, config schema */
  AUG_ERROR_IO = 2,      /* file open/read/write failures */
  AUG_ERROR_FORMAT = 3,  /* malformed file contents */
  AUG_ERROR_NUMERIC = 4, /* convergence or conditioning failures */
  AUG_ERROR_INTERNAL = 5
} aug_status;

typedef enum aug_metric {
  AUG_METRIC_LOSS = 0,
  AUG_METRIC_INFLUENCE = 1,
  AUG_METRIC_MARGIN_ABS = 2,
  AUG_METRIC_MARGIN_INV = 3,
  AUG_METRIC_UNIFORM = 4
} aug_metric;

typedef struct aug_dataset aug_dataset;
typedef struct aug_model aug_model;
typedef struct aug_scores aug_scores;
typedef struct aug_indices aug_indices;

AUGSEL_API const char* aug_version(void);
AUGSEL_API const char* aug_last_error(void);
AUGSEL_API void aug_string_free(char* s);

/* ---- datasets -------------------------------------------------------- */

/* Feature CSV: label column (+/-1 or 0/1) followed by numeric features. */
AUGSEL_API aug_status aug_dataset_load_csv(const char* path, aug_dataset** out);

/* Binary task from an IDX image/label pair: n_train examples of the two
 * classes sampled uniformly without replacement (class_a -> +1), pixels
 * flattened and scaled to [0,1]. n_train == -1 takes every example. */
AUGSEL_API aug_status aug_dataset_from_idx(const char* images_path, const char* labels_path,
                                           int class_a, int class_b, int n_train, uint64_t seed,
                                           aug_dataset** out);

AUGSEL_API aug_status aug_dataset_save_csv(const aug_dataset* data, const char* path);
AUGSEL_API aug_status aug_dataset_size(const aug_dataset* data, int* out);
AUGSEL_API aug_status aug_dataset_feature_dim(const aug_dataset* data, int* out);
AUGSEL_API aug_status aug_dataset_total_weight(const aug_dataset* data, double* out);
AUGSEL_API aug_status aug_dataset_class_split(const aug_dataset* data, int* positive,
                                              int* negative);
AUGSEL_API void aug_dataset_free(aug_dataset* data);

/* ---- augmentation in feature space ----------------------------------- */

/* Transform JSON, e.g. {"kind":"translate","offset_px":2},
 * {"kind":"rotate","max_degrees":30,"count":15} or
 * {"kind":"crop","borders":[1,2,3,4,5,6]}. */

/* Companion member CSV (origin_id, member_index, features...) holding the
 * exhaustive augmented copies of each sampled training point. */
AUGSEL_API aug_status aug_write_member_csv(const char* images_path, const char* labels_path,
                                           int class_a, int class_b, int n_train, uint64_t seed,
                                           const char* transform_json, const char* out_csv);

/* Poisoned test set: originals followed by every augmented copy. */
AUGSEL_API aug_status aug_write_poisoned_test_csv(const char* images_path,
                                                  const char* labels_path, int class_a,
                                                  int class_b, const char* transform_json,
                                                  const char* out_csv);

/* ---- models ----------------------------------------------------------- */

/* Weighted L2-regularized logistic regression (damped Newton, zero init). */
AUGSEL_API aug_status aug_fit_logistic(const aug_dataset* data, double C, double tol, int max_iter,
                                       aug_model** out);
AUGSEL_API aug_status aug_model_accuracy(const aug_model* model, const aug_dataset* data,
                                         double* out);
AUGSEL_API aug_status aug_model_save(const aug_model* model, const char* path);
/* C/tol/max_iter describe the objective the loaded parameters minimize (the
 * influence metric needs them to rebuild the Hessian). */
AUGSEL_API aug_status aug_model_load(const char* path, double C, double tol, int max_iter,
                                     aug_model** out);
AUGSEL_API void aug_model_free(aug_model* model);

/* ---- scores ------------------------------------------------------------ */

/* Loss or |LOO influence| of every point in `data` under `model` (the model
 * must have been fitted on `data` for the influence metric). */
AUGSEL_API aug_status aug_scores_compute(const aug_model* model, const aug_dataset* data,
                                         aug_metric metric, aug_scores** out);

/* SVM margin scores; fits a linear SVM with C cross-validated over c_grid. */
AUGSEL_API aug_status aug_scores_margin(const aug_dataset* data, const double* c_grid,
                                        size_t grid_len, int folds, uint64_t seed,
                                        aug_metric variant, aug_scores** out);

AUGSEL_API aug_status aug_scores_invert(const aug_scores* scores, aug_scores** out);
AUGSEL_API aug_status aug_scores_save_csv(const aug_scores* scores, const char* path);
AUGSEL_API aug_status aug_scores_load_csv(const char* path, aug_scores** out);
AUGSEL_API aug_status aug_scores_size(const aug_scores* scores, int* out);
AUGSEL_API aug_status aug_scores_get(const aug_scores* scores, int index, double* out);
AUGSEL_API void aug_scores_free(aug_scores* scores);

/* ---- subset selection --------------------------------------------------- */

AUGSEL_API aug_status aug_select_uniform(int n, int k, uint64_t seed, aug_indices** out);
AUGSEL_API aug_status aug_select_proportional(const aug_scores* scores, int k, uint64_t seed,
                                              aug_indices** out);
AUGSEL_API aug_status aug_select_topk(const aug_scores* scores, int k, aug_indices** out);
AUGSEL_API aug_status aug_select_vsv(const aug_dataset* data, const double* c_grid,
                                     size_t grid_len, int folds, uint64_t seed,
                                     aug_indices** out);
/* k-means stratification with k clusters; scores may be NULL for uniform
 * within-cluster draws. */
AUGSEL_API aug_status aug_select_stratified(const aug_dataset* data, const aug_scores* scores,
                                            int k, uint64_t seed, aug_indices** out);
/* Exact k-DPP over L_ij = q_i phi_i^T phi_j q_j (qualities = scores). */
AUGSEL_API aug_status aug_select_kdpp(const aug_dataset* data, const aug_scores* scores, int k,
                                      uint64_t seed, aug_indices** out);

AUGSEL_API aug_status aug_indices_size(const aug_indices* indices, int* out);
AUGSEL_API aug_status aug_indices_get(const aug_indices* indices, int position, int* out);
/* CSV columns: round, index. */
AUGSEL_API aug_status aug_indices_save_csv(const aug_indices* indices, const char* path);
AUGSEL_API void aug_indices_free(aug_indices* indices);

/* ---- experiments -------------------------------------------------------- */

/* Runs the round-based augment/retrain/evaluate loop described by the JSON
 * config and writes curves.csv, auc.csv, histogram.csv, influence_pairs.csv
 * and report.json under out_dir. Identical config and seed give byte
 * identical numeric outputs. */
AUGSEL_API aug_status aug_run_experiment(const char* config_path, const char* out_dir,
                                         int threads);

/* Human-readable summary of a written report directory; free the string with
 * aug_string_free. */
AUGSEL_API aug_status aug_report_render(const char* report_dir, char** out_text);

/* ---- oracle suites ------------------------------------------------------ */

typedef void (*aug_line_callback)(const char* line, void* ctx);

/* Runs desk-scale brute-force verification suites ("loo", "calculus",
 * "solver", "dpp", "sampler", or NULL/"all"); one line per check through the
 * callback. n_failed receives the number of failed checks. */
AUGSEL_API aug_status aug_run_oracles(const char* suite, aug_line_callback callback, void* ctx,
                                      int* n_failed);

#ifdef __cplusplus
}
#endif

#endif /* AUGSEL_H */
