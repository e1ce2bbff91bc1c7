#ifndef MTMVCSF_H
#define MTMVCSF_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MtmvStatus {
  MTMV_STATUS_OK = 0,
  MTMV_STATUS_NULL_POINTER = 1,
  MTMV_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Bad input data or configuration.
   */
  MTMV_STATUS_VALIDATION = 3,
  /**
   * Numerical failure, divergence or I/O error.
   */
  MTMV_STATUS_RUNTIME = 4,
  /**
   * The caller's buffer is too small; the required length was written.
   */
  MTMV_STATUS_BUFFER_TOO_SMALL = 5,
  MTMV_STATUS_PANIC = 6,
} MtmvStatus;

typedef enum MtmvPreset {
  MTMV_PRESET_SYNTH1 = 0,
  MTMV_PRESET_SYNTH2 = 1,
} MtmvPreset;

typedef enum MtmvAlgorithm {
  MTMV_ALGORITHM_STANDARD = 0,
  MTMV_ALGORITHM_ANTI_NOISE = 1,
} MtmvAlgorithm;

/**
 * Opaque dataset handle.
 */
typedef struct MtmvDataset MtmvDataset;

/**
 * Opaque fitted-model handle.
 */
typedef struct MtmvModel MtmvModel;

/**
 * Plain-data mirror of the training hyperparameters.
 */
typedef struct MtmvHyperparams {
  double beta;
  double gamma;
  double lambda;
  double mu;
  size_t k_per_view;
  double kc_per;
  size_t max_iters;
  double rel_tol;
  uint64_t seed;
  double ridge_eps;
  /**
   * Nonzero to scale instance columns to unit sum.
   */
  uint8_t normalize_columns;
} MtmvHyperparams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message on this thread, or null. Valid until the next failing call.
 */
const char *mtmv_last_error(void);

/**
 * Fills `out` with the built-in hyperparameters of a preset.
 *
 * # Safety
 * `out` must be null or point to writable memory for one struct.
 */
enum MtmvStatus mtmv_hyperparams_preset(enum MtmvPreset preset,
                                        enum MtmvAlgorithm algorithm,
                                        struct MtmvHyperparams *out);

/**
 * Loads a dataset directory.
 *
 * # Safety
 * `path` must be null or a nul-terminated string; `out` must be null or writable.
 */
enum MtmvStatus mtmv_dataset_load(const char *path, struct MtmvDataset **out);

/**
 * Generates a synthetic preset dataset.
 *
 * # Safety
 * `out` must be null or writable.
 */
enum MtmvStatus mtmv_dataset_generate(enum MtmvPreset preset,
                                      uint64_t seed,
                                      struct MtmvDataset **out);

/**
 * # Safety
 * `ds` must be null or a handle from this library that has not been freed.
 */
void mtmv_dataset_free(struct MtmvDataset *ds);

/**
 * Task, view, class, instance and labeled-instance counts.
 *
 * # Safety
 * `ds` must be a live handle; each output must be null or writable.
 */
enum MtmvStatus mtmv_dataset_shape(const struct MtmvDataset *ds,
                                   size_t *n_tasks,
                                   size_t *n_views,
                                   size_t *n_classes,
                                   size_t *n_total,
                                   size_t *n_labeled);

/**
 * Trains a model on `ds`.
 *
 * # Safety
 * `ds` must be a live handle, `hp` readable, `out` writable.
 */
enum MtmvStatus mtmv_fit(const struct MtmvDataset *ds,
                         const struct MtmvHyperparams *hp,
                         enum MtmvAlgorithm algorithm,
                         struct MtmvModel **out);

/**
 * # Safety
 * `model` must be null or a handle from this library that has not been freed.
 */
void mtmv_model_free(struct MtmvModel *model);

/**
 * Iterations run and whether the tolerance was reached.
 *
 * # Safety
 * `model` must be a live handle; outputs writable.
 */
enum MtmvStatus mtmv_model_status(const struct MtmvModel *model,
                                  size_t *iterations,
                                  uint8_t *converged);

/**
 * Objective value at initialization and after each iteration.
 *
 * # Safety
 * `buf` must hold `cap` doubles; `len` writable.
 */
enum MtmvStatus mtmv_model_objective_trace(const struct MtmvModel *model,
                                           double *buf,
                                           size_t cap,
                                           size_t *len);

/**
 * Joint latent features of one task, `K_joint x N`, column-major.
 *
 * # Safety
 * `buf` must hold `cap` doubles; other outputs writable.
 */
enum MtmvStatus mtmv_model_features(const struct MtmvModel *model,
                                    size_t task,
                                    double *buf,
                                    size_t cap,
                                    size_t *rows,
                                    size_t *cols);

/**
 * Predicted classes of one task's unlabeled instances.
 *
 * # Safety
 * `buf` must hold `cap` entries; `len` writable.
 */
enum MtmvStatus mtmv_model_predict(const struct MtmvModel *model,
                                   size_t task,
                                   size_t *buf,
                                   size_t cap,
                                   size_t *len);

/**
 * Unlabeled accuracy against the dataset's recorded ground truth.
 *
 * # Safety
 * Both handles must be live; `accuracy` writable.
 */
enum MtmvStatus mtmv_model_accuracy(const struct MtmvModel *model,
                                    const struct MtmvDataset *ds,
                                    double *accuracy);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MTMVCSF_H */
