#ifndef RMPROD_H
#define RMPROD_H

/* C interface to the random-matrix-product library.
 *
 * Every function returns an rmp_status; RMP_OK means success.  On failure a
 * thread-local message is set (rmp_last_error) and output parameters are left
 * untouched.  Handles are created by *_create functions and released by the
 * matching *_destroy; destroying NULL is a no-op.  Strings returned through
 * char** out-parameters are heap-allocated and must be released with
 * rmp_free_string.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rmp_status {
  RMP_OK = 0,
  RMP_INVALID_ARGUMENT = 1,
  RMP_NON_SQUARE = 2,
  RMP_ZERO_PROBABILITY = 3,
  RMP_NOT_INVERTIBLE = 4,
  RMP_NOT_ALLOWABLE = 5,
  RMP_SINGULAR_INVERTIBLE = 6,
  RMP_UNSUPPORTED_DIMENSION = 7,
  RMP_ZERO_VECTOR = 8,
  RMP_NEGATIVE_COORDINATE = 9,
  RMP_COLLAPSED_IMAGE = 10,
  RMP_SPACE_MISMATCH = 11,
  RMP_NO_CONVERGENCE = 12,
  RMP_GAP_COLLAPSE = 13,
  RMP_ILL_CONDITIONED_FIT = 14,
  RMP_DEGENERATE_VARIANCE = 15,
  RMP_ROOT_OUTSIDE_WINDOW = 16,
  RMP_OUTSIDE_WINDOW = 17,
  RMP_NEGATIVE_WEIGHT = 18,
  RMP_ALL_WEIGHTS_REJECTED = 19,
  RMP_WEIGHT_OVERFLOW = 20,
  RMP_CONFIG_INVALID = 21,
  RMP_IO_ERROR = 22,
  RMP_INTERNAL = 23,
} rmp_status;

/* Library semantic version, e.g. "1.0.0". */
const char* rmp_version(void);

/* Stable name of a status code ("ok", "config-invalid", ...). */
const char* rmp_status_name(int status);

/* Message describing the most recent failure on this thread ("" if none). */
const char* rmp_last_error(void);

/* Release a string returned through a char** out-parameter. */
void rmp_free_string(char* s);

/* ---- ensembles ------------------------------------------------------- */

typedef struct rmp_ensemble rmp_ensemble;

/* Build a finitely supported matrix law.
 *   dim        matrix dimension (>= 1)
 *   class_tag  "invertible" | "positive"
 *   norm_kind  "euclidean" | "l1"
 *   matrices   count blocks of dim*dim entries, row-major
 *   probs      count probabilities (> 0; renormalized to sum 1)
 */
rmp_status rmp_ensemble_create(int dim, const char* class_tag,
                               const char* norm_kind, const double* matrices,
                               const double* probs, int count,
                               rmp_ensemble** out);
void rmp_ensemble_destroy(rmp_ensemble* e);

int rmp_ensemble_dim(const rmp_ensemble* e);
int rmp_ensemble_atoms(const rmp_ensemble* e);

/* ---- transfer-operator solver ---------------------------------------- */

typedef struct rmp_solver rmp_solver;

/* Discretized transfer-operator solver on grid_nodes direction nodes
 * (>= 64).  Supported for dim == 2 ensembles.  The solver keeps its own copy
 * of the ensemble.
 */
rmp_status rmp_solver_create(const rmp_ensemble* e, int grid_nodes,
                             rmp_solver** out);
void rmp_solver_destroy(rmp_solver* s);

/* Dominant eigenvalue kappa(s) with diagnostics.  Any out-pointer may be
 * NULL.  r_values / nu_weights, when given, receive grid_nodes entries. */
rmp_status rmp_solver_solve(rmp_solver* s, double tilt, double* kappa,
                            double* gap, double* residual, double* r_values,
                            double* nu_weights);

/* ---- cumulants of the log norm --------------------------------------- */

typedef struct rmp_cumulants rmp_cumulants;

/* Fit log kappa over [-window, window] on s_nodes points (>= 17) and extract
 * derivatives at 0. */
rmp_status rmp_cumulants_create(rmp_solver* s, double window, int s_nodes,
                                rmp_cumulants** out);
void rmp_cumulants_destroy(rmp_cumulants* c);

/* gamma[0..4] = first five derivatives of log kappa at 0. */
rmp_status rmp_cumulants_gamma(const rmp_cumulants* c, double gamma[5]);

/* Truncated Cramer series zeta(t). */
rmp_status rmp_cumulants_zeta(const rmp_cumulants* c, double t, double* out);

/* Tilt s solving Lambda'(s) - Lambda'(0) = sign * sigma * y / sqrt(n). */
rmp_status rmp_cumulants_tilt(const rmp_cumulants* c, double y, long long n,
                              int sign, double* out);

/* ---- sampling --------------------------------------------------------- */

/* Sample `paths` i.i.d. products of length n and write log|G_n x0| into
 * log_norms (caller-allocated, length paths).  For dim == 2 the start
 * direction has angle x0_angle; higher dimensions start at the normalized
 * all-ones vector and ignore x0_angle.  Deterministic in (seed, paths). */
rmp_status rmp_simulate(const rmp_ensemble* e, double x0_angle, long long n,
                        long long paths, uint64_t seed, int threads,
                        double* log_norms);

/* ---- experiment runner ------------------------------------------------ */

/* Run one experiment subcommand end to end: load the config, apply overrides,
 * execute, and write CSV + JSON + manifest artifacts to the configured
 * output directory.
 *   subcommand     "simulate" | "spectrum" | "cumulants" | "tilt" |
 *                  "verify be|edgeworth|md|llt" | "smoothing" | "conditions"
 *   config_path    JSON config file, or NULL for defaults
 *   overrides_json JSON object merged over the config, or NULL
 *   report_json    if non-NULL receives the JSON report (rmp_free_string)
 *   primary_csv    if non-NULL receives the main CSV table (rmp_free_string)
 *   exit_code      if non-NULL receives 0 (pass) or 2 (criterion failed)
 *
 * Returns RMP_OK for exit codes 0 and 2; any other failure is reported as a
 * status with no artifacts guaranteed.
 */
rmp_status rmp_run(const char* subcommand, const char* config_path,
                   const char* overrides_json, char** report_json,
                   char** primary_csv, int* exit_code);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RMPROD_H */
