#ifndef FUJITA_H
#define FUJITA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes. `FUJITA_STATUS_OK` is zero.
typedef enum FujitaStatus {
  FUJITA_STATUS_OK = 0,
  // A required pointer argument was NULL.
  FUJITA_STATUS_NULL_POINTER = 1,
  // Argument outside the mathematical domain (e.g. alpha > 2, d <= alpha).
  FUJITA_STATUS_DOMAIN = 2,
  // Inconsistent or malformed input other than a domain violation.
  FUJITA_STATUS_INVALID_ARGUMENT = 3,
  // A numerical routine failed to converge or produced non-finite values.
  FUJITA_STATUS_NUMERICAL = 4,
  // The config document could not be parsed or validated.
  FUJITA_STATUS_CONFIG = 5,
  FUJITA_STATUS_IO = 6,
  // The experiment stopped early; a partial report is still available.
  FUJITA_STATUS_PARTIAL = 7,
  // Internal error (caught panic).
  FUJITA_STATUS_INTERNAL = 8,
} FujitaStatus;

// Opaque handle to a validated experiment config and, after a run, its report.
typedef struct FujitaExperiment FujitaExperiment;

// Opaque handle to one member of the explicit steady-state family.
typedef struct FujitaSteady FujitaSteady;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the most recent failure on this thread, or NULL.
//
// The string stays valid until the next failing call on the same thread.
const char *fujita_last_error(void);

// Critical exponent `(d + alpha) / (d - alpha)`; requires `d > alpha`.
//
// # Safety
// `out` must be NULL or point to writable storage for one double.
enum FujitaStatus fujita_p_crit(uint32_t d, double alpha, double *out);

// Creates the steady state with the given amplitude centred at `center`
// (`d` coordinates) or at the origin when `center` is NULL.
//
// # Safety
// `center` must be NULL or point to `d` doubles; `out` must be writable.
enum FujitaStatus fujita_steady_new(uint32_t d,
                                    double alpha,
                                    double amplitude,
                                    const double *center,
                                    struct FujitaSteady **out);

// Evaluates the steady state at the point `x` of length `len` (must equal `d`).
//
// # Safety
// `handle` must come from `fujita_steady_new`; `x` must point to `len` doubles.
enum FujitaStatus fujita_steady_eval(const struct FujitaSteady *handle,
                                     const double *x,
                                     size_t len,
                                     double *out);

// Exponent `p` for which the handle solves `(-Δ)^{α/2} u = u^p`.
//
// # Safety
// `handle` must come from `fujita_steady_new`; `out` must be writable.
enum FujitaStatus fujita_steady_exponent(const struct FujitaSteady *handle, double *out);

// Largest Riesz-identity residual over `n` radii, normalized by `u(0)`.
//
// # Safety
// `handle` must come from `fujita_steady_new`; `radii` must point to `n`
// doubles; `out` must be writable.
enum FujitaStatus fujita_steady_residual(const struct FujitaSteady *handle,
                                         const double *radii,
                                         size_t n,
                                         double *out);

// Releases a steady-state handle. NULL is ignored.
//
// # Safety
// `handle` must be NULL or come from `fujita_steady_new`, and not be used afterwards.
void fujita_steady_free(struct FujitaSteady *handle);

// Parses and validates a JSON config document (same format as the CLI; the
// `command` key is required here).
//
// # Safety
// `json` must be a NUL-terminated UTF-8 string; `out` must be writable.
enum FujitaStatus fujita_experiment_new(const char *json, struct FujitaExperiment **out);

// Replaces the random seed of the experiment.
//
// # Safety
// `handle` must come from `fujita_experiment_new`.
enum FujitaStatus fujita_experiment_set_seed(struct FujitaExperiment *handle, uint64_t seed);

// Runs the experiment without writing files. `passed` (may be NULL)
// receives whether every assertion held. The report is then available from
// `fujita_experiment_report`.
//
// # Safety
// `handle` must come from `fujita_experiment_new`; `passed` must be NULL or writable.
enum FujitaStatus fujita_experiment_run(struct FujitaExperiment *handle, bool *passed);

// Like `fujita_experiment_run`, but writes `report.json` and the CSV
// artifacts into directory `dir` (created if missing).
//
// # Safety
// As for `fujita_experiment_run`; `dir` must be a NUL-terminated UTF-8 path.
enum FujitaStatus fujita_experiment_write(struct FujitaExperiment *handle,
                                          const char *dir,
                                          bool *passed);

// JSON report of the last run, or NULL if the experiment has not run.
// Owned by the handle; valid until the next run or `fujita_experiment_free`.
//
// # Safety
// `handle` must be NULL or come from `fujita_experiment_new`.
const char *fujita_experiment_report(const struct FujitaExperiment *handle);

// Releases an experiment handle. NULL is ignored.
//
// # Safety
// `handle` must be NULL or come from `fujita_experiment_new`, and not be used afterwards.
void fujita_experiment_free(struct FujitaExperiment *handle);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FUJITA_H */
