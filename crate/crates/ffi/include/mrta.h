#ifndef MRTA_H
#define MRTA_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum MrtaStatus {
  MRTA_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  MRTA_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  MRTA_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed document, failed validation or bad parameter.
   */
  MRTA_STATUS_INVALID_INPUT = 3,
  MRTA_STATUS_INFEASIBLE = 4,
  MRTA_STATUS_NO_CAPABLE_ALLIANCE = 5,
  /**
   * The instance exceeds a size limit.
   */
  MRTA_STATUS_TOO_LARGE = 6,
  MRTA_STATUS_IO = 7,
  /**
   * Internal error, including a caught panic.
   */
  MRTA_STATUS_INTERNAL = 8,
} MrtaStatus;

/**
 * Opaque problem instance.
 */
typedef struct MrtaInstance MrtaInstance;

/**
 * Opaque solved plan with its schedule and objective.
 */
typedef struct MrtaPlan MrtaPlan;

typedef struct MrtaSolveOptions {
  /**
   * Run local search after construction.
   */
  bool improve;
  /**
   * Sweep limit of the local search; 0 means unlimited.
   */
  uint64_t max_sweeps;
  /**
   * Smallest accepted objective decrease.
   */
  double min_improvement;
} MrtaSolveOptions;

typedef struct MrtaObjective {
  double total;
  double makespan;
  double mean_finish;
  double mean_distance;
} MrtaObjective;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL after a
 * successful call. Valid until the next call into this library.
 */
const char *mrta_last_error(void);

/**
 * Static, NUL-terminated name of a status code.
 */
const char *mrta_status_name(enum MrtaStatus status);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, freed once.
 */
void mrta_string_free(char *s);

/**
 * Parse and validate an instance document.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum MrtaStatus mrta_instance_from_json(const char *json, struct MrtaInstance **out);

/**
 * Generate a benchmark instance, e.g. class `"3A2BCD"`.
 *
 * # Safety
 * `class_code` must be a NUL-terminated string; `out` must be writable.
 */
enum MrtaStatus mrta_instance_generate(const char *class_code,
                                       uint64_t seed,
                                       struct MrtaInstance **out);

/**
 * # Safety
 * `instance` must be a live handle; `out` must be writable.
 */
enum MrtaStatus mrta_instance_to_json(const struct MrtaInstance *instance, char **out);

/**
 * Number of tasks, or 0 for NULL.
 *
 * # Safety
 * `instance` must be NULL or a live handle.
 */
size_t mrta_instance_task_count(const struct MrtaInstance *instance);

/**
 * # Safety
 * `instance` must be NULL or a handle not yet freed.
 */
void mrta_instance_free(struct MrtaInstance *instance);

struct MrtaSolveOptions mrta_solve_options_default(void);

/**
 * Construct a plan and, unless disabled, improve it. `options` may be NULL
 * for the defaults.
 *
 * # Safety
 * `instance` must be a live handle, `options` NULL or readable, `out`
 * writable.
 */
enum MrtaStatus mrta_solve(const struct MrtaInstance *instance,
                           const struct MrtaSolveOptions *options,
                           struct MrtaPlan **out);

/**
 * Read a plan document as written by [`mrta_plan_to_json`].
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum MrtaStatus mrta_plan_from_json(const char *json, struct MrtaPlan **out);

/**
 * # Safety
 * `plan` must be a live handle; `out` must be writable.
 */
enum MrtaStatus mrta_plan_objective(const struct MrtaPlan *plan, struct MrtaObjective *out);

/**
 * Capability and acyclicity verdict of `plan` on `instance`.
 *
 * # Safety
 * `plan` and `instance` must be live handles; `feasible` must be writable.
 */
enum MrtaStatus mrta_check_feasibility(const struct MrtaPlan *plan,
                                       const struct MrtaInstance *instance,
                                       bool *feasible);

/**
 * Full verification of a plan document against `instance`: checksum,
 * feasibility, schedule replay and objective. A failed verification
 * returns `Infeasible` with the problems in [`mrta_last_error`].
 *
 * # Safety
 * `plan` and `instance` must be live handles.
 */
enum MrtaStatus mrta_plan_verify(const struct MrtaPlan *plan, const struct MrtaInstance *instance);

/**
 * # Safety
 * `plan` must be a live handle; `out` must be writable.
 */
enum MrtaStatus mrta_plan_to_json(const struct MrtaPlan *plan, char **out);

/**
 * Graphviz rendering of the augmented plan.
 *
 * # Safety
 * `plan` must be a live handle; `out` must be writable.
 */
enum MrtaStatus mrta_plan_export_dot(const struct MrtaPlan *plan, char **out);

/**
 * Gantt segments as CSV.
 *
 * # Safety
 * `plan` must be a live handle; `out` must be writable.
 */
enum MrtaStatus mrta_plan_export_gantt(const struct MrtaPlan *plan, char **out);

/**
 * # Safety
 * `plan` must be NULL or a handle not yet freed.
 */
void mrta_plan_free(struct MrtaPlan *plan);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MRTA_H */
