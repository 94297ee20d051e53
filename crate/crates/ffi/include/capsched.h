#ifndef CAPSCHED_H
#define CAPSCHED_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum CapschedStatus {
  CAPSCHED_STATUS_OK = 0,
  CAPSCHED_STATUS_NULL_POINTER = 1,
  CAPSCHED_STATUS_INVALID_UTF8 = 2,
  CAPSCHED_STATUS_PARSE = 3,
  /**
   * A job or instance parameter is out of range.
   */
  CAPSCHED_STATUS_DOMAIN = 4,
  CAPSCHED_STATUS_INVALID_ARGUMENT = 5,
  /**
   * The instance is too large for the exact oracle.
   */
  CAPSCHED_STATUS_TOO_LARGE = 6,
  CAPSCHED_STATUS_INVALID_SCHEDULE = 7,
  CAPSCHED_STATUS_INTERNAL = 8,
  CAPSCHED_STATUS_PANIC = 9,
} CapschedStatus;

typedef enum CapschedAlgorithm {
  CAPSCHED_ALGORITHM_WSVF = 0,
  CAPSCHED_ALGORITHM_WSPT = 1,
  CAPSCHED_ALGORITHM_HYBRID = 2,
  /**
   * Single machine only.
   */
  CAPSCHED_ALGORITHM_PACK = 3,
} CapschedAlgorithm;

typedef struct CapschedInstance CapschedInstance;

typedef struct CapschedSchedule CapschedSchedule;

/**
 * Message for the last failed call on this thread, or an empty string.
 * Valid until the next capsched call on the same thread.
 */
const char *capsched_last_error(void);

/**
 * Static version string.
 */
const char *capsched_version(void);

/**
 * Parses an instance from NUL-terminated JSON.
 *
 * # Safety
 * `json` must be a valid C string and `out_instance` a valid pointer.
 */
enum CapschedStatus capsched_instance_from_json(const char *json,
                                                struct CapschedInstance **out_instance);

/**
 * # Safety
 * `instance` must come from this library and not be freed twice.
 */
void capsched_instance_free(struct CapschedInstance *instance);

/**
 * # Safety
 * Pointers must be valid.
 */
enum CapschedStatus capsched_instance_job_count(const struct CapschedInstance *instance,
                                                size_t *out_count);

/**
 * Schedules `instance`. `machines == 0` keeps the instance's machine count
 * (one for `CAPSCHED_ALGORITHM_PACK`); `epsilon <= 0` uses the default.
 *
 * # Safety
 * Pointers must be valid.
 */
enum CapschedStatus capsched_schedule_run(const struct CapschedInstance *instance,
                                          enum CapschedAlgorithm algorithm,
                                          size_t machines,
                                          double epsilon,
                                          struct CapschedSchedule **out_schedule);

/**
 * Exact optimum. `max_jobs == 0` and `timeout_seconds <= 0` select the
 * defaults. `out_optimal` (may be null) is false when the time limit cut
 * the search short.
 *
 * # Safety
 * Pointers must be valid.
 */
enum CapschedStatus capsched_oracle_run(const struct CapschedInstance *instance,
                                        size_t machines,
                                        size_t max_jobs,
                                        double timeout_seconds,
                                        struct CapschedSchedule **out_schedule,
                                        bool *out_optimal);

/**
 * # Safety
 * `schedule` must come from this library and not be freed twice.
 */
void capsched_schedule_free(struct CapschedSchedule *schedule);

/**
 * Total weighted completion time.
 *
 * # Safety
 * Pointers must be valid.
 */
enum CapschedStatus capsched_schedule_cost(const struct CapschedSchedule *schedule,
                                           double *out_cost);

/**
 * Machine and start time of the job at input position `job`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum CapschedStatus capsched_schedule_start(const struct CapschedSchedule *schedule,
                                            size_t job,
                                            size_t *out_machine,
                                            double *out_start);

/**
 * Sets `out_feasible` to whether every machine stays within capacity.
 *
 * # Safety
 * Pointers must be valid.
 */
enum CapschedStatus capsched_schedule_check_feasibility(const struct CapschedSchedule *schedule,
                                                        bool *out_feasible);

/**
 * Schedule JSON with the instance embedded.
 *
 * # Safety
 * Pointers must be valid.
 */
enum CapschedStatus capsched_schedule_to_json(const struct CapschedSchedule *schedule,
                                              char **out_json);

/**
 * Feasibility, invariant and ratio report as JSON, against the combined
 * lower bound.
 *
 * # Safety
 * Pointers must be valid.
 */
enum CapschedStatus capsched_schedule_verify_json(const struct CapschedSchedule *schedule,
                                                  char **out_json);

/**
 * Lower bounds and guarantees as JSON. `machines == 0` keeps the
 * instance's machine count.
 *
 * # Safety
 * Pointers must be valid.
 */
enum CapschedStatus capsched_bounds_json(const struct CapschedInstance *instance,
                                         size_t machines,
                                         char **out_json);

/**
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void capsched_string_free(char *s);

#endif  /* CAPSCHED_H */
