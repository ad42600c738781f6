#ifndef PARETOPROBE_H
#define PARETOPROBE_H

/* Generated by cbindgen from the paretoprobe-ffi sources. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Size of the label buffer handed to a [`PpClassifyFn`], including the
// terminating NUL.
#define PP_LABEL_CAPACITY 256

#define PP_STRATEGY_RANDOM_TARGET 0

#define PP_STRATEGY_DIRECTED_WALK 1

#define PP_STRATEGY_RANDOM_WALK 2

// Result of every call.
typedef enum PpStatus {
  PP_STATUS_OK = 0,
  // A required pointer argument was null.
  PP_STATUS_NULL_ARGUMENT = 1,
  // Malformed JSON, schema, traversal or option value.
  PP_STATUS_INVALID_ARGUMENT = 2,
  // A point does not belong to the schema.
  PP_STATUS_INVALID_POINT = 3,
  // The classifier failed, crashed or timed out.
  PP_STATUS_EXECUTION_FAILED = 4,
  PP_STATUS_IO = 5,
  // A panic was caught at the boundary. The library state is intact but
  // the call had no effect.
  PP_STATUS_PANIC = 6,
} PpStatus;

// A classifier together with its execution counter.
typedef struct PpExecutor PpExecutor;

// Input space: an ordered list of typed features.
typedef struct PpSchema PpSchema;

// Classifier callback. Receives the point as a JSON array and writes a
// NUL-terminated label of at most `label_capacity` bytes into `label`.
// Returns 0 on success; any other value is reported as a failed call.
// Calls never overlap, but may come from different threads.
typedef int32_t (*PpClassifyFn)(void *user_data,
                                const char *point_json,
                                char *label,
                                size_t label_capacity);

// Parameters of one exploration run. Fill with
// [`pp_explore_options_default`] and override fields as needed.
typedef struct PpExploreOptions {
  // One of the `PP_STRATEGY_*` constants.
  uint32_t strategy;
  // Refinement iterations per bracket.
  uint32_t steps;
  // Traversal steps per walk.
  uint32_t walk_distance;
  // Upper bound on walk threads; 0 picks automatically.
  uint32_t jobs;
  uint64_t walks;
  // Seed points sampled uniformly from the schema.
  uint64_t pool_size;
  uint64_t seed;
  // Comma-separated traversals such as `"U0,D1"`, or null. Directed
  // walks use the first (default `U0`); random walks default to all.
  const char *traversals;
} PpExploreOptions;

// Totals of a run and one JSON record per walk, newline-delimited. Release
// `ndjson` with `pp_string_free`.
typedef struct PpExploreResult {
  uint64_t walks;
  uint64_t pairs;
  uint64_t executions;
  char *ndjson;
} PpExploreResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *pp_version(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and must not be freed twice.
void pp_string_free(char *s);

// Message of the last failed call on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *pp_last_error(void);

// Built-in subject by name, e.g. `"sin2"`.
//
// # Safety
// `name` must be a NUL-terminated string; `out` writable.
enum PpStatus pp_executor_subject(const char *name, struct PpExecutor **out);

// Executor over a C callback. The schema is copied.
//
// # Safety
// `schema` must be a live handle; `out` writable. `callback` and
// `user_data` must stay valid until the executor is freed.
enum PpStatus pp_executor_callback(const struct PpSchema *schema,
                                   PpClassifyFn callback,
                                   void *user_data,
                                   struct PpExecutor **out);

// Classifier in a child process started from `command` (split on
// whitespace) that speaks the line protocol.
//
// # Safety
// `command` must be a NUL-terminated string; `schema` a live handle; `out`
// writable.
enum PpStatus pp_executor_bridge(const char *command,
                                 const struct PpSchema *schema,
                                 struct PpExecutor **out);

// Releases an executor, stopping any child process. Null is ignored.
//
// # Safety
// `exec` must come from this library and must not be used afterwards.
void pp_executor_free(struct PpExecutor *exec);

// Classifies one point and writes its label.
//
// # Safety
// `exec` must be a live handle; `x` a NUL-terminated string; `out_label`
// writable.
enum PpStatus pp_executor_classify(const struct PpExecutor *exec, const char *x, char **out_label);

// Number of classifier executions so far.
//
// # Safety
// `exec` must be a live handle; `out` writable.
enum PpStatus pp_executor_executions(const struct PpExecutor *exec, uint64_t *out);

// Random walk over every traversal, 1000 walks, 20 steps and walk
// distance 20, a pool of 300 seeds, seed 0.
//
// # Safety
// `out` must be writable.
enum PpStatus pp_explore_options_default(struct PpExploreOptions *out);

// Runs `options.walks` walks against `exec`.
//
// # Safety
// `exec` must be a live handle; `options` readable, with `traversals` null
// or NUL-terminated; `out` writable.
enum PpStatus pp_explore(const struct PpExecutor *exec,
                         const struct PpExploreOptions *options,
                         struct PpExploreResult *out);

// Parses a schema document such as
// `{"features":[{"name":"x","kind":"real","lo":0,"hi":1,"step":0.1}]}`.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum PpStatus pp_schema_from_json(const char *json, struct PpSchema **out);

// The two-feature space shared by the built-in subjects.
//
// # Safety
// `out` must be writable.
enum PpStatus pp_subject_schema(struct PpSchema **out);

// Releases a schema. Null is ignored.
//
// # Safety
// `schema` must come from this library and must not be used afterwards.
void pp_schema_free(struct PpSchema *schema);

// Number of features.
//
// # Safety
// `schema` must be a live handle; `out` must be writable.
enum PpStatus pp_schema_len(const struct PpSchema *schema, size_t *out);

// Distance between two points of `schema`.
//
// # Safety
// `schema` must be a live handle; `x` and `y` NUL-terminated strings;
// `out` writable.
enum PpStatus pp_distance(const struct PpSchema *schema, const char *x, const char *y, double *out);

// Plans a composition of traversals and midpoints from `a` to within
// `delta` of `b`. Writes its text form (e.g. `U0 U0 M M`) to `out_text`
// and the remaining distance to `out_residual`.
//
// # Safety
// `schema` must be a live handle; `a` and `b` NUL-terminated strings;
// `out_text` and `out_residual` writable.
enum PpStatus pp_plan_path(const struct PpSchema *schema,
                           const char *a,
                           const char *b,
                           double delta,
                           char **out_text,
                           double *out_residual);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PARETOPROBE_H */
