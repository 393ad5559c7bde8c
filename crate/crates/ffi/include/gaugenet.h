/* C interface to the gauge-equivalence toolkit. */

#ifndef GAUGENET_H
#define GAUGENET_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Every gated check passed (reports with failed checks return
// `GN_TOLERANCE` instead).
#define GN_OK 0

// The run completed but at least one gated check exceeded its tolerance;
// the report JSON is still produced.
#define GN_TOLERANCE 1

// Configuration rejected: malformed JSON, schema violations, missing
// scenario members, unusable option values.
#define GN_CONFIG 2

// Numeric failure: singular frames, failed frequency assignment,
// non-finite trajectories.
#define GN_NUMERIC 3

// A required pointer argument was null.
#define GN_NULL_ARGUMENT 4

// A string argument was not valid UTF-8.
#define GN_INVALID_UTF8 5

// An internal panic was caught at the boundary; state is unchanged but the
// run produced nothing.
#define GN_PANIC 6

// Seed value meaning "no override": fall back to the scenario's seed, then
// the built-in default.
#define GN_SEED_UNSET UINT64_MAX

// Step-count value meaning "no override": use the scenario's grid.
#define GN_STEPS_UNSET 0

// Opaque, immutable parsed scenario. Thread-safe to share for reads; free
// exactly once with [`gn_scenario_free`].
typedef struct GnScenario GnScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Returns the library version as a static NUL-terminated string.
const char *gn_version(void);

// Returns the message describing this thread's most recent failure, or
// null when the last call succeeded. The pointer stays valid until the
// next failing call on the same thread; do not free it.
const char *gn_last_error(void);

// Parses a scenario from a JSON document.
//
// On success writes a handle to `out_scenario` and returns `GN_OK`; the
// handle must be released with [`gn_scenario_free`].
//
// # Safety
// `json` must point to a NUL-terminated string and `out_scenario` to
// writable storage for one pointer.
int32_t gn_scenario_parse(const char *json, struct GnScenario **out_scenario);

// Reads and parses a scenario file (JSON).
//
// # Safety
// `path` must point to a NUL-terminated string and `out_scenario` to
// writable storage for one pointer.
int32_t gn_scenario_load(const char *path, struct GnScenario **out_scenario);

// Releases a scenario handle. Passing null is a no-op.
//
// # Safety
// `scenario` must be a handle produced by this library that has not been
// freed already.
void gn_scenario_free(struct GnScenario *scenario);

// Releases a string written through a `report_json` out-parameter.
// Passing null is a no-op.
//
// # Safety
// `s` must be a string produced by this library that has not been freed
// already.
void gn_string_free(char *s);

// Solves the connector frame for the scenario's source/target pair and
// writes `omega.csv`, `hprime.csv` and `report.json` to the output
// directory.
//
// `out_dir` overrides the scenario's output directory (null keeps it).
// `seed` overrides the scenario seed unless it is `GN_SEED_UNSET`; `steps`
// overrides the grid unless it is `GN_STEPS_UNSET`. When `report_json` is
// non-null and the run completes, a NUL-terminated JSON report is written
// through it; release it with [`gn_string_free`]. Returns `GN_OK` when all
// gated checks pass, `GN_TOLERANCE` when the run completed with a failed
// check (the report is still written), and an error status otherwise.
//
// # Safety
// `scenario` must be a live handle from this library; `out_dir`, if
// non-null, must be NUL-terminated; `report_json`, if non-null, must point
// to writable storage for one pointer.
int32_t gn_run_map(const struct GnScenario *scenario,
                   const char *out_dir,
                   uint64_t seed,
                   size_t steps,
                   char **report_json);

// Integrates the source generator from the scenario's initial state and
// writes `psi.csv` and `report.json`.
//
// Arguments, ownership and status codes as for [`gn_run_map`].
//
// # Safety
// As for [`gn_run_map`].
int32_t gn_run_evolve(const struct GnScenario *scenario,
                      const char *out_dir,
                      uint64_t seed,
                      size_t steps,
                      char **report_json);

// Runs the quantum-to-circuit pipeline and writes `network.json`,
// `netlist.cir`, `voltages.csv` and `report.json`.
//
// Arguments, ownership and status codes as for [`gn_run_map`].
//
// # Safety
// As for [`gn_run_map`].
int32_t gn_run_circuit(const struct GnScenario *scenario,
                       const char *out_dir,
                       uint64_t seed,
                       size_t steps,
                       char **report_json);

// Runs the full invariant suite and writes `omega.csv` and `report.json`.
//
// Arguments, ownership and status codes as for [`gn_run_map`].
//
// # Safety
// As for [`gn_run_map`].
int32_t gn_run_verify(const struct GnScenario *scenario,
                      const char *out_dir,
                      uint64_t seed,
                      size_t steps,
                      char **report_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GAUGENET_H */
