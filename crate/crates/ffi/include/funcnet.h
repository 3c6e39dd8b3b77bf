#ifndef FUNCNET_H
#define FUNCNET_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

// Status codes. The first five match the exit codes of the `funcnet`
// command line.
typedef enum FnetStatus {
  FNET_STATUS_OK = 0,
  // The model has findings, or the scenario run failed.
  FNET_STATUS_FINDINGS = 1,
  FNET_STATUS_PARSE_ERROR = 2,
  FNET_STATUS_USAGE_ERROR = 3,
  FNET_STATUS_INCONCLUSIVE = 4,
  FNET_STATUS_NULL_ARGUMENT = 5,
  FNET_STATUS_INVALID_UTF8 = 6,
  // An internal error; the handle passed in must not be used again.
  FNET_STATUS_PANIC = 7,
} FnetStatus;

// A parsed and resolved model.
typedef struct FnetModel FnetModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses `text` into a model. `file_name` may be null; it is used in
// error locations. On success `*out` holds a handle to free with
// [`fnet_model_free`].
//
// # Safety
// `text` and a non-null `file_name` must be NUL-terminated strings; `out`
// must point to writable storage for a pointer.
enum FnetStatus fnet_model_parse(const char *text, const char *file_name, struct FnetModel **out);

// Releases a model. Null is ignored.
//
// # Safety
// `model` must be null or a handle from [`fnet_model_parse`] that has not
// been freed.
void fnet_model_free(struct FnetModel *model);

// Number of top-level elements of the model, 0 for null.
//
// # Safety
// `model` must be null or a live handle.
uintptr_t fnet_model_element_count(const struct FnetModel *model);

// Checks every artifact of the model and writes the JSON report to
// `*report_json`. Returns `Ok` when everything is consistent and
// `Findings` otherwise; the report is written in both cases.
//
// # Safety
// `model` must be a live handle and `report_json` writable.
enum FnetStatus fnet_model_check(const struct FnetModel *model, char **report_json);

// Writes the canonical text of the model to `*text_out`.
//
// # Safety
// `model` must be a live handle and `text_out` writable.
enum FnetStatus fnet_model_render(const struct FnetModel *model, char **text_out);

// Replays a recorded trace (trace file syntax) against a scenario and
// writes the JSON verdict. Returns `Ok` on PASS, `Findings` on FAIL and
// `Inconclusive` when the trigger never matched.
//
// # Safety
// `model` must be a live handle, `scenario` and `trace` NUL-terminated strings,
// `verdict_json` writable.
enum FnetStatus fnet_model_run_trace(const struct FnetModel *model,
                                     const char *scenario,
                                     const char *trace,
                                     char **verdict_json);

// Simulates the scenario's net with its stubs for `horizon` steps under
// `stimuli` and judges the resulting trace, as [`fnet_model_run_trace`].
//
// # Safety
// As for [`fnet_model_run_trace`].
enum FnetStatus fnet_model_run_stimuli(const struct FnetModel *model,
                                       const char *scenario,
                                       const char *stimuli,
                                       uint64_t horizon,
                                       char **verdict_json);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a string from this library that has not been freed.
void fnet_string_free(char *s);

// Message of the last failing call on this thread, or null. The pointer
// stays valid until the next call into the library on this thread.
const char *fnet_last_error(void);

// Library version as a static string.
const char *fnet_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FUNCNET_H */
