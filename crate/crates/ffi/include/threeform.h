#ifndef THREEFORM_H
#define THREEFORM_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum TfStatus {
  TF_STATUS_OK = 0,
  TF_STATUS_NULL_POINTER = 1,
  TF_STATUS_INVALID_UTF8 = 2,
  TF_STATUS_PARSE = 3,
  TF_STATUS_BACKEND_MISMATCH = 4,
  TF_STATUS_GRADE = 5,
  TF_STATUS_NOT_PRIMITIVE = 6,
  TF_STATUS_WRONG_ORBIT = 7,
  TF_STATUS_INDETERMINATE = 8,
  TF_STATUS_DOMAIN = 9,
  TF_STATUS_INCONSISTENT = 10,
  TF_STATUS_IO = 11,
  TF_STATUS_PANIC = 12,
} TfStatus;

/**
 * A parsed form on either backend.
 */
typedef struct TfForm TfForm;

/**
 * The outcome of a verification suite or example run.
 */
typedef struct TfReport TfReport;

/**
 * Run settings. Obtain defaults from [`tf_settings_default`].
 */
typedef struct TfSettings {
  uint64_t seed;
  size_t samples;
  size_t grid;
  double tolerance_numeric;
  double tolerance_exactness_proxy;
} TfSettings;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *tf_version(void);

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next call into the library on this thread.
 */
const char *tf_last_error(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void tf_string_free(char *s);

struct TfSettings tf_settings_default(void);

/**
 * Parses a form from its JSON schema.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum TfStatus tf_form_parse(const char *json, struct TfForm **out);

/**
 * # Safety
 * `form` must come from [`tf_form_parse`] and not have been freed.
 */
void tf_form_free(struct TfForm *form);

/**
 * Grade of the form, or -1 for NULL.
 *
 * # Safety
 * `form` must be NULL or a live handle.
 */
int32_t tf_form_grade(const struct TfForm *form);

/**
 * Serializes the form back to JSON.
 *
 * # Safety
 * `form` must be a live handle; `out` must be writable.
 */
enum TfStatus tf_form_to_json(const struct TfForm *form, char **out);

/**
 * Classification record of `phi` as JSON. `omega` may be NULL; when given
 * the symplectic orbit is included. `tol` applies to float forms only.
 *
 * # Safety
 * `phi` must be a live handle, `omega` NULL or a live handle, `out`
 * writable.
 */
enum TfStatus tf_classify_json(const struct TfForm *phi,
                               const struct TfForm *omega,
                               double tol,
                               char **out);

/**
 * `K`, `F`, `Q`, `q` and subspace dimensions of `phi` as JSON.
 *
 * # Safety
 * As for [`tf_classify_json`].
 */
enum TfStatus tf_invariants_json(const struct TfForm *phi,
                                 const struct TfForm *omega,
                                 double tol,
                                 char **out);

/**
 * Runs a named verification suite. `settings` may be NULL for defaults.
 *
 * # Safety
 * `suite` must be a NUL-terminated string, `settings` NULL or readable,
 * `out` writable.
 */
enum TfStatus tf_verify(const char *suite,
                        const struct TfSettings *settings,
                        struct TfReport **out);

/**
 * Flat torus degeneration at the rational parameter `t` (e.g. `"1/4"`).
 *
 * # Safety
 * As for [`tf_verify`].
 */
enum TfStatus tf_example_torus(const char *t,
                               const struct TfSettings *settings,
                               struct TfReport **out);

/**
 * Cone example on 2-forms over flat 3-space. `g` points to nine entries in
 * row-major order, or is NULL for the identity.
 *
 * # Safety
 * `g` must be NULL or point to nine readable doubles; otherwise as for
 * [`tf_verify`].
 */
enum TfStatus tf_example_lambda2(double c,
                                 const double *g,
                                 const struct TfSettings *settings,
                                 struct TfReport **out);

/**
 * Local K3 patch for the positive function `f` of `x1 y1 x2 y2 x y`.
 *
 * # Safety
 * As for [`tf_verify`].
 */
enum TfStatus tf_example_k3patch(const char *f,
                                 const struct TfSettings *settings,
                                 struct TfReport **out);

/**
 * 0 when every check passed, 1 on a failure, 2 when indeterminate, -1
 * for NULL.
 *
 * # Safety
 * `report` must be NULL or a live handle.
 */
int32_t tf_report_exit_code(const struct TfReport *report);

/**
 * The report as JSON; wall-clock timings are omitted unless
 * `with_timings` is set.
 *
 * # Safety
 * `report` must be a live handle; `out` writable.
 */
enum TfStatus tf_report_json(const struct TfReport *report, bool with_timings, char **out);

/**
 * # Safety
 * `report` must come from this library and not have been freed.
 */
void tf_report_free(struct TfReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* THREEFORM_H */
