#ifndef INCKAP_H
#define INCKAP_H

/* Generated by cbindgen from inckap-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
#define INCKAP_OK 0

#define INCKAP_ERR_INVALID 2

#define INCKAP_ERR_CAPABILITY 3

#define INCKAP_ERR_INFEASIBLE 4

/**
 * Opaque handle to a loaded instance.
 */
typedef struct InckapInstance InckapInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent error on this thread. Valid until the next
 * failing call; never free it.
 */
const char *inckap_last_error(void);

/**
 * Frees a string produced by this library.
 */
void inckap_string_free(char *s);

/**
 * Parses an instance from its JSON encoding into `*out`.
 */
int inckap_instance_from_json(const char *json, struct InckapInstance **out);

/**
 * Releases an instance handle.
 */
void inckap_instance_free(struct InckapInstance *inst);

/**
 * Number of ground-set elements.
 */
size_t inckap_instance_len(const struct InckapInstance *inst);

/**
 * Objective value of the subset given by element indices.
 */
int inckap_evaluate(const struct InckapInstance *inst,
                    const size_t *indices,
                    size_t len,
                    double *out_value);

/**
 * Structural validation; writes the singleton-value bound M and whether
 * every check passed.
 */
int inckap_validate(const struct InckapInstance *inst, double *out_m_bound, bool *out_ok);

/**
 * Runs the scaling algorithm; `*out_json` receives
 * `{"order", "phases", "ratio", "rho"}` with element names.
 */
int inckap_solve_json(const struct InckapInstance *inst, char **out_json);

/**
 * Exhaustive search for the best ordering; `*out_json` receives
 * `{"order", "ratio"}`. Fails with the capability code on large instances.
 */
int inckap_best_ordering_json(const struct InckapInstance *inst, char **out_json);

/**
 * Writes the scaling constants lambda and delta.
 */
void inckap_constants(double *out_lambda, double *out_delta);

/**
 * Guaranteed competitive-ratio bound for singleton values in [1, M].
 */
double inckap_rho(double m_bound);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INCKAP_H */
