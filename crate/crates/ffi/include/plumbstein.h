/* C interface for the plumbstein plumbed 3-manifold library. */

#ifndef PLUMBSTEIN_H
#define PLUMBSTEIN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum PsStatus {
  PS_STATUS_OK = 0,
  PS_STATUS_VALIDATION_FAILED = 1,
  PS_STATUS_PARSE_ERROR = 2,
  PS_STATUS_UNSUPPORTED_SHAPE = 3,
  PS_STATUS_NULL_POINTER = 4,
  PS_STATUS_INVALID_UTF8 = 5,
  PS_STATUS_INTERNAL_ERROR = 6,
} PsStatus;

/**
 * Counting modes for [`ps_graph_count`].
 */
typedef enum PsCountMode {
  /**
   * Product of (a_v - 1): the Stein fillable lower bound.
   */
  PS_COUNT_MODE_LOWER = 0,
  /**
   * Minimally twisting upper bound (four-legged chain family only).
   */
  PS_COUNT_MODE_MINTWIST = 1,
  /**
   * m/2-twisting upper bound (four-legged chain family only).
   */
  PS_COUNT_MODE_TORSION = 2,
} PsCountMode;

/**
 * Opaque parsed plumbing graph.
 */
typedef struct PsGraph PsGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message for this thread, or NULL when the previous call
 * succeeded. Free with [`ps_string_free`].
 */
char *ps_last_error(void);

/**
 * Frees a string returned by this library. NULL is accepted.
 *
 * # Safety
 * `text` must have been allocated by this library and not freed before.
 */
void ps_string_free(char *text);

/**
 * Parses a graph file (NUL-terminated UTF-8). On success `*out` owns a
 * handle that must be released with [`ps_graph_free`].
 *
 * # Safety
 * `text` must point to a NUL-terminated buffer; `out` must be writable.
 */
enum PsStatus ps_graph_parse(const char *text, struct PsGraph **out);

/**
 * Releases a graph handle. NULL is accepted.
 *
 * # Safety
 * `graph` must come from [`ps_graph_parse`] and not be freed twice.
 */
void ps_graph_free(struct PsGraph *graph);

/**
 * Number of vertices in the graph; 0 for a NULL handle.
 */
uintptr_t ps_graph_vertex_count(const struct PsGraph *graph);

/**
 * Validation report as JSON. Returns Ok even for invalid graphs; the
 * report itself carries the violations.
 *
 * # Safety
 * `out` must be writable; the result is freed with [`ps_string_free`].
 */
enum PsStatus ps_graph_validate_json(const struct PsGraph *graph, char **out);

/**
 * Incompressible-torus classes as a JSON array of vertex-id paths.
 *
 * # Safety
 * As for [`ps_graph_validate_json`].
 */
enum PsStatus ps_graph_tori_json(const struct PsGraph *graph, char **out);

/**
 * Cluster/tree/connector decomposition as JSON.
 *
 * # Safety
 * As for [`ps_graph_validate_json`].
 */
enum PsStatus ps_graph_decompose_json(const struct PsGraph *graph, char **out);

/**
 * Wrapped-up forms of all clusters as a JSON array.
 *
 * # Safety
 * As for [`ps_graph_validate_json`].
 */
enum PsStatus ps_graph_wrap_json(const struct PsGraph *graph, char **out);

/**
 * Handlebody diagram, with the Stein enumeration when `enumerate` is set:
 * `{"count": "...", "smooth": {...}, "enumeration": {...}?}`.
 *
 * # Safety
 * As for [`ps_graph_validate_json`].
 */
enum PsStatus ps_graph_stein_json(const struct PsGraph *graph, bool enumerate, char **out);

/**
 * Contact-structure count or bound as a decimal string. The twisting
 * modes require the four-legged chain family shape.
 *
 * # Safety
 * As for [`ps_graph_validate_json`].
 */
enum PsStatus ps_graph_count(const struct PsGraph *graph,
                             enum PsCountMode mode,
                             uint64_t m,
                             char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PLUMBSTEIN_H */
