#ifndef LINKSCOPE_H
#define LINKSCOPE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum LsStatus {
  LS_STATUS_OK = 0,
  LS_STATUS_NULL_ARGUMENT = 1,
  LS_STATUS_INVALID_UTF8 = 2,
  LS_STATUS_INVALID_CONFIG = 3,
  LS_STATUS_ROSTER_ERROR = 4,
  LS_STATUS_INGEST_ERROR = 5,
  LS_STATUS_GRAPH_ERROR = 6,
  LS_STATUS_REFERENCE_ERROR = 7,
  LS_STATUS_ANALYSIS_ERROR = 8,
  LS_STATUS_IO_ERROR = 9,
  LS_STATUS_PANIC = 10,
} LsStatus;

typedef enum LsComponentKind {
  LS_COMPONENT_KIND_WEAK = 0,
  LS_COMPONENT_KIND_STRONG = 1,
} LsComponentKind;

/**
 * Opaque handle to a loaded and analysed dataset.
 */
typedef struct LsDataset LsDataset;

/**
 * Analysis knobs; obtain defaults from [`ls_default_params`].
 */
typedef struct LsParams {
  double bin_width;
  double max_span_years;
  uint64_t power_law_xmin;
} LsParams;

typedef struct LsComponentSummary {
  uint64_t count;
  uint64_t giant_size;
  double giant_fraction;
  uint64_t singleton_count;
} LsComponentSummary;

typedef struct LsReciprocity {
  uint64_t mirrored_count;
  uint64_t unique_count;
  double mirrored_share;
} LsReciprocity;

/**
 * Shares are NaN when undefined (no directed spans, no known spans).
 */
typedef struct LsTemporal {
  uint64_t past_count;
  uint64_t future_count;
  uint64_t same_count;
  uint64_t unknown_count;
  double past_share;
  double future_share;
  double first_bin_share;
  uint64_t kept_edges;
  double retention_share_of_known;
  double retention_share_of_all;
} LsTemporal;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Default analysis parameters (bin width 37.5, max span 75, xmin 1).
 */
struct LsParams ls_default_params(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ls_version(void);

/**
 * Message for the last failed call on this thread, or NULL. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *ls_last_error_message(void);

/**
 * Load a link dump and roster CSV (plus optional reference edges CSV) and
 * compute the report.
 *
 * # Safety
 * String arguments must be NULL or NUL-terminated; `params` must be NULL or
 * valid; `out` must be a valid pointer. On success `*out` receives a handle
 * to release with [`ls_dataset_free`].
 */
enum LsStatus ls_dataset_load(const char *links_path,
                              const char *roster_csv_path,
                              const char *reference_csv_path,
                              const struct LsParams *params,
                              struct LsDataset **out);

/**
 * Release a handle. NULL is ignored.
 *
 * # Safety
 * `ds` must be NULL or a handle from [`ls_dataset_load`] not yet freed.
 */
void ls_dataset_free(struct LsDataset *ds);

/**
 * Number of rostered entities (graph nodes); 0 for NULL.
 *
 * # Safety
 * `ds` must be NULL or a live handle.
 */
uint64_t ls_dataset_node_count(const struct LsDataset *ds);

/**
 * Number of distinct directed links; 0 for NULL.
 *
 * # Safety
 * `ds` must be NULL or a live handle.
 */
uint64_t ls_dataset_edge_count(const struct LsDataset *ds);

/**
 * # Safety
 * `ds` must be a live handle and `out` a valid pointer.
 */
enum LsStatus ls_dataset_components(const struct LsDataset *ds,
                                    enum LsComponentKind kind,
                                    struct LsComponentSummary *out);

/**
 * # Safety
 * `ds` must be a live handle and `out` a valid pointer.
 */
enum LsStatus ls_dataset_reciprocity(const struct LsDataset *ds, struct LsReciprocity *out);

/**
 * # Safety
 * `ds` must be a live handle and `out` a valid pointer.
 */
enum LsStatus ls_dataset_temporal(const struct LsDataset *ds, struct LsTemporal *out);

/**
 * Write the canonical report JSON to `path`.
 *
 * # Safety
 * `ds` must be a live handle and `path` a NUL-terminated string.
 */
enum LsStatus ls_write_report(const struct LsDataset *ds, const char *path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LINKSCOPE_H */
