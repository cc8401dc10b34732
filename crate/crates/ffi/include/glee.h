#ifndef GLEE_H
#define GLEE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define GLEE_ESTIMATOR_CONSTANT 0

#define GLEE_ESTIMATOR_KDE 1

#define GLEE_ESTIMATOR_GMM 2

#define GLEE_ESTIMATOR_ORACLE 3

#define GLEE_MODEL_ER 0

#define GLEE_MODEL_BA 1

#define GLEE_MODEL_HG 2

typedef enum GleeStatus {
  GLEE_STATUS_OK = 0,
  GLEE_STATUS_NULL_POINTER = 1,
  GLEE_STATUS_INVALID_ARGUMENT = 2,
  GLEE_STATUS_PARSE = 3,
  GLEE_STATUS_IO = 4,
  GLEE_STATUS_DIMENSION = 5,
  GLEE_STATUS_PRECONDITION = 6,
  GLEE_STATUS_MISMATCH = 7,
  GLEE_STATUS_NOT_CONVERGED = 8,
  GLEE_STATUS_GENERATOR = 9,
  GLEE_STATUS_PANIC = 10,
} GleeStatus;

// Opaque embedding handle.
typedef struct GleeEmbedding GleeEmbedding;

// Opaque graph handle.
typedef struct GleeGraph GleeGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. Valid until
// the next call into the library from the same thread.
const char *glee_last_error(void);

// Parses an edge list held in a NUL-terminated string.
//
// # Safety
// `text` must be a valid C string and `out` a valid pointer.
enum GleeStatus glee_graph_from_edge_list(const char *text, struct GleeGraph **out);

// Reads an edge-list file.
//
// # Safety
// `path` must be a valid C string and `out` a valid pointer.
enum GleeStatus glee_graph_from_file(const char *path, struct GleeGraph **out);

// Builds a graph on nodes `0..n` from `m` endpoint pairs `(us[k], vs[k])`.
//
// # Safety
// `us` and `vs` must point to `m` values each; `out` must be valid.
enum GleeStatus glee_graph_from_edges(size_t n,
                                      const size_t *us,
                                      const size_t *vs,
                                      size_t m,
                                      struct GleeGraph **out);

// # Safety
// `g` must be null or a handle from this library, not yet freed.
void glee_graph_free(struct GleeGraph *g);

// Node count; 0 for a null handle.
//
// # Safety
// `g` must be null or a live handle.
size_t glee_graph_node_count(const struct GleeGraph *g);

// Edge count; 0 for a null handle.
//
// # Safety
// `g` must be null or a live handle.
size_t glee_graph_edge_count(const struct GleeGraph *g);

// Copies the sorted edges `(u < v)` into `us` and `vs`, which must hold
// `len` values each, with `len` equal to the edge count.
//
// # Safety
// `us` and `vs` must be writable for `len` values.
enum GleeStatus glee_graph_edges(const struct GleeGraph *g, size_t *us, size_t *vs, size_t len);

// # Safety
// `g` must be a live handle and `out` a valid pointer.
enum GleeStatus glee_graph_largest_component(const struct GleeGraph *g, struct GleeGraph **out);

// # Safety
// `g` must be a live handle and `out` a valid pointer.
enum GleeStatus glee_graph_average_clustering(const struct GleeGraph *g, double *out);

// Geometric Laplacian eigenmap embedding of dimension `d`.
//
// # Safety
// `g` must be a live handle and `out` a valid pointer.
enum GleeStatus glee_embed(const struct GleeGraph *g,
                           size_t d,
                           uint64_t seed,
                           struct GleeEmbedding **out);

// Laplacian eigenmaps of dimension `d`; the graph must be connected.
//
// # Safety
// `g` must be a live handle and `out` a valid pointer.
enum GleeStatus glee_le_embed(const struct GleeGraph *g, size_t d, struct GleeEmbedding **out);

// # Safety
// `e` must be null or a handle from this library, not yet freed.
void glee_embedding_free(struct GleeEmbedding *e);

// # Safety
// `e` must be null or a live handle.
size_t glee_embedding_node_count(const struct GleeEmbedding *e);

// # Safety
// `e` must be null or a live handle.
size_t glee_embedding_dim(const struct GleeEmbedding *e);

// Copies the row-major `n × d` matrix into `buf`, which must hold exactly
// `n * d` values.
//
// # Safety
// `buf` must be writable for `len` values.
enum GleeStatus glee_embedding_copy_rows(const struct GleeEmbedding *e, double *buf, size_t len);

// Copies the `d` eigenvalues (descending) into `buf`.
//
// # Safety
// `buf` must be writable for `len` values.
enum GleeStatus glee_embedding_eigenvalues(const struct GleeEmbedding *e, double *buf, size_t len);

// # Safety
// `e` must be a live handle and `path` a valid C string.
enum GleeStatus glee_embedding_write_file(const struct GleeEmbedding *e, const char *path);

// # Safety
// `path` must be a valid C string and `out` a valid pointer.
enum GleeStatus glee_embedding_read_file(const char *path, struct GleeEmbedding **out);

// Estimates the reconstruction threshold θ.
//
// `m_hat < 0` selects the automatic edge-count estimate for the mixture
// estimator. `truth` may be null except for the oracle estimator.
//
// # Safety
// Handles must be live (or null where allowed) and `out` valid.
enum GleeStatus glee_theta(const struct GleeEmbedding *e,
                           int32_t estimator,
                           double bandwidth,
                           int64_t m_hat,
                           uint64_t seed,
                           const struct GleeGraph *truth,
                           double *out);

// Thresholded reconstruction loss `2 (FP + FN)`.
//
// # Safety
// Handles must be live and `out` valid.
enum GleeStatus glee_reconstruction_loss(const struct GleeEmbedding *e,
                                         const struct GleeGraph *g,
                                         double theta,
                                         double *out);

// Approximate common-neighbor count of `(i, j)`.
//
// # Safety
// `e` must be live and `out` valid.
enum GleeStatus glee_cn_score(const struct GleeEmbedding *e,
                              size_t i,
                              size_t j,
                              double theta,
                              double *out);

// Approximate length-3 walk count of `(i, j)`.
//
// # Safety
// `e` must be live and `out` valid.
enum GleeStatus glee_l3_score(const struct GleeEmbedding *e,
                              size_t i,
                              size_t j,
                              double theta,
                              double *out);

// Mann-Whitney AUC of positive against negative scores.
//
// # Safety
// `pos` and `neg` must hold `n_pos` and `n_neg` values; `out` valid.
enum GleeStatus glee_auc(const double *pos,
                         size_t n_pos,
                         const double *neg,
                         size_t n_neg,
                         double *out);

// Samples a random graph (`GLEE_MODEL_*`) and returns its largest
// connected component. `gamma` is used by the hyperbolic model only.
//
// # Safety
// `out` must be a valid pointer.
enum GleeStatus glee_generate(int32_t model,
                              size_t n,
                              double mean_degree,
                              double gamma,
                              uint64_t seed,
                              struct GleeGraph **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GLEE_H */
