#ifndef THURSTON_H
#define THURSTON_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Outcome of a call through the C interface.
typedef enum ThurstonStatus {
  THURSTON_STATUS_OK = 0,
  // A required pointer argument was null.
  THURSTON_STATUS_NULL_POINTER = 1,
  // A string argument was not valid UTF-8, or a size was out of range.
  THURSTON_STATUS_INVALID_ARGUMENT = 2,
  // An input document or word could not be parsed.
  THURSTON_STATUS_PARSE = 3,
  // The computation rejected its input or failed to converge.
  THURSTON_STATUS_DOMAIN = 4,
  // An output buffer is shorter than the result.
  THURSTON_STATUS_BUFFER_TOO_SMALL = 5,
  // The library panicked; the handle arguments should be considered lost.
  THURSTON_STATUS_PANIC = 6,
} ThurstonStatus;

// A subshift graph together with its named edge potentials.
typedef struct ThurstonGraph ThurstonGraph;

// A representation of a free group into `PGL(d, ℝ)`.
typedef struct ThurstonRep ThurstonRep;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Version of the library as a static NUL-terminated string.
const char *thurston_version(void);

// Copies the message of the last failed call on this thread into `buf`,
// truncated and NUL-terminated, and returns the buffer size the full message
// needs including the terminator. The message is empty after a successful
// call. `buf` may be null when `len` is zero.
//
// # Safety
// `buf` is null or valid for writes of `len` bytes.
size_t thurston_last_error(char *buf, size_t len);

// Parses a graph document (`states`, `edges`, `potentials`) from JSON text.
//
// # Safety
// `json` is a NUL-terminated string and `out` is valid for writes.
enum ThurstonStatus thurston_graph_from_json(const char *json, struct ThurstonGraph **out);

// Releases a graph. Null is ignored.
//
// # Safety
// `graph` is null or was returned by this library and not yet freed.
void thurston_graph_free(struct ThurstonGraph *graph);

// Number of states and of edges of the graph.
//
// # Safety
// `graph` is a live handle; `states` and `edges` are valid for writes.
enum ThurstonStatus thurston_graph_size(const struct ThurstonGraph *graph,
                                        size_t *states,
                                        size_t *edges);

// Topological pressure of the named potential; a null name selects the
// zero potential, whose pressure is the topological entropy.
//
// # Safety
// `graph` is a live handle, `potential` is null or a NUL-terminated string
// and `out` is valid for writes.
enum ThurstonStatus thurston_graph_pressure(const struct ThurstonGraph *graph,
                                            const char *potential,
                                            double *out);

// Entropy of the suspension flow under the named roof; a null name selects
// the first potential of the document.
//
// # Safety
// As for [`thurston_graph_pressure`].
enum ThurstonStatus thurston_flow_entropy(const struct ThurstonGraph *graph,
                                          const char *roof_name,
                                          double *out);

// Maximum over cycles of `Σ numerator / Σ denominator`, with the
// denominator a strictly positive potential.
//
// # Safety
// `graph` is a live handle, both names are NUL-terminated strings and `out`
// is valid for writes.
enum ThurstonStatus thurston_max_cycle_ratio(const struct ThurstonGraph *graph,
                                             const char *numerator,
                                             const char *denominator,
                                             double *out);

// Asymmetric distance from the flow under `roof1` to the flow under `roof2`.
//
// # Safety
// As for [`thurston_max_cycle_ratio`].
enum ThurstonStatus thurston_flow_dth(const struct ThurstonGraph *graph,
                                      const char *roof1,
                                      const char *roof2,
                                      double *out);

// Parses a representation document (`rank`, `dim`, `generators`) from JSON.
//
// # Safety
// `json` is a NUL-terminated string and `out` is valid for writes.
enum ThurstonStatus thurston_rep_from_json(const char *json, struct ThurstonRep **out);

// Builds a representation from `rank` generators of size `dim × dim`, stored
// one after another in row-major order in `entries`.
//
// # Safety
// `entries` is valid for reads of `rank * dim * dim` doubles and `out` is
// valid for writes.
enum ThurstonStatus thurston_rep_new(size_t rank,
                                     size_t dim,
                                     const double *entries,
                                     struct ThurstonRep **out);

// The two-generator Schottky representation `a = diag(e^{t_a/2}, e^{−t_a/2})`,
// `b` = the same shape with translation length `t_b` rotated by `theta`.
// Fails with [`ThurstonStatus::Domain`] when the ping-pong certificate fails.
//
// # Safety
// `out` is valid for writes.
enum ThurstonStatus thurston_rep_schottky(double t_a,
                                          double t_b,
                                          double theta,
                                          struct ThurstonRep **out);

// The composition of a two-dimensional representation with the irreducible
// representation into dimension `d`.
//
// # Safety
// `rep` is a live handle and `out` is valid for writes.
enum ThurstonStatus thurston_rep_sym_power(const struct ThurstonRep *rep,
                                           size_t d,
                                           struct ThurstonRep **out);

// Releases a representation. Null is ignored.
//
// # Safety
// `rep` is null or was returned by this library and not yet freed.
void thurston_rep_free(struct ThurstonRep *rep);

// Rank of the free group and dimension of the representation.
//
// # Safety
// `rep` is a live handle; `rank` and `dim` are valid for writes.
enum ThurstonStatus thurston_rep_shape(const struct ThurstonRep *rep, size_t *rank, size_t *dim);

// Jordan projection of the image of `word` (letters `a, b, …` with inverses
// in upper case): `dim` log-moduli of eigenvalues, nonincreasing, summing to
// zero. `len` is the capacity of `out` in doubles.
//
// # Safety
// `rep` is a live handle, `word` is a NUL-terminated string and `out` is
// valid for writes of `len` doubles.
enum ThurstonStatus thurston_rep_jordan(const struct ThurstonRep *rep,
                                        const char *word,
                                        double *out,
                                        size_t len);

// Length of `word` for a functional given as a preset name (`hilbert`,
// `lambda1`, `two_lambda1`, …), a comma-separated coefficient list, inline
// JSON or the path of a JSON file.
//
// # Safety
// `rep` is a live handle, `functional` and `word` are NUL-terminated strings
// and `out` is valid for writes.
enum ThurstonStatus thurston_rep_length(const struct ThurstonRep *rep,
                                        const char *functional,
                                        const char *word,
                                        double *out);

// Entropy of the length spectrum, estimated from all conjugacy classes of
// word length at most `cutoff`. `stderr` may be null.
//
// # Safety
// `rep` is a live handle, `functional` is a NUL-terminated string, `out` is
// valid for writes and `stderr` is null or valid for writes.
enum ThurstonStatus thurston_rep_entropy(const struct ThurstonRep *rep,
                                         const char *functional,
                                         size_t cutoff,
                                         double *out,
                                         double *stderr);

// Asymmetric distance from `rep1` to `rep2` over conjugacy classes of word
// length at most `cutoff`.
//
// # Safety
// `rep1` and `rep2` are live handles, `functional` is a NUL-terminated
// string and `out` is valid for writes.
enum ThurstonStatus thurston_rep_dth(const struct ThurstonRep *rep1,
                                     const struct ThurstonRep *rep2,
                                     const char *functional,
                                     size_t cutoff,
                                     double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* THURSTON_H */
