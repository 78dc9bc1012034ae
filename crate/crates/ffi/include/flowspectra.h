/* C ABI for the flowspectra curvature-flow library. */

#ifndef FLOWSPECTRA_H
#define FLOWSPECTRA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum FsStatus {
  FS_STATUS_OK = 0,
  // A required pointer argument was NULL.
  FS_STATUS_NULL_ARGUMENT,
  // An argument failed validation (sizes, ranges, enum values).
  FS_STATUS_INVALID_ARGUMENT,
  // Mesh construction or revalidation failed.
  FS_STATUS_INVALID_MESH,
  // A vertex had no usable geometry (zero dual area or normal).
  FS_STATUS_DEGENERATE_ELEMENT,
  // The eigensolver hit its iteration cap.
  FS_STATUS_NO_CONVERGENCE,
  // A query left the domain of a solution or trace.
  FS_STATUS_OUT_OF_DOMAIN,
  // A flow step produced an invalid mesh.
  FS_STATUS_STEP_REJECTED,
  // A file had invalid syntax.
  FS_STATUS_PARSE_ERROR,
  // The operating system reported an I/O failure.
  FS_STATUS_IO_ERROR,
  // An internal invariant failed; the handle state is unchanged.
  FS_STATUS_PANIC,
} FsStatus;

// Flow speed law selector. The power exponent lives in `FsEvolveOptions`.
typedef enum FsSpeedLaw {
  FS_SPEED_LAW_MCF = 0,
  FS_SPEED_LAW_VOLUME_PRESERVING_MCF,
  FS_SPEED_LAW_POWER_FLOW,
  FS_SPEED_LAW_SQUARED_VOLUME_PRESERVING,
} FsSpeedLaw;

// Opaque mesh handle.
typedef struct FsMesh FsMesh;

// Opaque flow-trace handle.
typedef struct FsTrace FsTrace;

// Global geometric quantities of a mesh.
typedef struct FsGeometrySummary {
  size_t vertex_count;
  size_t manifold_dim;
  // Perimeter for curves, surface area for surfaces.
  double area;
  // Enclosed area for curves, enclosed volume for surfaces.
  double volume;
  double h_min;
  double h_max;
  // Largest epsilon with `kappa_i >= epsilon * H` everywhere; NaN when the
  // mean curvature changes sign.
  double eps_star;
  double min_edge_length;
  double equivalent_radius;
} FsGeometrySummary;

// First-eigenpair scalars.
typedef struct FsEigenSummary {
  double lambda;
  double residual;
  size_t iterations;
} FsEigenSummary;

// Evolution controls; get defaults from `fs_evolve_options_default`.
typedef struct FsEvolveOptions {
  // Requested end time; must be positive.
  double t_end;
  // Stability fraction in (0, 1].
  double cfl;
  // Solve the eigenproblem every this many steps; 0 disables spectral
  // sampling entirely.
  size_t spectral_cadence;
  // Exponent for `FS_SPEED_LAW_POWER_FLOW`; ignored otherwise.
  uint32_t power_k;
  // Also record the eigenvalue variation quadrature at spectral samples.
  bool record_variation;
  // Seed for the eigensolver's starting vector.
  uint64_t seed;
} FsEvolveOptions;

// One recorded trace sample; optional values are NaN when absent.
typedef struct FsTraceSample {
  size_t step_index;
  double t;
  // Step taken when leaving this sample; 0 at the final sample.
  double dt;
  double area;
  double volume;
  double h_min;
  double h_max;
  double eps_star;
  double lambda;
  double rhs_variation;
  double q_up;
  double q_down;
} FsTraceSample;

// Closed-form shrinking-sphere values.
typedef struct FsSphereValues {
  double t;
  double radius;
  double mean_curvature;
  double lambda;
  // `d(lambda)/dt` from the example identity `2 H^2 lambda / n`.
  double lambda_rate;
  double singular_time;
} FsSphereValues;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message on this thread into `buf` (NUL-terminated,
// truncated to `capacity`). Returns the full length including the NUL;
// call with a NULL `buf` to query the required capacity.
//
// # Safety
//
// `buf` must be NULL or valid for `capacity` bytes of writes.
size_t fs_last_error(char *buf, size_t capacity);

// Library version as a static NUL-terminated string.
const char *fs_version(void);

// Builds a regular polygon of `sides` vertices on a circle of `radius`.
//
// # Safety
//
// `out` must be NULL or valid for one pointer write.
enum FsStatus fs_mesh_ngon(size_t sides, double radius, struct FsMesh **out);

// Builds a subdivided icosahedral sphere.
//
// # Safety
//
// `out` must be NULL or valid for one pointer write.
enum FsStatus fs_mesh_icosphere(double radius, uint32_t subdivisions, struct FsMesh **out);

// Builds an ellipsoid with semi-axes `a`, `b`, `c`.
//
// # Safety
//
// `out` must be NULL or valid for one pointer write.
enum FsStatus fs_mesh_ellipsoid(double a,
                                double b,
                                double c,
                                uint32_t subdivisions,
                                struct FsMesh **out);

// Builds a convex radially perturbed sphere (relative `amplitude` <= 0.1).
//
// # Safety
//
// `out` must be NULL or valid for one pointer write.
enum FsStatus fs_mesh_perturbed_icosphere(double radius,
                                          uint32_t subdivisions,
                                          double amplitude,
                                          struct FsMesh **out);

// Loads a triangulated surface from an OFF file.
//
// # Safety
//
// `path` must be NULL or a NUL-terminated string; `out` must be NULL or
// valid for one pointer write.
enum FsStatus fs_mesh_read_off(const char *path, struct FsMesh **out);

// Loads a closed curve from a two-column CSV of vertex coordinates.
//
// # Safety
//
// `path` must be NULL or a NUL-terminated string; `out` must be NULL or
// valid for one pointer write.
enum FsStatus fs_mesh_read_curve_csv(const char *path, struct FsMesh **out);

// Releases a mesh handle. NULL is ignored.
//
// # Safety
//
// `mesh` must be NULL or an unreleased handle from this library; the handle
// is invalid afterwards.
void fs_mesh_free(struct FsMesh *mesh);

// Number of vertices, or 0 for NULL.
//
// # Safety
//
// `mesh` must be NULL or a live mesh handle.
size_t fs_mesh_vertex_count(const struct FsMesh *mesh);

// Manifold dimension (1 curve, 2 surface), or 0 for NULL.
//
// # Safety
//
// `mesh` must be NULL or a live mesh handle.
size_t fs_mesh_manifold_dim(const struct FsMesh *mesh);

// Copies vertex positions as xyz triples; `len` must be `3 * vertex_count`.
// Curves report `z = 0`.
//
// # Safety
//
// `mesh` must be NULL or a live mesh handle; `out` must be NULL or valid
// for `len` doubles of writes.
enum FsStatus fs_mesh_positions(const struct FsMesh *mesh, double *out, size_t len);

// Computes global geometric quantities of a mesh.
//
// # Safety
//
// `mesh` must be NULL or a live mesh handle; `out` must be NULL or valid
// for one write.
enum FsStatus fs_mesh_geometry(const struct FsMesh *mesh, struct FsGeometrySummary *out);

// Solves for the first nonzero eigenpair of the weighted Laplacian.
//
// `phi` may be NULL (zero weight exponent). When `f_out` is non-NULL it
// receives the eigenfunction and `f_len` must equal the vertex count.
//
// # Safety
//
// `mesh` must be NULL or a live mesh handle; `phi` NULL or valid for
// `phi_len` reads; `summary` NULL or valid for one write; `f_out` NULL or
// valid for `f_len` writes.
enum FsStatus fs_first_eigenpair(const struct FsMesh *mesh,
                                 const double *phi,
                                 size_t phi_len,
                                 uint64_t seed,
                                 struct FsEigenSummary *summary,
                                 double *f_out,
                                 size_t f_len);

// Default evolution options for a given end time (cfl 0.4, cadence 5,
// variation off, default seed).
struct FsEvolveOptions fs_evolve_options_default(double t_end);

// Runs a curvature flow and returns a trace handle.
//
// For the squared-curvature volume-preserving law the exponentially
// weighted eigenvalue quantities are attached to the samples.
//
// # Safety
//
// `mesh` must be NULL or a live mesh handle; `options` NULL or valid to
// read; `phi` NULL or valid for `phi_len` reads; `out` NULL or valid for
// one pointer write.
enum FsStatus fs_evolve(const struct FsMesh *mesh,
                        enum FsSpeedLaw law,
                        const struct FsEvolveOptions *options,
                        const double *phi,
                        size_t phi_len,
                        struct FsTrace **out);

// Releases a trace handle. NULL is ignored.
//
// # Safety
//
// `trace` must be NULL or an unreleased handle from this library; the
// handle is invalid afterwards.
void fs_trace_free(struct FsTrace *trace);

// Number of recorded samples, or 0 for NULL.
//
// # Safety
//
// `trace` must be NULL or a live trace handle.
size_t fs_trace_len(const struct FsTrace *trace);

// Final recorded time, or NaN for NULL.
//
// # Safety
//
// `trace` must be NULL or a live trace handle.
double fs_trace_t_final(const struct FsTrace *trace);

// Whether the trace stopped before the requested end time.
//
// # Safety
//
// `trace` must be NULL or a live trace handle.
bool fs_trace_is_truncated(const struct FsTrace *trace);

// Copies the truncation reason (empty string when the trace completed).
// Same buffer protocol as `fs_last_error`.
//
// # Safety
//
// `trace` must be NULL or a live trace handle; `buf` must be NULL or valid
// for `capacity` bytes of writes.
size_t fs_trace_truncation_reason(const struct FsTrace *trace, char *buf, size_t capacity);

// Copies one sample; optional values come back as NaN.
//
// # Safety
//
// `trace` must be NULL or a live trace handle; `out` must be NULL or valid
// for one write.
enum FsStatus fs_trace_sample(const struct FsTrace *trace, size_t index, struct FsTraceSample *out);

// Writes the trace in the same CSV format as the CLI.
//
// # Safety
//
// `trace` must be NULL or a live trace handle; `path` must be NULL or a
// NUL-terminated string.
enum FsStatus fs_trace_write_csv(const struct FsTrace *trace, const char *path);

// Clones the final mesh of a trace into a fresh handle.
//
// # Safety
//
// `trace` must be NULL or a live trace handle; `out` must be NULL or valid
// for one pointer write.
enum FsStatus fs_trace_final_mesh(const struct FsTrace *trace, struct FsMesh **out);

// Closed-form values for the shrinking round sphere (`dim` = 2) or circle
// (`dim` = 1) under mean-curvature flow.
//
// # Safety
//
// `out` must be NULL or valid for one write.
enum FsStatus fs_oracle_sphere(double radius0, uint32_t dim, double t, struct FsSphereValues *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FLOWSPECTRA_H */
