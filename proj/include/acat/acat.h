#ifndef ACAT_ACAT_H
#define ACAT_ACAT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ACAT_API __declspec(dllexport)
#else
#define ACAT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum acat_status {
  ACAT_OK = 0,
  ACAT_E_DOMAIN = 1,
  ACAT_E_UNREACHABLE = 2,
  ACAT_E_UNSUPPORTED = 3,
  ACAT_E_INVARIANT = 4,
  ACAT_E_USAGE = 5,
  ACAT_E_CONVERGENCE = 6,
  ACAT_E_NULL = 7,
  ACAT_E_ALLOC = 8,
  ACAT_E_INTERNAL = 9
} acat_status;

ACAT_API const char* acat_version(void);
ACAT_API const char* acat_status_name(acat_status status);
/* Message of the last failed call on this thread ("" after a success). */
ACAT_API const char* acat_last_error(void);

/* Weighted graphs. Vertex ids are dense from 0. */
typedef struct acat_graph acat_graph;
ACAT_API acat_status acat_graph_new(acat_graph** out);
ACAT_API void acat_graph_free(acat_graph* g);
ACAT_API acat_status acat_graph_add_vertex(acat_graph* g, size_t* id);
ACAT_API acat_status acat_graph_add_edge(acat_graph* g, size_t i, size_t j, double length);
ACAT_API acat_status acat_graph_distance(const acat_graph* g, size_t u, size_t v, double* out);
ACAT_API acat_status acat_graph_triangle_defect(const acat_graph* g, size_t x, size_t y, size_t z, int grid,
                                                double* out);
/* Largest four-point defect of the vertices over their three cyclic orders. */
ACAT_API acat_status acat_graph_four_point(const acat_graph* g, const size_t v[4], double* out);

/* Comparison algebra. d = {d12, d13, d14, d23, d24, d34}. */
ACAT_API acat_status acat_four_point_defect(const double d[6], double* out);
ACAT_API acat_status acat_cn_residual(double dpr, double dqr, double dmr, double dpq, double* out);
ACAT_API acat_status acat_median_case1(double a, double b, double c, double p, double q, double* gap,
                                       double* gap_closed);
ACAT_API acat_status acat_tail_extension(double alpha, double beta, double gamma, double r, int* ok, double* h,
                                         double* h_prime_plus_r);

/* Wrinkled quadrant. */
ACAT_API acat_status acat_diagonal_distance(int n, double* out);
ACAT_API acat_status acat_euclidean_diagonal_distance(int n, double* out);
ACAT_API acat_status acat_divergence_gap(int n, double* gap, double* lower_bound);

typedef struct acat_wrinkled acat_wrinkled;
/* clip_radius 0 keeps the whole truncation. */
ACAT_API acat_status acat_wrinkled_new(int n_max, double resolution, double clip_radius, acat_wrinkled** out);
ACAT_API void acat_wrinkled_free(acat_wrinkled* w);
/* Mesh distance between the surface points over two planar points. */
ACAT_API acat_status acat_wrinkled_distance(const acat_wrinkled* w, double px, double py, double qx, double qy,
                                            double* out, int* touched_boundary);

/* Unit tangent bundle of the hyperbolic plane, in section coordinates. */
typedef struct acat_qi_report {
  double d;
  double dtheta;
  double L;
  double D;
  int ok_lower;
  int ok_upper;
  int converged;
  double endpoint_error;
  double bracket_lo;
  double bracket_hi;
  double holonomy;
} acat_qi_report;

ACAT_API acat_status acat_sasaki_qi(double px, double py, double ptheta, double qx, double qy, double qtheta,
                                    double tol, acat_qi_report* out);

typedef enum acat_curve_kind {
  ACAT_CURVE_POINT = 0,
  ACAT_CURVE_GEODESIC = 1,
  ACAT_CURVE_EQUIDISTANT = 2,
  ACAT_CURVE_HOROCYCLE = 3,
  ACAT_CURVE_CIRCLE = 4
} acat_curve_kind;

typedef struct acat_projection_shape {
  double kappa_mean;
  double kappa_std;
  int kind;
  double fit_residual;
  double speed_drift;
  double base_motion;
} acat_projection_shape;

/* Geodesic from (0, 1) with the given base direction and rotation c. */
ACAT_API acat_status acat_sasaki_classify(double c, double direction, double length, double step,
                                          acat_projection_shape* out);

/* Circumcenters. xy holds n interleaved planar points. */
ACAT_API acat_status acat_min_enclosing_ball(const double* xy, size_t n, double* cx, double* cy, double* radius);

/* Defect profiles of the wrinkled quadrant. */
typedef struct acat_profile acat_profile;

typedef enum acat_verdict { ACAT_SUBLINEAR = 0, ACAT_LINEARISH = 1, ACAT_INCONCLUSIVE = 2 } acat_verdict;

ACAT_API acat_status acat_wrinkled_profile(const double* radii, size_t n, int triangles, int grid, uint64_t seed,
                                           double resolution_ratio, double clip_factor, acat_profile** out);
ACAT_API void acat_profile_free(acat_profile* p);
ACAT_API size_t acat_profile_rows(const acat_profile* p);
ACAT_API acat_status acat_profile_row(const acat_profile* p, size_t i, double* r, double* f_hat, int* samples);
ACAT_API acat_status acat_profile_verdict(const acat_profile* p, int* verdict, double* slope, double* ratio);

/* map_tag: "sasaki_to_product", "finite_amalgam_to_tilde" or "identity". */
ACAT_API acat_status acat_qi_distortion(const char* map_tag, double scale, int pairs, uint64_t seed, double* sup,
                                        double* epsilon);

/* Named experiments. config holds key=value lines. */
typedef struct acat_run acat_run;
/* NULL past the last recipe. */
ACAT_API const char* acat_recipe_name(size_t i);
ACAT_API acat_status acat_run_recipe(const char* recipe, const char* config, acat_run** out);
ACAT_API void acat_run_free(acat_run* run);
ACAT_API const char* acat_run_csv(const acat_run* run);
ACAT_API const char* acat_run_manifest(const acat_run* run);

#ifdef __cplusplus
}
#endif

#endif
