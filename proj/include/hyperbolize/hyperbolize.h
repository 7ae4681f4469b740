#ifndef HYPERBOLIZE_H
#define HYPERBOLIZE_H

/* C interface to the hyperbolization library.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every fallible call returns a hyp_status; on failure hyp_last_error()
 * holds a message for the calling thread. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(HYP_BUILDING_LIBRARY)
#    define HYP_API __declspec(dllexport)
#  else
#    define HYP_API __declspec(dllimport)
#  endif
#else
#  define HYP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hyp_status {
  HYP_OK = 0,
  HYP_ERR_INVALID_ARGUMENT,
  HYP_ERR_INVERSION_POLE,
  HYP_ERR_DEGENERATE_TRIPLE,
  HYP_ERR_DEGENERATE_GEODESIC,
  HYP_ERR_DEGENERATE_CROSS_RATIO,
  HYP_ERR_POINT_AT_INFINITY,
  HYP_ERR_NOT_EUCLIDEAN_SIGNATURE,
  HYP_ERR_NOT_HYPERBOLIC,
  HYP_ERR_NOT_WALLPAPER_SIGNATURE,
  HYP_ERR_TARGET_NOT_HYPERBOLIC,
  HYP_ERR_UNSUPPORTED,
  HYP_ERR_WORD_LENGTH_EXCEEDED,
  HYP_ERR_LABEL_MISMATCH,
  HYP_ERR_GRID_TOO_COARSE,
  HYP_ERR_GRID_TOO_COARSE_NEAR_CORNER,
  HYP_ERR_OUTSIDE_INTERPOLATION_DOMAIN,
  HYP_ERR_SEARCH_FAILED,
  HYP_ERR_NO_UNIQUE_FIXED_POINT,
  HYP_ERR_TOO_LARGE,
  HYP_ERR_NOT_CONVERGED,
  HYP_ERR_IO,
  HYP_ERR_FORMAT,
  HYP_ERR_CHECKSUM,
  HYP_ERR_OUT_OF_MEMORY,
  HYP_ERR_INTERNAL
} hyp_status;

typedef struct hyp_map hyp_map;
typedef struct hyp_image hyp_image;

/* ---- library ---------------------------------------------------------- */

HYP_API const char* hyp_version(void);
/* Message of the last failed call on this thread ("" if none). */
HYP_API const char* hyp_last_error(void);
HYP_API const char* hyp_status_name(hyp_status status);
/* Worker threads for solving and rendering; 0 restores the default. */
HYP_API hyp_status hyp_set_workers(int workers);

/* ---- signatures ------------------------------------------------------- */

typedef struct hyp_signature_info {
  char name[16];            /* orbifold notation, UTF-8 */
  char alias[8];            /* crystallographic name */
  char supergroup[16];      /* reflection supergroup used for hyperbolization */
  int index;                /* index in the supergroup */
  int needs_rectangular;    /* 2222 and o */
  int corner_count;         /* 3 or 4 */
} hyp_signature_info;

/* Accepts orbifold names (x for ×, o for ○) or crystallographic aliases. */
HYP_API hyp_status hyp_signature_lookup(const char* text, hyp_signature_info* out);
/* Number of wallpaper signatures (17); fills `out` for index 0..16. */
HYP_API size_t hyp_signature_count(void);
HYP_API hyp_status hyp_signature_at(size_t index, hyp_signature_info* out);

/* ---- problems and solving --------------------------------------------- */

typedef struct hyp_problem {
  const char* source_signature;
  const int* target_orders;
  size_t target_order_count;
  double t;           /* quadrilateral family parameter in (0, 1), default 0.5 */
  double aspect;      /* width / height of the rectangular cell, default 1 */
  int rectangular;    /* vouch that a 2222 or o source has a rectangular cell */
} hyp_problem;

/* Return nonzero to continue. */
typedef int (*hyp_progress_fn)(void* user, int64_t sweep, double residual);

typedef struct hyp_solve_options {
  double delta;        /* grid spacing, default 0.01 */
  double tol;          /* residual target, relative to diam(T_E), default 1e-8 */
  int64_t max_sweeps;  /* default 500000 */
  double relaxation;   /* in [1, 1.95), default 1 */
  hyp_progress_fn progress;
  void* progress_user;
  int64_t progress_every;  /* default 1000 */
} hyp_solve_options;

HYP_API void hyp_problem_init(hyp_problem* problem);
HYP_API void hyp_solve_options_init(hyp_solve_options* options);

/* Solves to tolerance or budget. An unconverged map is still returned with
 * HYP_OK; check hyp_solve_report.converged. */
HYP_API hyp_status hyp_solve(const hyp_problem* problem, const hyp_solve_options* options, hyp_map** out);

typedef struct hyp_solve_report {
  char source_signature[16];
  char supergroup_signature[16];
  int target_orders[4];
  size_t corner_count;
  double t;
  double delta;
  size_t active_points;
  size_t inner_points;
  size_t ghost_rules;
  int64_t iterations;
  double residual;
  int converged;
  double wall_time;  /* seconds; 0 for loaded maps */
} hyp_solve_report;

HYP_API hyp_status hyp_map_report(const hyp_map* map, hyp_solve_report* out);

typedef struct hyp_conformality {
  size_t samples;
  double angle_median_deg;
  double angle_max_deg;
  double ratio_median;
  double ratio_max;
  double energy_mean;
} hyp_conformality;

/* Statistics over inner points farther than corner_exclusion_cells * delta
 * from every corner. */
HYP_API hyp_status hyp_map_conformality(const hyp_map* map, double corner_exclusion_cells, hyp_conformality* out);

/* psi(z) for z in the closed source cell. */
HYP_API hyp_status hyp_map_evaluate(const hyp_map* map, double re, double im, double* out_re, double* out_im);

HYP_API hyp_status hyp_map_save(const hyp_map* map, const char* path);
HYP_API hyp_status hyp_map_load(const char* path, hyp_map** out);
HYP_API void hyp_map_free(hyp_map* map);

/* ---- conformal modulus ------------------------------------------------ */

#define HYP_MAX_MODULUS_EVALUATIONS 128

typedef struct hyp_modulus_result {
  double t_star;
  double energy;
  size_t evaluation_count;
  double eval_t[HYP_MAX_MODULUS_EVALUATIONS];
  double eval_energy[HYP_MAX_MODULUS_EVALUATIONS];
} hyp_modulus_result;

/* Golden-section search of the quadrilateral family for a *2222-reducible
 * source; bracket_tol is the final bracket width. The solved map at t_star
 * is returned through `out` when non-null. */
HYP_API hyp_status hyp_modulus_search(const hyp_problem* problem, const hyp_solve_options* options,
                                      double bracket_tol, hyp_modulus_result* result, hyp_map** out);
/* Energy of the map for a single family member problem->t. */
HYP_API hyp_status hyp_modulus_energy(const hyp_problem* problem, const hyp_solve_options* options,
                                      double* energy);

/* ---- verification ----------------------------------------------------- */

typedef struct hyp_verify_options {
  size_t dim_cap;     /* default 4000 */
  size_t dense_cap;   /* default 600 */
  double polish_tol;  /* default 1e-13 */
} hyp_verify_options;

typedef struct hyp_verify_report {
  size_t active_points;
  size_t dim;
  size_t nnz;
  double row_sum_max_deviation;
  double block_symmetry_defect;
  double sweep_equivalence_error;
  size_t component_size;
  double rho_estimate;
  int64_t rho_iterations;
  int rho_converged;
  double dense_rho;  /* negative when skipped */
  double stored_map_error;
  double polished_residual;
  double cross_validation_error;
  double conjugate_consistency;
  int row_sum_ok, block_ok, equivalence_ok, component_ok, rho_ok, dense_ok, cross_ok, conjugate_ok;
  int passed;
} hyp_verify_report;

HYP_API void hyp_verify_options_init(hyp_verify_options* options);
/* HYP_OK means the checks ran; see report->passed for the verdict. */
HYP_API hyp_status hyp_verify(const hyp_map* map, const hyp_verify_options* options, hyp_verify_report* report);

/* ---- rendering -------------------------------------------------------- */

typedef enum hyp_ornament {
  HYP_ORNAMENT_CHECKERBOARD = 0,
  HYP_ORNAMENT_GRID,
  HYP_ORNAMENT_CORNERS,
  HYP_ORNAMENT_CONSTANT,
  HYP_ORNAMENT_IMAGE
} hyp_ornament;

typedef enum hyp_wrap { HYP_WRAP_GROUP = 0, HYP_WRAP_TILE } hyp_wrap;

typedef struct hyp_render_options {
  int resolution;       /* default 1024 */
  int supersampling;    /* per axis: 1, 2 or 4; default 2 */
  int max_word_length;  /* default 200 */
  float background[3];  /* sRGB in [0, 1]; default white */
  double disk_margin;
  int force;            /* render unconverged maps */
  hyp_ornament ornament;
  const char* image_path;  /* HYP_ORNAMENT_IMAGE */
  hyp_wrap wrap;
  int has_frame;
  double frame[6];      /* origin x, y; pixel step e1 x, y; e2 x, y */
  float constant[3];    /* sRGB, HYP_ORNAMENT_CONSTANT */
  double shift[2];      /* sample offset in the Euclidean plane; breaks symmetry */
} hyp_render_options;

typedef struct hyp_render_stats {
  size_t disk_samples;
  size_t capped_samples;
} hyp_render_stats;

HYP_API void hyp_render_options_init(hyp_render_options* options);
HYP_API hyp_status hyp_render(const hyp_map* map, const hyp_render_options* options, hyp_image** out,
                              hyp_render_stats* stats);

HYP_API int hyp_image_width(const hyp_image* image);
HYP_API int hyp_image_height(const hyp_image* image);
/* Row-major sRGB floats, three per pixel. */
HYP_API const float* hyp_image_pixels(const hyp_image* image);
/* Writes 8-bit PNG; metadata is taken from `map` when non-null. */
HYP_API hyp_status hyp_image_save_png(const hyp_image* image, const hyp_map* map, int max_word_length,
                                      const char* path);
HYP_API void hyp_image_free(hyp_image* image);

typedef struct hyp_symmetry_result {
  double max_mismatch;
  double mean_mismatch;
  size_t probes;
} hyp_symmetry_result;

/* Compares the image at random disk points against their mirrors in every
 * generator of the map's hyperbolic group. */
HYP_API hyp_status hyp_symmetry_check(const hyp_map* map, const hyp_image* image, size_t samples, uint64_t seed,
                                      double disk_margin, hyp_symmetry_result* out);

#ifdef __cplusplus
}
#endif

#endif
