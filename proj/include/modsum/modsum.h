/*
 * modsum: classic and modified Riemann-Stieltjes sums.
 *
 * C interface to the modsum shared library. All objects are opaque handles
 * owned by the caller and released with the matching *_free function. Every
 * fallible call returns an msum_status; on failure msum_last_error() holds a
 * message for the calling thread and, for syntax errors,
 * msum_last_error_offset() the byte offset of the offending token.
 *
 * Partitions are always uniform: operations take the number of cells n and
 * split the function's domain [a, b] into n equal cells.
 */
#ifndef MODSUM_MODSUM_H
#define MODSUM_MODSUM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MODSUM_BUILDING)
#    define MODSUM_API __declspec(dllexport)
#  else
#    define MODSUM_API __declspec(dllimport)
#  endif
#else
#  define MODSUM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define MODSUM_SCHEMA_VERSION 1

typedef enum msum_status {
  MSUM_OK = 0,
  MSUM_E_INVALID_ARGUMENT = 1,
  MSUM_E_SYNTAX = 2,
  MSUM_E_UNKNOWN_IDENTIFIER = 3,
  MSUM_E_DOMAIN = 4,
  MSUM_E_HYPOTHESIS = 5,
  MSUM_E_CELL_TOO_WIDE = 6,
  MSUM_E_NO_ROOT = 7,
  MSUM_E_SCHEDULE_TOO_COARSE = 8,
  MSUM_E_DERIVATIVE = 9,
  MSUM_E_INTERNAL = 10
} msum_status;

typedef enum msum_rule_kind {
  MSUM_RULE_LEFT = 0,
  MSUM_RULE_RIGHT = 1,
  MSUM_RULE_MID = 2,
  MSUM_RULE_SEEDED = 3
} msum_rule_kind;

typedef struct msum_rule {
  msum_rule_kind kind;
  uint64_t seed; /* used by MSUM_RULE_SEEDED only */
} msum_rule;

typedef enum msum_map_kind {
  MSUM_MAP_GAMMA_LEFT = 0,
  MSUM_MAP_LENGTH_PHI = 1,
  MSUM_MAP_TARGET_C = 2,
  MSUM_MAP_TARGET_D = 3,
  MSUM_MAP_LIPSCHITZ = 4
} msum_map_kind;

typedef enum msum_theorem {
  MSUM_THEOREM_GAMMA = 0,
  MSUM_THEOREM_B = 1,
  MSUM_THEOREM_C = 2,
  MSUM_THEOREM_D = 3,
  MSUM_THEOREM_E = 4
} msum_theorem;

typedef struct msum_function msum_function;
typedef struct msum_weight msum_weight;
typedef struct msum_map msum_map;
typedef struct msum_study msum_study;

typedef struct msum_sum_report {
  double lower;
  double upper;
  double sample_sum;
  double oscillation_sum;
  int64_t n_cells;
  double mesh;
  int certified;
} msum_sum_report;

typedef struct msum_oracle {
  double lower;
  double upper;
  double midpoint;
} msum_oracle;

typedef struct msum_map_info {
  msum_map_kind kind;
  double eta;
  double factor; /* gamma, one-sided phi rate, or 1 for Lipschitz images */
} msum_map_info;

typedef struct msum_cell_image {
  int empty;
  double lo;
  double hi;
  double psi_len;
  int multiple_roots;
} msum_cell_image;

typedef struct msum_modsum_report {
  double u;
  double l;
  double s;
  int64_t n_cells;
  double mesh;
  int64_t skipped_empty;
  int64_t multiple_root_cells;
  int certified;
} msum_modsum_report;

typedef struct msum_prediction {
  msum_theorem theorem;
  double value;
  double factor;
  double bracket_lo;
  double bracket_hi;
} msum_prediction;

typedef struct msum_study_row {
  int64_t n;
  double mesh;
  double s;
  double u;
  double l;
  double gap;
  double ul_gap;
  double abs_error;
  int dominated;
} msum_study_row;

typedef struct msum_study_summary {
  msum_prediction prediction;
  int has_fitted_rate;
  double fitted_rate;
  int gaps_monotone;
  double tolerance;
  int converged;
} msum_study_summary;

typedef struct msum_diagnostics {
  double a_n;
  double c_n;
  double d_n;
  double s;
  double identity_residual;
  double a_bound;
} msum_diagnostics;

/* Library metadata and error state. */
MODSUM_API const char* msum_version(void);
MODSUM_API const char* msum_status_name(msum_status status);
MODSUM_API const char* msum_last_error(void);
MODSUM_API int64_t msum_last_error_offset(void); /* -1 when not applicable */

/* Worker threads for per-cell work; 0 = MODSUM_THREADS or hardware default. */
MODSUM_API void msum_set_threads(unsigned n);
MODSUM_API unsigned msum_get_threads(void);

MODSUM_API msum_status msum_parse_rule(const char* text, msum_rule* out);

/* Functions of one variable on [a, b]. bound and lipschitz may be NULL. */
MODSUM_API msum_status msum_function_parse(const char* text, double a, double b, const double* bound,
                                           const double* lipschitz, msum_function** out);
MODSUM_API void msum_function_free(msum_function* f);
MODSUM_API msum_status msum_function_eval(const msum_function* f, double x, double* out);
MODSUM_API double msum_function_bound(const msum_function* f);
/* Canonical text; valid until the handle is freed. */
MODSUM_API const char* msum_function_text(const msum_function* f);

/* Weight (psi, Psi). closed_form may be NULL, in which case Psi is
 * tabulated with Psi(a) = 0. */
MODSUM_API msum_status msum_weight_create(const msum_function* psi, const msum_function* closed_form,
                                          msum_weight** out);
MODSUM_API void msum_weight_free(msum_weight* w);
MODSUM_API msum_status msum_weight_length(const msum_weight* w, double lo, double hi, double* out);

/* Set mappings from a descriptor such as "gamma:0.5" or
 * "lengthphi:sin(t):alpha=0". */
MODSUM_API msum_status msum_map_parse(const char* descriptor, const msum_weight* w, msum_map** out);
MODSUM_API void msum_map_free(msum_map* m);
MODSUM_API msum_status msum_map_info_get(const msum_map* m, msum_map_info* out);
MODSUM_API const char* msum_map_text(const msum_map* m);
MODSUM_API msum_status msum_map_apply(const msum_map* m, const msum_weight* w, double lo, double hi,
                                      msum_cell_image* out);

/* Classic sums. */
MODSUM_API msum_status msum_darboux(const msum_function* f, const msum_weight* w, int64_t n, msum_rule rule,
                                    msum_sum_report* out);
MODSUM_API msum_status msum_refine_until(const msum_function* f, const msum_weight* w, double eps, int64_t n_cap,
                                         msum_sum_report* out, int* converged);
MODSUM_API msum_status msum_oracle_integral(const msum_function* g, const msum_weight* w, int64_t n_oracle,
                                            msum_oracle* out);

/* Modified sums for the integrand/weight pair the map's construction
 * prescribes (f*lambda for targetc, Upsilon-lengths for targetd). */
MODSUM_API msum_status msum_modified_sums(const msum_function* f, const msum_weight* w, const msum_map* m,
                                          int64_t n, msum_rule rule, msum_modsum_report* out);
MODSUM_API msum_status msum_predict_limit(const msum_function* f, const msum_weight* w, const msum_map* m,
                                          msum_prediction* out);

MODSUM_API msum_status msum_study_run(const msum_function* f, const msum_weight* w, const msum_map* m,
                                      const int64_t* schedule, size_t schedule_len, msum_rule rule, double tol,
                                      msum_study** out);
MODSUM_API void msum_study_free(msum_study* s);
MODSUM_API size_t msum_study_size(const msum_study* s);
MODSUM_API msum_status msum_study_row_get(const msum_study* s, size_t i, msum_study_row* out);
MODSUM_API msum_status msum_study_summary_get(const msum_study* s, msum_study_summary* out);

MODSUM_API msum_status msum_theorem_b_diagnostics(const msum_function* f, const msum_weight* w, const msum_map* m,
                                                  int64_t n, msum_rule rule, msum_diagnostics* out);

/* Square-wave gated integration. */
MODSUM_API msum_status msum_gated_integral(const msum_function* f, const msum_weight* w, int64_t carrier_n,
                                           double duty, double* out);
MODSUM_API msum_status msum_gated_reference(const msum_function* f, const msum_weight* w, int64_t carrier_n,
                                            double duty, double* out);
MODSUM_API msum_status msum_retrieval_study(const msum_function* f, const msum_weight* w,
                                            const int64_t* carrier_n, size_t len, double duty, double tol,
                                            msum_study** out);

#ifdef __cplusplus
}
#endif

#endif /* MODSUM_MODSUM_H */
