/* lrsdcut: MAP inference for fully connected pairwise CRFs.
 *
 * All functions returning lrsdcut_status leave a message retrievable with
 * lrsdcut_last_error() on failure (thread-local). Handles are opaque and
 * must be released with their _free function. Labels are 0-based.
 */
#ifndef LRSDCUT_LRSDCUT_H
#define LRSDCUT_LRSDCUT_H

#include <stddef.h>
#include <stdint.h>

#if defined(LRSDCUT_BUILDING_LIBRARY)
#define LRSDCUT_API __attribute__((visibility("default")))
#else
#define LRSDCUT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lrsdcut_status {
  LRSDCUT_OK = 0,
  LRSDCUT_INVALID_ARGUMENT = 1,
  LRSDCUT_INVALID_STATE = 2,
  LRSDCUT_TOO_LARGE = 3,
  LRSDCUT_PARSE_ERROR = 4,
  LRSDCUT_IO_ERROR = 5,
  LRSDCUT_NOT_CONVERGED = 6,
  LRSDCUT_NON_PSD = 7,
  LRSDCUT_INTERNAL_ERROR = 8
} lrsdcut_status;

typedef enum lrsdcut_method {
  LRSDCUT_METHOD_LRSDCUT = 0,
  LRSDCUT_METHOD_MEANFIELD = 1,
  LRSDCUT_METHOD_BRUTE = 2
} lrsdcut_method;

typedef struct lrsdcut_problem lrsdcut_problem;
typedef struct lrsdcut_report lrsdcut_report;

typedef struct lrsdcut_params {
  double gamma;       /* penalty, > 0 */
  int kmax;           /* ascent iterations */
  int rank_init;      /* r for the spectral shift */
  double tau;         /* relative dual-improvement stop */
  int memory;         /* L-BFGS pairs */
  int samples;        /* rounding draws per iterate */
  uint64_t seed;
  int restarts;       /* mean field */
  int mf_iters;       /* mean field */
} lrsdcut_params;

typedef struct lrsdcut_iteration {
  int iter;
  double dual;            /* energy scale */
  double rounded_energy;
  double best_energy;
  long rank;
  int truncated;
  double ms;
} lrsdcut_iteration;

typedef struct lrsdcut_gen_params {
  const char* kind;   /* "clusters" | "random" | "grid" */
  long n;             /* clusters, random */
  long width, height; /* grid */
  long labels;
  uint64_t seed;
  double noise;
  double theta_pos, theta_col;
  double weight;      /* < 0: per-kind default */
  long landmarks, rank;
  int general_mu;     /* random only */
} lrsdcut_gen_params;

LRSDCUT_API const char* lrsdcut_version(void);
LRSDCUT_API const char* lrsdcut_last_error(void);
LRSDCUT_API const char* lrsdcut_status_string(lrsdcut_status status);
/* 0 restores the default (LRSDCUT_THREADS, else hardware concurrency). */
LRSDCUT_API void lrsdcut_set_threads(unsigned threads);

LRSDCUT_API void lrsdcut_params_default(lrsdcut_params* params);
LRSDCUT_API void lrsdcut_gen_params_default(lrsdcut_gen_params* params);

LRSDCUT_API lrsdcut_status lrsdcut_problem_load(const char* path, lrsdcut_problem** out);
/* base_dir resolves relative factor_file entries; NULL means ".". */
LRSDCUT_API lrsdcut_status lrsdcut_problem_parse(const char* json, const char* base_dir,
                                                 lrsdcut_problem** out);
LRSDCUT_API void lrsdcut_problem_free(lrsdcut_problem* problem);
LRSDCUT_API size_t lrsdcut_problem_n_vars(const lrsdcut_problem* problem);
LRSDCUT_API size_t lrsdcut_problem_n_labels(const lrsdcut_problem* problem);
/* 16 hex digits; valid while the problem lives. */
LRSDCUT_API const char* lrsdcut_problem_hash(const lrsdcut_problem* problem);
LRSDCUT_API lrsdcut_status lrsdcut_problem_energy(const lrsdcut_problem* problem, const int* labels,
                                                  size_t n, double* energy);

LRSDCUT_API lrsdcut_status lrsdcut_solve(const lrsdcut_problem* problem, lrsdcut_method method,
                                         const lrsdcut_params* params, lrsdcut_report** out);
LRSDCUT_API void lrsdcut_report_free(lrsdcut_report* report);
LRSDCUT_API double lrsdcut_report_best_energy(const lrsdcut_report* report);
/* Returns 0 when no certified bound exists. */
LRSDCUT_API int lrsdcut_report_lower_bound(const lrsdcut_report* report, double* bound);
LRSDCUT_API double lrsdcut_report_wall_ms(const lrsdcut_report* report);
/* Copies min(n, cap) labels; returns n. */
LRSDCUT_API size_t lrsdcut_report_labels(const lrsdcut_report* report, int* out, size_t cap);
LRSDCUT_API size_t lrsdcut_report_iterations(const lrsdcut_report* report);
LRSDCUT_API lrsdcut_status lrsdcut_report_iteration(const lrsdcut_report* report, size_t k,
                                                    lrsdcut_iteration* out);
LRSDCUT_API size_t lrsdcut_report_warning_count(const lrsdcut_report* report);
LRSDCUT_API const char* lrsdcut_report_warning(const lrsdcut_report* report, size_t k);
/* Caller releases *json with lrsdcut_string_free. */
LRSDCUT_API lrsdcut_status lrsdcut_report_json(const lrsdcut_report* report, char** json);

LRSDCUT_API lrsdcut_status lrsdcut_generate(const lrsdcut_gen_params* params, char** json);
LRSDCUT_API lrsdcut_status lrsdcut_generate_file(const lrsdcut_gen_params* params, const char* path);

LRSDCUT_API void lrsdcut_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* LRSDCUT_LRSDCUT_H */
