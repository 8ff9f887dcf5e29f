/*
 * gradcode - communication-computation efficient gradient coding.
 *
 * C API for the shared library. Handles are opaque; every function returns a
 * gc_status and the last failure message is available from gc_last_error()
 * (thread-local). Worker and data-subset indices are 1-based.
 */

#ifndef GRADCODE_GRADCODE_H
#define GRADCODE_GRADCODE_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define GC_API __declspec(dllexport)
#else
#define GC_API __attribute__((visibility("default")))
#endif

typedef enum gc_status {
    GC_OK = 0,
    GC_ERROR_ARGUMENT = 1,      /* malformed arguments or input data */
    GC_ERROR_ACHIEVABILITY = 2, /* (d, s, m) violates d >= s + m */
    GC_ERROR_NUMERICAL = 3,     /* quadrature/optimizer accuracy failure */
    GC_ERROR_CONDITIONING = 4,  /* decode-side system beyond the condition ceiling */
    GC_ERROR_TIMEOUT = 5,       /* distributed run missed a collection deadline */
    GC_ERROR_IO = 6,            /* file or socket I/O failure */
    GC_ERROR_PROTOCOL = 7,      /* malformed wire frame or handshake */
    GC_ERROR_INTERNAL = 8
} gc_status;

GC_API const char *gc_status_name(gc_status status);
GC_API const char *gc_last_error(void);
GC_API const char *gc_version(void);

/* ------------------------------------------------------------------------ */
/* Coding schemes                                                            */

typedef struct gc_scheme gc_scheme;

enum { GC_SCHEME_VANDERMONDE = 0, GC_SCHEME_STABLE = 1 };

/* theta: n evaluation points, or NULL for the default grid +/-(1 + i/2)
 * (0 added for odd n). */
GC_API gc_status gc_scheme_build_vandermonde(int32_t n, int32_t d, int32_t s, int32_t m,
                                             int32_t gradient_dim, const double *theta,
                                             gc_scheme **out);

/* Gaussian evaluation matrix; kappa is the decode-time ceiling on
 * cond(V_F V_F^T). Requires d = s + m. */
GC_API gc_status gc_scheme_build_stable(int32_t n, int32_t d, int32_t s, int32_t m,
                                        int32_t gradient_dim, double kappa, uint64_t seed,
                                        gc_scheme **out);

GC_API void gc_scheme_destroy(gc_scheme *scheme);

typedef struct gc_scheme_info {
    int32_t kind; /* GC_SCHEME_* */
    int32_t n, k, d, s, m;
    int32_t gradient_dim;    /* caller-facing dimension */
    int32_t padded_dim;      /* rounded up so m divides it */
    int32_t payload_dim;     /* padded_dim / m */
    int32_t messages_needed; /* n - s */
} gc_scheme_info;

GC_API gc_status gc_scheme_info_get(const gc_scheme *scheme, gc_scheme_info *info);

/* subset_ids must hold d entries. */
GC_API gc_status gc_scheme_assignment(const gc_scheme *scheme, int32_t worker_id,
                                      int32_t *subset_ids);

/* Row-major copies; V is (n-s) x n, B is (m n) x (n-s). */
GC_API gc_status gc_scheme_matrix_v(const gc_scheme *scheme, double *out);
GC_API gc_status gc_scheme_matrix_b(const gc_scheme *scheme, double *out);

/* gradients: d x gradient_dim row-major, in assignment order.
 * payload: payload_dim entries. */
GC_API gc_status gc_scheme_encode(const gc_scheme *scheme, int32_t worker_id,
                                  const double *gradients, double *payload);

/* payloads: count x payload_dim row-major, matching worker_ids.
 * sum: gradient_dim entries. Vandermonde decoding requires count == n - s,
 * stable decoding count >= n - s. */
GC_API gc_status gc_scheme_decode(const gc_scheme *scheme, int32_t count,
                                  const int32_t *worker_ids, const double *payloads, double *sum);

/* Binary container: "GCM1"/"GCS1" magic, u32 LE n,k,d,s,m,l header
 * (+ u64 seed, f64 kappa for GCS1), then V and B as row-major f64 LE. */
GC_API gc_status gc_scheme_save(const gc_scheme *scheme, const char *path);
GC_API gc_status gc_scheme_load(const char *path, gc_scheme **out);

typedef struct gc_verify_report {
    double worst_rel_error; /* worst relative l-infinity decode error */
    uint64_t subsets_checked;
    uint64_t failures; /* subsets above the tolerance */
    int32_t exhaustive;
} gc_verify_report;

/* Encode-then-decode over survivor subsets against direct summation;
 * exhaustive when C(n, n-s) <= subset_budget, else sampled with the seed. */
GC_API gc_status gc_scheme_verify(const gc_scheme *scheme, uint64_t subset_budget, uint64_t seed,
                                  double tolerance, gc_verify_report *report);

/* ------------------------------------------------------------------------ */
/* Stability audits                                                          */

typedef struct gc_condition_audit {
    double worst_cond; /* cond(V_F V_F^T) over audited subsets */
    double p95_cond;
    uint64_t subsets_checked;
    int32_t exhaustive;
} gc_condition_audit;

GC_API gc_status gc_scheme_condition_audit(const gc_scheme *scheme, int32_t subset_size,
                                           uint64_t budget, uint64_t seed,
                                           gc_condition_audit *audit);

typedef struct gc_gamma_estimate {
    int32_t n3;
    int32_t feasible; /* 0: no subset size up to n meets the ceiling */
    int32_t exhaustive;
} gc_gamma_estimate;

/* Empirical gamma(n, n1, n2, kappa) for a Gaussian draw from the seed. */
GC_API gc_status gc_estimate_gamma_gaussian(int32_t n, int32_t n1, int32_t n2, double kappa,
                                            uint64_t subset_budget, uint64_t seed,
                                            gc_gamma_estimate *estimate);

/* Diagnostic concentration bound on gamma; requires n1/n > 1/2 and kappa
 * above ((1+sqrt(n1/n))/(1-sqrt(n1/n)))^2. */
GC_API gc_status gc_rip_gamma_bound(int32_t n, int32_t n1, double kappa, double *bound);

/* ------------------------------------------------------------------------ */
/* Runtime model                                                             */

typedef struct gc_runtime_model {
    double lambda1, lambda2; /* straggle rates (computation, communication) */
    double t1, t2;           /* minimum times (per-subset compute, full-vector send) */
    int32_t n;
} gc_runtime_model;

GC_API gc_status gc_worker_time_cdf(const gc_runtime_model *model, double t, int32_t d, int32_t m,
                                    double *prob);
GC_API gc_status gc_expected_total_runtime(const gc_runtime_model *model, int32_t d, int32_t s,
                                           int32_t m, double *expected);

typedef struct gc_triple {
    int32_t d, s, m;
    double expected_total;
} gc_triple;

/* table (optional) receives all n(n+1)/2 frontier cells; *table_len carries
 * its capacity in and the written count out. */
GC_API gc_status gc_optimize_triple(const gc_runtime_model *model, gc_triple *best,
                                    gc_triple *table, int32_t *table_len);

GC_API gc_status gc_computation_dominant_expected(const gc_runtime_model *model, int32_t d,
                                                  double *expected);
GC_API gc_status gc_prop1_optimal_d(const gc_runtime_model *model, int32_t *d);
GC_API gc_status gc_prop2_optimal_alpha(const gc_runtime_model *model, double *alpha);

typedef struct gc_mc_result {
    double mean;
    double ci_low, ci_high; /* 99% normal interval */
    double std_error;
} gc_mc_result;

GC_API gc_status gc_monte_carlo_total(const gc_runtime_model *model, int32_t d, int32_t s,
                                      int32_t m, uint64_t trials, uint64_t seed,
                                      gc_mc_result *result);

/* ------------------------------------------------------------------------ */
/* Distributed training                                                      */

enum { GC_TRAIN_NAIVE = 0, GC_TRAIN_VANDERMONDE = 1, GC_TRAIN_STABLE = 2 };
enum { GC_STRAGGLER_DELAY = 0, GC_STRAGGLER_DIE = 1 };

typedef struct gc_straggler {
    int32_t worker_id;
    int32_t mode;  /* GC_STRAGGLER_* */
    double amount; /* delay seconds, or the iteration at which to die */
} gc_straggler;

typedef struct gc_train_config {
    int32_t scheme; /* GC_TRAIN_* */
    int32_t n, d, s, m;
    int32_t dim;          /* model dimension (ignored for CSV input) */
    double eta, momentum; /* momentum <= 0 means the default 0.9 */
    int32_t iterations;
    const char *csv_path; /* NULL or empty selects synthetic data */
    int32_t synthetic_samples;
    double holdout_fraction;
    uint64_t seed;
    double timeout_sec; /* deadline floor; grows to 30x the median iteration */
    int32_t single_process;
    const gc_straggler *stragglers;
    int32_t straggler_count;
    const double *theta; /* optional, n values (Vandermonde only) */
    double kappa;        /* <= 0 means the default (stable only) */
} gc_train_config;

typedef struct gc_train_stats {
    int32_t iterations_completed;
    double final_loss;
    double final_auc;
    double median_iteration_ms;
    uint64_t gradient_payload_bytes; /* per worker per iteration */
    uint64_t gradient_frame_bytes;   /* payload plus framing */
} gc_train_stats;

/* Runs master + n workers (separate processes on loopback unless
 * single_process). Writes the per-iteration CSV log (iteration, wall_ms,
 * loss, auc, bytes_rx) to log_csv_path when non-NULL; on a timeout the
 * partial log is still written and GC_ERROR_TIMEOUT is returned. */
GC_API gc_status gc_train_run(const gc_train_config *config, const char *log_csv_path,
                              gc_train_stats *stats);

/* ------------------------------------------------------------------------ */
/* Scheme config files (UTF-8 key=value: n, d, s, m, l, theta)              */

#define GC_CONFIG_MAX_WORKERS 64

typedef struct gc_scheme_config {
    int32_t n, d, s, m, l;
    int32_t theta_auto;
    double theta[GC_CONFIG_MAX_WORKERS];
} gc_scheme_config;

GC_API gc_status gc_scheme_config_load(const char *path, gc_scheme_config *config);

#ifdef __cplusplus
}
#endif

#endif /* GRADCODE_GRADCODE_H */
