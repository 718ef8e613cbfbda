/* C interface of the qdeficit library. Every call that can fail returns a
 * qd_status; the message of the most recent failure on the calling thread is
 * available from qd_last_error(). Handles are opaque and owned by the caller. */
#ifndef QDEFICIT_H
#define QDEFICIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(QDEFICIT_BUILDING_LIBRARY)
#define QD_API __attribute__((visibility("default")))
#else
#define QD_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qd_status {
    QD_OK = 0,
    QD_ERR_CONFIGURATION,
    QD_ERR_INVALID_ARGUMENT,
    QD_ERR_DOMAIN,
    QD_ERR_UNSUPPORTED_ORDER,
    QD_ERR_PARITY,
    QD_ERR_TAIL_DIVERGENCE,
    QD_ERR_SINGULAR_AVERAGE,
    QD_ERR_DIVERGENT_POTENTIAL,
    QD_ERR_BACKEND_DISAGREEMENT,
    QD_ERR_RESOLUTION,
    QD_ERR_NOT_CONVERGED,
    QD_ERR_IO,
    QD_ERR_INTERNAL
} qd_status;

QD_API const char* qd_version(void);
QD_API const char* qd_status_name(qd_status status);
/* Empty when the last call on this thread succeeded. */
QD_API const char* qd_last_error(void);

typedef struct qd_grid_spec {
    int node_count;
    double map_scale;
    double tail_cutoff;
    double rel_tol;
    int max_derivative_order;
    double tail_fraction_tol;
} qd_grid_spec;

QD_API qd_grid_spec qd_grid_spec_default(void);

/* 2^(n-1) Gamma(n/2) pi^(n/2) */
QD_API double qd_total_q_bound(int n);

/* Sphere mean over |z| = r of |z - y|^-p with |y| = s. */
QD_API qd_status qd_sphere_average_power(int n, double p, double r, double s, double* out);
QD_API qd_status qd_kernel_I(int n, double r, double s, double* out);

typedef struct qd_green_check {
    int n;
    double numeric;
    double exact;
    double rel_err;
    double numeric_alt;
    double rel_err_alt;
} qd_green_check;

QD_API qd_status qd_green_constant_check(int n, const qd_grid_spec* grid, qd_green_check* out);

typedef struct qd_metric qd_metric;

typedef struct qd_bump {
    const double* center; /* n coordinates */
    double radius;
    double amplitude;
} qd_bump;

/* family: alpha, log, sphere, flat or capped-log. Bumps need n in {3, 4}. */
QD_API qd_status qd_metric_create(const char* family, double param, int n, const qd_bump* bumps,
                                  size_t bump_count, qd_metric** out);
QD_API void qd_metric_destroy(qd_metric* metric);
QD_API int qd_metric_dimension(const qd_metric* metric);

/* Radial metrics only; use qd_scalar_curvature_at for bumps. */
QD_API qd_status qd_scalar_curvature(const qd_metric* metric, double r, double* out);
QD_API qd_status qd_scalar_curvature_at(const qd_metric* metric, const double* x, double* out);
QD_API qd_status qd_volume(const qd_metric* metric, double r, double* out);
QD_API qd_status qd_area(const qd_metric* metric, double r, double* out);

typedef struct qd_curvature {
    double total_q;
    double abs_total_q;
    double bound_Cn;
    double bound_residual;
    int q_abs_convergent;
} qd_curvature;

/* grid may be NULL for the defaults. */
QD_API qd_status qd_total_q(const qd_metric* metric, const qd_grid_spec* grid, qd_curvature* out);

typedef struct qd_deficit {
    double lhs;
    double rhs;
    double rhs_error;
    int rhs_converged;
    double intermediate;
    double intermediate_error;
    int intermediate_converged;
    const char* branch; /* static string */
} qd_deficit;

QD_API qd_status qd_deficit_compute(const qd_metric* metric, const qd_grid_spec* grid, qd_deficit* out);

typedef struct qd_run qd_run;

/* NULL or zero fields keep the config value. */
typedef struct qd_run_overrides {
    const char* subcommand;
    const char* out_dir;
    const char* format;
    int has_seed;
    uint64_t seed;
    int jobs;
} qd_run_overrides;

/* config_json may be NULL for an empty config. The subcommand must come from
 * the config or the overrides. */
QD_API qd_status qd_run_create(const char* config_json, const qd_run_overrides* overrides, qd_run** out);
QD_API void qd_run_destroy(qd_run* run);
/* exit_code: 0 when no counted fail verdicts, 1 otherwise. */
QD_API qd_status qd_run_execute(qd_run* run, int* exit_code);
QD_API size_t qd_run_file_count(const qd_run* run);
QD_API const char* qd_run_file(const qd_run* run, size_t index);
QD_API const char* qd_run_summary(const qd_run* run);

#ifdef __cplusplus
}
#endif

#endif
