#include "qdeficit.h"

#include <memory>
#include <string>
#include <vector>

#include "qdeficit/constants.hpp"
#include "qdeficit/error.hpp"
#include "qdeficit/fraclap.hpp"
#include "qdeficit/kernels.hpp"
#include "qdeficit/runner.hpp"

using namespace qdeficit;

struct qd_metric {
    ConformalMetric g;
};

struct qd_run {
    RunConfig cfg;
    RunOutcome outcome;
};

namespace {

thread_local std::string last_error;

qd_status to_status(ErrorCode c) { return static_cast<qd_status>(static_cast<int>(c)); }

template <class F>
qd_status guarded(F&& f) {
    last_error.clear();
    try {
        f();
        return QD_OK;
    } catch (const Error& e) {
        last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
    } catch (const std::exception& e) {
        last_error = e.what();
    } catch (...) {
        last_error = "unknown exception";
    }
    return QD_ERR_INTERNAL;
}

void need(const void* p, const char* what) {
    require(p != nullptr, ErrorCode::invalid_argument, std::string(what) + " is null");
}

GridSpec grid_of(const qd_grid_spec* g) {
    GridSpec s;
    if (!g) return s;
    s.node_count = g->node_count;
    s.map_scale = g->map_scale;
    s.tail_cutoff = g->tail_cutoff;
    s.rel_tol = g->rel_tol;
    s.max_derivative_order = g->max_derivative_order;
    s.tail_fraction_tol = g->tail_fraction_tol;
    validate(s);
    return s;
}

}  // namespace

extern "C" {

const char* qd_version(void) { return "0.1.0"; }

const char* qd_status_name(qd_status status) {
    if (status < QD_OK || status > QD_ERR_INTERNAL) return "unknown";
    return error_code_name(static_cast<ErrorCode>(status));
}

const char* qd_last_error(void) { return last_error.c_str(); }

qd_grid_spec qd_grid_spec_default(void) {
    const GridSpec s;
    return {s.node_count, s.map_scale, s.tail_cutoff, s.rel_tol, s.max_derivative_order, s.tail_fraction_tol};
}

double qd_total_q_bound(int n) { return total_q_bound(n); }

qd_status qd_sphere_average_power(int n, double p, double r, double s, double* out) {
    return guarded([&] {
        need(out, "out");
        *out = sphere_average_power(n, p, r, s);
    });
}

qd_status qd_kernel_I(int n, double r, double s, double* out) {
    return guarded([&] {
        need(out, "out");
        *out = kernel_I(n, r, s);
    });
}

qd_status qd_green_constant_check(int n, const qd_grid_spec* grid, qd_green_check* out) {
    return guarded([&] {
        need(out, "out");
        const GreenCheck g = green_constant_check(n, grid_of(grid));
        *out = {g.n, g.numeric, g.exact, g.rel_err, g.numeric_alt, g.rel_err_alt};
    });
}

qd_status qd_metric_create(const char* family, double param, int n, const qd_bump* bumps, size_t bump_count,
                           qd_metric** out) {
    return guarded([&] {
        need(out, "out");
        need(family, "family");
        *out = nullptr;
        MetricSpec m;
        m.family = family;
        m.param = param;
        m.n = n;
        if (bump_count) need(bumps, "bumps");
        for (size_t i = 0; i < bump_count; ++i) {
            need(bumps[i].center, "bump center");
            Bump b;
            b.center.assign(bumps[i].center, bumps[i].center + n);
            b.radius = bumps[i].radius;
            b.amplitude = bumps[i].amplitude;
            m.bumps.push_back(b);
        }
        *out = new qd_metric{make_metric(m)};
    });
}

void qd_metric_destroy(qd_metric* metric) { delete metric; }

int qd_metric_dimension(const qd_metric* metric) { return metric ? metric->g.dimension() : 0; }

qd_status qd_scalar_curvature(const qd_metric* metric, double r, double* out) {
    return guarded([&] {
        need(metric, "metric");
        need(out, "out");
        *out = scalar_curvature(metric->g, r);
    });
}

qd_status qd_scalar_curvature_at(const qd_metric* metric, const double* x, double* out) {
    return guarded([&] {
        need(metric, "metric");
        need(x, "x");
        need(out, "out");
        *out = scalar_curvature_at(metric->g, std::vector<double>(x, x + metric->g.dimension()));
    });
}

qd_status qd_volume(const qd_metric* metric, double r, double* out) {
    return guarded([&] {
        need(metric, "metric");
        need(out, "out");
        *out = volume(metric->g, r);
    });
}

qd_status qd_area(const qd_metric* metric, double r, double* out) {
    return guarded([&] {
        need(metric, "metric");
        need(out, "out");
        *out = area(metric->g, r);
    });
}

qd_status qd_total_q(const qd_metric* metric, const qd_grid_spec* grid, qd_curvature* out) {
    return guarded([&] {
        need(metric, "metric");
        need(out, "out");
        const CurvatureReport c = total_q(metric->g, grid_of(grid));
        *out = {c.total_q, c.abs_total_q, c.bound_Cn, c.bound_residual, c.hypothesis_flags.q_abs_convergent ? 1 : 0};
    });
}

qd_status qd_deficit_compute(const qd_metric* metric, const qd_grid_spec* grid, qd_deficit* out) {
    return guarded([&] {
        need(metric, "metric");
        need(out, "out");
        const DeficitReport d = deficit(metric->g, grid_of(grid));
        *out = {d.lhs,
                d.rhs.value,
                d.rhs.error_bar,
                d.rhs.converged ? 1 : 0,
                d.intermediate.value,
                d.intermediate.error_bar,
                d.intermediate.converged ? 1 : 0,
                branch_name(d.branch)};
    });
}

qd_status qd_run_create(const char* config_json, const qd_run_overrides* overrides, qd_run** out) {
    return guarded([&] {
        need(out, "out");
        *out = nullptr;
        auto run = std::make_unique<qd_run>();
        run->cfg = parse_config(config_json && *config_json ? config_json : "{}");
        if (overrides) {
            if (overrides->subcommand) {
                run->cfg.subcommand = parse_subcommand(overrides->subcommand);
                run->cfg.subcommand_given = true;
            }
            if (overrides->out_dir) run->cfg.out_dir = overrides->out_dir;
            if (overrides->format) run->cfg.format = parse_format(overrides->format);
            if (overrides->has_seed) run->cfg.seed = overrides->seed;
            if (overrides->jobs) run->cfg.jobs = overrides->jobs;
        }
        require(run->cfg.subcommand_given, ErrorCode::configuration,
                "no subcommand: give one on the command line or as $.subcommand");
        validate(run->cfg);
        *out = run.release();
    });
}

void qd_run_destroy(qd_run* run) { delete run; }

qd_status qd_run_execute(qd_run* run, int* exit_code) {
    return guarded([&] {
        need(run, "run");
        need(exit_code, "exit_code");
        run->outcome = execute(run->cfg);
        *exit_code = run->outcome.exit_code;
    });
}

size_t qd_run_file_count(const qd_run* run) { return run ? run->outcome.files.size() : 0; }

const char* qd_run_file(const qd_run* run, size_t index) {
    if (!run || index >= run->outcome.files.size()) return nullptr;
    return run->outcome.files[index].c_str();
}

const char* qd_run_summary(const qd_run* run) { return run ? run->outcome.summary.c_str() : ""; }

}  // extern "C"
