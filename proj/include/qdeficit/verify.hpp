#pragma once

// Hypothesis checks, theorem reports and parameter sweeps.

#include <string>
#include <vector>

#include "qdeficit/grids.hpp"
#include "qdeficit/metric.hpp"
#include "qdeficit/symmetrize.hpp"

namespace qdeficit {

// A metric by name: family in {alpha, log, sphere, flat, capped-log}, its
// parameter, the dimension and optional bumps on top of the radial factor.
struct MetricSpec {
    std::string family = "alpha";
    double param = 0.0;
    int n = 3;
    std::vector<Bump> bumps;
};

RadialProfile make_profile(const std::string& family, double param);
ConformalMetric make_metric(const MetricSpec& spec);
std::string describe(const MetricSpec& spec);

struct HypothesisReport {
    HypothesisFlags flags;
    CompletenessReport completeness;
    ScalarTailReport scalar_tail;
    double abs_total_q = 0.0;
};

// Completeness, sampled nonnegativity of S near infinity and absolute
// integrability of Q. total_q supplies the last flag and abs_total_q.
HypothesisReport check_hypotheses(const ConformalMetric& g, const CurvatureReport& curvature,
                                  const GridSpec& spec = {});
HypothesisReport check_hypotheses(const ConformalMetric& g, const GridSpec& spec = {});

enum class Verdict { pass, fail, inconclusive };
const char* verdict_name(Verdict v);

struct VerifyOptions {
    GridSpec grid;
    double tol_bound_rel = 1e-3;  // tol_bound = tol_bound_rel * C_n
    double tol_deficit = 1e-2;
    bool cross_check = true;
};

struct TheoremReport {
    std::string descriptor;
    MetricSpec metric;
    HypothesisReport hypotheses;
    CurvatureReport curvature;
    DeficitReport deficit;
    Verdict verdict = Verdict::inconclusive;
    // The hypotheses fail, so the theorem makes no claim; bound_violated then
    // records whether the metric also exceeds C_n.
    bool expected_violation = false;
    bool bound_violated = false;
    bool control = false;  // listed as a negative control in the run config
    std::vector<std::string> diagnostics;
};

// pass: all flags hold, C_n - total_q >= -tol_bound, and both the rhs and the
// intermediate limits converged within tol_deficit of the lhs.
// fail: a hypothesis fails (expected violation) or a check is violated.
// inconclusive: a limit did not converge or a computation raised an error.
TheoremReport verify_theorem(const MetricSpec& spec, const VerifyOptions& opt = {});

struct SweepPlan {
    std::string family = "alpha";
    std::vector<double> params;
    std::vector<int> dimensions;
    VerifyOptions options;
};

// Items in plan order (dimension-major, then parameter), independent of jobs.
std::vector<MetricSpec> expand(const SweepPlan& plan);
std::vector<TheoremReport> run_sweep(const SweepPlan& plan, int jobs = 1);
std::vector<TheoremReport> run_all(const std::vector<MetricSpec>& items, const VerifyOptions& opt, int jobs = 1);

}  // namespace qdeficit
