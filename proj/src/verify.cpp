#include "qdeficit/verify.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "qdeficit/constants.hpp"
#include "qdeficit/error.hpp"

namespace qdeficit {

RadialProfile make_profile(const std::string& family, double param) {
    if (family == "alpha") return family_alpha(param);
    if (family == "log") return log_profile(param);
    if (family == "sphere") return sphere_factor();
    if (family == "flat") return flat_profile(param);
    if (family == "capped-log") {
        require(param == 0.0 || param == 1.0, ErrorCode::invalid_argument, "capped-log variant must be 0 or 1");
        return capped_log(static_cast<int>(param));
    }
    fail(ErrorCode::invalid_argument,
         "unknown family '" + family + "' (expected alpha, log, sphere, flat or capped-log)");
}

ConformalMetric make_metric(const MetricSpec& spec) {
    RadialProfile u = make_profile(spec.family, spec.param);
    if (spec.bumps.empty()) return ConformalMetric(u, spec.n);
    return ConformalMetric(NonRadialField(u, spec.bumps, spec.n));
}

std::string describe(const MetricSpec& spec) {
    std::ostringstream s;
    s.precision(12);
    s << spec.family << "(" << spec.param << ") n=" << spec.n;
    if (!spec.bumps.empty()) s << " +" << spec.bumps.size() << " bumps";
    return s.str();
}

HypothesisReport check_hypotheses(const ConformalMetric& g, const CurvatureReport& curvature, const GridSpec& spec) {
    HypothesisReport rep;
    rep.completeness = completeness_check(g);
    rep.scalar_tail = scalar_tail_check(g, spec);
    rep.abs_total_q = curvature.abs_total_q;
    rep.flags.complete = rep.completeness.status == Completeness::complete;
    rep.flags.scal_nonneg_at_infinity = rep.scalar_tail.nonnegative;
    rep.flags.q_abs_convergent = curvature.hypothesis_flags.q_abs_convergent;
    return rep;
}

HypothesisReport check_hypotheses(const ConformalMetric& g, const GridSpec& spec) {
    return check_hypotheses(g, total_q(g, spec), spec);
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

TheoremReport verify_theorem(const MetricSpec& spec, const VerifyOptions& opt) {
    TheoremReport rep;
    rep.metric = spec;
    rep.descriptor = describe(spec);
    rep.curvature.total_q = std::numeric_limits<double>::quiet_NaN();
    try {
        const ConformalMetric g = make_metric(spec);
        FracLapOptions fo;
        fo.cross_check = opt.cross_check;
        rep.curvature = total_q(g, opt.grid, fo);
        rep.hypotheses = check_hypotheses(g, rep.curvature, opt.grid);
        rep.curvature.hypothesis_flags = rep.hypotheses.flags;
        for (const auto& d : rep.curvature.diagnostics) rep.diagnostics.push_back(d);
        rep.diagnostics.push_back("completeness: " + std::string(completeness_name(rep.hypotheses.completeness.status)) +
                                  " (" + rep.hypotheses.completeness.rule + ")");
        rep.diagnostics.push_back("scalar curvature: " + rep.hypotheses.scalar_tail.wording);
        if (std::isfinite(rep.curvature.total_q)) {
            rep.deficit = deficit(g, rep.curvature.total_q);
            for (const auto& d : rep.deficit.diagnostics) rep.diagnostics.push_back(d);
            rep.diagnostics.push_back(std::string("deficit branch: ") + branch_name(rep.deficit.branch));
        }
    } catch (const Error& e) {
        rep.verdict = Verdict::inconclusive;
        rep.diagnostics.push_back(std::string(error_code_name(e.code())) + ": " + e.what());
        return rep;
    } catch (const std::exception& e) {
        rep.verdict = Verdict::inconclusive;
        rep.diagnostics.push_back(std::string("internal: ") + e.what());
        return rep;
    }

    const HypothesisFlags& f = rep.hypotheses.flags;
    const bool hypotheses = f.complete && f.scal_nonneg_at_infinity && f.q_abs_convergent;
    const double tol_bound = opt.tol_bound_rel * rep.curvature.bound_Cn;
    rep.bound_violated = !(rep.curvature.bound_residual >= -tol_bound);
    if (!hypotheses) {
        rep.verdict = Verdict::fail;
        rep.expected_violation = true;
        rep.diagnostics.push_back(std::string("hypotheses fail; bound ") +
                                  (rep.bound_violated ? "violated" : "respected") + " (expected violation)");
        return rep;
    }
    const bool n3 = spec.n >= 3;
    const bool converged = rep.deficit.rhs.converged && (!n3 || rep.deficit.intermediate.converged);
    if (!converged) {
        rep.verdict = Verdict::inconclusive;
        return rep;
    }
    const bool deficit_ok = rep.deficit.residual <= opt.tol_deficit &&
                            (!n3 || rep.deficit.intermediate_residual <= opt.tol_deficit);
    if (rep.bound_violated) rep.diagnostics.push_back("total Q exceeds C_n beyond tolerance");
    if (!deficit_ok) rep.diagnostics.push_back("deficit sides disagree beyond tolerance");
    rep.verdict = !rep.bound_violated && deficit_ok ? Verdict::pass : Verdict::fail;
    return rep;
}

std::vector<MetricSpec> expand(const SweepPlan& plan) {
    require(!plan.params.empty(), ErrorCode::configuration, "sweep plan needs at least one parameter");
    require(!plan.dimensions.empty(), ErrorCode::configuration, "sweep plan needs at least one dimension");
    std::vector<MetricSpec> items;
    for (int n : plan.dimensions)
        for (double p : plan.params) {
            MetricSpec m;
            m.family = plan.family;
            m.param = p;
            m.n = n;
            items.push_back(m);
        }
    return items;
}

std::vector<TheoremReport> run_all(const std::vector<MetricSpec>& items, const VerifyOptions& opt, int jobs) {
    require(jobs >= 1 && jobs <= 256, ErrorCode::configuration, "jobs must lie in [1, 256]");
    std::vector<TheoremReport> out(items.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i = next++; i < items.size(); i = next++) out[i] = verify_theorem(items[i], opt);
    };
    const int threads = static_cast<int>(std::min<size_t>(jobs, items.size()));
    if (threads <= 1) {
        worker();
        return out;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return out;
}

std::vector<TheoremReport> run_sweep(const SweepPlan& plan, int jobs) {
    return run_all(expand(plan), plan.options, jobs);
}

}  // namespace qdeficit
