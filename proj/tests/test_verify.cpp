#include <doctest.h>

#include <cmath>

#include "qdeficit/constants.hpp"
#include "qdeficit/error.hpp"
#include "qdeficit/report_io.hpp"
#include "qdeficit/verify.hpp"

using namespace qdeficit;

namespace {

MetricSpec spec(const std::string& family, double param, int n) {
    MetricSpec m;
    m.family = family;
    m.param = param;
    m.n = n;
    return m;
}

}  // namespace

TEST_CASE("hypothesis flags of the reference metrics") {
    struct Case {
        MetricSpec m;
        bool complete, scal, qabs;
    };
    for (const Case& c : {Case{spec("flat", 0, 3), true, true, true}, Case{spec("sphere", 0, 3), false, true, true},
                         Case{spec("alpha", 0.5, 3), true, true, true}}) {
        const HypothesisReport h = check_hypotheses(make_metric(c.m));
        CAPTURE(describe(c.m));
        CHECK(h.flags.complete == c.complete);
        CHECK(h.flags.scal_nonneg_at_infinity == c.scal);
        CHECK(h.flags.q_abs_convergent == c.qabs);
    }
}

TEST_CASE("unknown family is rejected") {
    CHECK_THROWS_AS(make_profile("alfa", 0.5), Error);
    CHECK_THROWS_AS(make_profile("capped-log", 0.5), Error);
}

TEST_CASE("flat space passes with equality") {
    const TheoremReport r = verify_theorem(spec("flat", 0, 3));
    CHECK(r.verdict == Verdict::pass);
    CHECK(std::abs(r.curvature.total_q) <= 1e-12);
    CHECK(r.deficit.lhs == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.deficit.rhs.value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("alpha 0.75 in dimension four") {
    const TheoremReport r = verify_theorem(spec("alpha", 0.75, 4));
    CHECK(r.verdict == Verdict::pass);
    CHECK(r.curvature.total_q == doctest::Approx(0.75 * total_q_bound(4)).epsilon(1e-3));
    CHECK(r.deficit.lhs == doctest::Approx(0.25).epsilon(1e-3));
    CHECK(std::abs(r.deficit.rhs.value - 0.25) <= 1e-2);
}

TEST_CASE("the sphere is an expected violation") {
    const TheoremReport r = verify_theorem(spec("sphere", 0, 3));
    CHECK(r.verdict == Verdict::fail);
    CHECK(r.expected_violation);
    CHECK(r.bound_violated);
    CHECK_FALSE(r.hypotheses.flags.complete);
    CHECK(r.curvature.total_q == doctest::Approx(2 * total_q_bound(3)).epsilon(1e-3));
}

TEST_CASE("computation errors give inconclusive reports") {
    const TheoremReport r = verify_theorem(spec("alfa", 0.5, 3));
    CHECK(r.verdict == Verdict::inconclusive);
    REQUIRE_FALSE(r.diagnostics.empty());
    CHECK(r.diagnostics.back().find("alfa") != std::string::npos);
}

TEST_CASE("sweep plans") {
    SweepPlan plan;
    plan.params = {0.0, 0.5, 1.0};
    plan.dimensions = {3, 4};
    const auto items = expand(plan);
    REQUIRE(items.size() == 6);
    CHECK(items[0].n == 3);
    CHECK(items[2].param == 1.0);
    CHECK(items[3].n == 4);

    const auto serial = run_sweep(plan, 1);
    const auto threaded = run_sweep(plan, 3);
    REQUIRE(serial.size() == 6);
    for (const TheoremReport& r : serial) {
        CAPTURE(r.descriptor);
        CHECK(r.verdict == Verdict::pass);
        // total_q / C_n + lhs = 1 on every passing report
        CHECK(r.curvature.total_q / r.curvature.bound_Cn + r.deficit.lhs == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(r.curvature.total_q <= r.curvature.bound_Cn * (1 + 1e-3));
    }
    CHECK(reports_csv(serial) == reports_csv(threaded));
    CHECK(reports_json(serial, "sweep") == reports_json(threaded, "sweep"));

    SweepPlan empty;
    empty.dimensions = {3};
    CHECK_THROWS_AS(expand(empty), Error);
    CHECK_THROWS_AS(run_all(items, {}, 0), Error);
}

TEST_CASE("the verdict is monotone in the deficit tolerance") {
    const MetricSpec m = spec("alpha", 0.25, 3);
    VerifyOptions strict;
    strict.tol_deficit = 1e-12;
    VerifyOptions loose;
    loose.tol_deficit = 1e-2;
    const TheoremReport a = verify_theorem(m, strict);
    const TheoremReport b = verify_theorem(m, loose);
    CHECK(b.verdict == Verdict::pass);
    // tightening can only turn pass into fail, never the other way
    if (a.verdict == Verdict::pass) CHECK(b.verdict == Verdict::pass);
    CHECK(a.verdict != Verdict::inconclusive);
}
