#include <doctest.h>

#include <cmath>

#include "qdeficit/constants.hpp"
#include "qdeficit/metric.hpp"

using namespace qdeficit;

TEST_CASE("alpha zero is the flat profile") {
    const RadialProfile u = family_alpha(0.0);
    for (double r : {0.0, 0.5, 3.0, 1e4}) {
        CHECK(u.value(r) == 0.0);
        CHECK(u.derivative(r, 1) == 0.0);
    }
}

TEST_CASE("scalar curvature of flat space and the round sphere") {
    const ConformalMetric flat(flat_profile(), 3);
    for (double r : {0.0, 1.0, 50.0}) CHECK(scalar_curvature(flat, r) == 0.0);
    for (int n : {3, 4, 5}) {
        const ConformalMetric sphere(sphere_factor(), n);
        for (double r : {0.0, 1.0, 10.0}) CHECK(scalar_curvature(sphere, r) == doctest::Approx(n * (n - 1.0)).epsilon(1e-12));
    }
}

TEST_CASE("scalar curvature tail of the alpha family") {
    const int n = 3;
    const double alpha = 0.5;
    const ConformalMetric g(family_alpha(alpha), n);
    for (double r : {1e3, 1e4}) {
        const double S = scalar_curvature(g, r);
        const double lead = (n - 2) * alpha * (1 - alpha / 2) * 2 * (n - 1) * std::exp(-2 * g.profile().value(r)) / (r * r);
        CHECK(S > 0.0);
        CHECK(S == doctest::Approx(lead).epsilon(2.0 / (r * r) + 1e-9));
    }
}

TEST_CASE("total Q of flat space") {
    for (int n : {2, 3, 4}) {
        const CurvatureReport c = total_q(ConformalMetric(flat_profile(), n));
        CHECK(c.total_q == 0.0);
        CHECK(c.bound_residual == c.bound_Cn);
        CHECK(c.bound_Cn == total_q_bound(n));
        CHECK(c.hypothesis_flags.q_abs_convergent);
    }
}

TEST_CASE("total Q of the alpha family and the slope identity") {
    for (int n : {3, 4})
        for (double alpha : {0.25, 0.75, 1.0}) {
            const ConformalMetric g(family_alpha(alpha), n);
            const CurvatureReport c = total_q(g);
            const double Cn = total_q_bound(n);
            CHECK(c.total_q == doctest::Approx(alpha * Cn).epsilon(1e-3));
            CHECK(c.total_q <= Cn * (1 + 1e-3));
            CHECK(c.abs_total_q >= std::abs(c.total_q) * (1 - 1e-12));
            CHECK(c.bound_residual == doctest::Approx(Cn - c.total_q).epsilon(1e-14));
            // r u'(r) tends to -alpha, which is -total_q / C_n
            CHECK(1e6 * g.profile().derivative(1e6, 1) == doctest::Approx(-c.total_q / Cn).epsilon(1e-3));
        }
}

TEST_CASE("smoothed log in four dimensions") {
    CHECK(total_q(ConformalMetric(capped_log(1), 4)).total_q == doctest::Approx(8 * M_PI * M_PI).epsilon(1e-3));
}

TEST_CASE("completeness classification") {
    CHECK(completeness_check(ConformalMetric(flat_profile(), 3)).status == Completeness::complete);
    CHECK(completeness_check(ConformalMetric(family_alpha(0.5), 3)).status == Completeness::complete);
    CHECK(completeness_check(ConformalMetric(family_alpha(1.0), 3)).status == Completeness::complete);
    CHECK(completeness_check(ConformalMetric(sphere_factor(), 3)).status == Completeness::incomplete);
    for (double alpha : {1.2, 1.5, 1.9}) CHECK(completeness_check(ConformalMetric(family_alpha(alpha), 4)).status == Completeness::incomplete);
    // rays: e^u ~ 1/r diverges like log r, e^u ~ 2/r^2 stays bounded
    const CompletenessReport a = completeness_check(ConformalMetric(family_alpha(1.0), 3));
    const CompletenessReport s = completeness_check(ConformalMetric(sphere_factor(), 3));
    CHECK(a.ray_length > 9.0);
    CHECK(s.ray_length == doctest::Approx(M_PI).epsilon(1e-3));
}

TEST_CASE("negative alpha fails the scalar curvature condition") {
    const ScalarTailReport t = scalar_tail_check(ConformalMetric(log_profile(-0.5), 3));
    CHECK_FALSE(t.nonnegative);
    CHECK(t.leading_coefficient < 0.0);
    CHECK(scalar_tail_check(ConformalMetric(family_alpha(0.5), 3)).nonnegative);
}

TEST_CASE("flat unit ball") {
    const ConformalMetric g(flat_profile(), 3);
    CHECK(volume(g, 1.0) == doctest::Approx(4 * M_PI / 3).epsilon(1e-13));
    CHECK(area(g, 1.0) == doctest::Approx(4 * M_PI).epsilon(1e-13));
}

TEST_CASE("volume increases with the radius") {
    for (double alpha : {0.0, 0.5, 1.0}) {
        const ConformalMetric g(family_alpha(alpha), 3);
        double prev = 0.0;
        for (double r = 0.1; r < 1e4; r *= 1.7) {
            const double v = volume(g, r);
            CHECK(v > prev);
            prev = v;
        }
    }
}

TEST_CASE("area tail of the alpha family") {
    const int n = 3;
    const ConformalMetric g(family_alpha(0.5), n);
    for (double r : {1e3, 1e5})
        CHECK(area(g, r) == doctest::Approx(unit_sphere_area(n) * std::pow(r, (n - 1) / 2.0)).epsilon(1e-5));
}

TEST_CASE("mixed volumes of flat space") {
    for (int n : {3, 4, 5})
        for (double t : {-1.0, 0.0, 2.0}) {
            const MixedVolumes mv = mixed_volumes(ConformalMetric(flat_profile(), n), t);
            const double wn = unit_ball_volume(n);
            CHECK(mv.w == doctest::Approx(t));
            CHECK(mv.dw_dt == doctest::Approx(1.0).epsilon(1e-14));
            CHECK(mv.V_n2 == doctest::Approx(wn * std::exp((n - 2) * t)).epsilon(1e-13));
            CHECK(intermediate_ratio(mv, n) == doctest::Approx(1.0).epsilon(1e-13));
        }
}

TEST_CASE("mixed volume identities and the two routes") {
    for (int n : {3, 4, 6})
        for (double alpha : {0.25, 0.5, 1.0})
            for (double t : {-2.0, 0.0, 1.5, 6.0}) {
                const MixedVolumes mv = mixed_volumes(ConformalMetric(family_alpha(alpha), n), t);
                const double wn = unit_ball_volume(n);
                CHECK(mv.V_n1 == doctest::Approx(wn * std::exp((n - 1) * mv.w)).epsilon(1e-13));
                CHECK(mv.V_n2 == doctest::Approx(wn * std::exp((n - 2) * mv.w) * mv.dw_dt).epsilon(1e-13));
                CHECK(mv.V_n3 == doctest::Approx(wn * std::exp((n - 3) * mv.w) * mv.dw_dt * mv.dw_dt).epsilon(1e-13));
                CHECK(mv.route_gap <= 1e-8);
            }
}

TEST_CASE("cylindrical slope tends to 1 - alpha") {
    const MixedVolumes mv = mixed_volumes(ConformalMetric(family_alpha(0.5), 3), std::log(1e6));
    CHECK(mv.dw_dt == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("deficit of flat space") {
    for (int n : {2, 3, 4}) {
        const DeficitReport d = deficit(ConformalMetric(flat_profile(), n));
        CHECK(d.lhs == 1.0);
        CHECK(d.rhs.converged);
        CHECK(d.residual <= 1e-6);
    }
}

TEST_CASE("deficit chain for the alpha family") {
    for (int n : {3, 4})
        for (double alpha : {0.0, 0.25, 0.5, 0.75}) {
            const DeficitReport d = deficit(ConformalMetric(family_alpha(alpha), n));
            CHECK(d.lhs == doctest::Approx(1 - alpha).epsilon(1e-3));
            REQUIRE(d.rhs.converged);
            REQUIRE(d.intermediate.converged);
            CHECK(std::abs(d.rhs.value - d.lhs) <= 1e-2);
            CHECK(std::abs(d.intermediate.value - d.lhs) <= 1e-2);
            CHECK(std::abs(d.intermediate.value - d.rhs.value) <= 1e-2);
            CHECK(d.branch == DeficitBranch::positive_slope);
        }
}

TEST_CASE("cylindrical end") {
    const DeficitReport d = deficit(ConformalMetric(family_alpha(1.0), 3));
    CHECK(std::abs(d.lhs) <= 1e-3);
    CHECK(d.rhs.value == 0.0);
    CHECK(d.branch != DeficitBranch::unclassified);
    CHECK(d.branch != DeficitBranch::positive_slope);
}

TEST_CASE("the sphere has negative cylindrical slope") {
    const DeficitReport d = deficit(ConformalMetric(sphere_factor(), 3));
    CHECK(d.branch == DeficitBranch::negative_slope);
    CHECK(d.lhs == doctest::Approx(-1.0).epsilon(1e-3));
}
