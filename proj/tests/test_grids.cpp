#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "qdeficit/error.hpp"
#include "qdeficit/grids.hpp"
#include "qdeficit/quadrature.hpp"

using namespace qdeficit;

namespace {

std::shared_ptr<const Grid> grid(int n, double L = 1.0) {
    GridSpec s;
    s.node_count = n;
    s.map_scale = L;
    return Grid::build(s);
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::ok;
}

}  // namespace

TEST_CASE("grid nodes start at the origin and increase") {
    auto g = grid(16);
    REQUIRE(g->size() == 16);
    CHECK(g->r()[0] == 0.0);
    for (int j = 1; j < g->size(); ++j) CHECK(g->r()[j] > g->r()[j - 1]);
}

TEST_CASE("map scale multiplies every node") {
    auto a = grid(16, 1.0), b = grid(16, 2.0);
    for (int j = 0; j < 16; ++j) CHECK(b->r()[j] == doctest::Approx(2.0 * a->r()[j]).epsilon(1e-14));
}

TEST_CASE("chebyshev grids are not nested") {
    auto a = grid(16), b = grid(32);
    int shared = 0;
    for (double r : a->r())
        for (double s : b->r())
            if (std::abs(r - s) <= 1e-12 * (1 + r)) ++shared;
    CHECK(shared < 16);
}

TEST_CASE("invalid grid specs are configuration errors") {
    GridSpec s;
    s.node_count = 8;
    CHECK(code_of([&] { Grid::build(s); }) == ErrorCode::configuration);
    s = {};
    s.map_scale = -1.0;
    CHECK(code_of([&] { Grid::build(s); }) == ErrorCode::configuration);
    s = {};
    s.rel_tol = 0.0;
    CHECK(code_of([&] { validate(s); }) == ErrorCode::configuration);
}

TEST_CASE("derivative of r^2 is 2r") {
    auto g = grid(64);
    auto f = sample(g, [](double r) { return r * r; }, Parity::even, TailModel::rapid(), 2);
    auto d = differentiate(f, 1);
    for (int j = 0; j < g->size(); ++j) {
        const double r = g->r()[j];
        if (r > 1e3) continue;
        CHECK(std::abs(d.values[j] - 2.0 * r) <= 1e-10 * std::max(1.0, r));
    }
}

TEST_CASE("derivatives of polynomials in t are exact") {
    auto g = grid(64);
    auto P = [](double t) { return 1.0 + 3.0 * t * t - 2.0 * std::pow(t, 5) + std::pow(t, 11); };
    auto dP = [](double t) { return 6.0 * t - 10.0 * std::pow(t, 4) + 11.0 * std::pow(t, 10); };
    auto f = sample(g, [&](double r) { return P(g->t_of_r(r)); }, Parity::none, TailModel::undeclared());
    auto dt = g->apply_dt(f.values);
    double worst = 0.0;
    for (int j = 0; j < g->size(); ++j) worst = std::max(worst, std::abs(dt[j] - dP(g->t()[j])));
    CHECK(worst <= 1e-10);
}

TEST_CASE("gaussian second derivative at the origin") {
    auto g = grid(256);
    auto f = sample(g, [](double r) { return std::exp(-r * r); });
    auto d2 = differentiate(f, 2);
    CHECK(std::abs(d2.values[0] + 2.0) <= 1e-8 * 2.0);
}

TEST_CASE("constants have zero derivative") {
    auto g = grid(64);
    auto f = sample(g, [](double) { return 3.5; }, Parity::even, TailModel::rapid());
    auto d = differentiate(f, 1);
    for (double v : d.values) CHECK(std::abs(v) <= 1e-11);
}

TEST_CASE("derivative order beyond the configured maximum") {
    auto g = grid(64);
    auto f = sample(g, [](double r) { return std::exp(-r * r); });
    CHECK(code_of([&] { differentiate(f, 7); }) == ErrorCode::unsupported_order);
}

TEST_CASE("gaussian radial integral in three dimensions") {
    auto g = grid(256);
    auto f = sample(g, [](double r) { return std::exp(-r * r); });
    // integral over R^3 of e^(-|x|^2) divided by the sphere area 4 pi
    const double ref = std::pow(M_PI, 1.5) / (4.0 * M_PI);
    CHECK(integrate_radial(f, 3) == doctest::Approx(ref).epsilon(1e-8));
}

TEST_CASE("zero integrates to zero") {
    auto g = grid(64);
    auto f = sample(g, [](double) { return 0.0; });
    CHECK(integrate_radial(f, 3) == 0.0);
}

TEST_CASE("non-integrable power tail is rejected") {
    auto g = grid(64);
    const int n = 3;
    auto f = sample(g, [](double r) { return std::pow(1.0 + r, -n + 0.5); }, Parity::none,
                    TailModel::power(n - 0.5));
    CHECK(code_of([&] { integrate_radial(f, n); }) == ErrorCode::tail_divergence);
}

TEST_CASE("compactly supported integrand agrees with adaptive quadrature") {
    auto bump = [](double r) { return r < 1.0 ? std::pow(1.0 - r * r, 6) : 0.0; };
    auto g = grid(512);
    auto f = sample(g, bump);
    for (int n : {2, 3, 4}) {
        QuadOptions o;
        o.rel_tol = 1e-13;
        const double ref = integrate_gk([&](double r) { return bump(r) * std::pow(r, n - 1); }, 0.0, 1.0, o).value;
        CHECK(integrate_radial(f, n) == doctest::Approx(ref).epsilon(1e-8));
    }
}

TEST_CASE("doubling the node count barely moves smooth results") {
    auto profile = [](double r) { return std::exp(-r * r) * (1.0 + 0.5 * r * r); };
    auto a = sample(grid(256), profile), b = sample(grid(512), profile);
    const double ia = integrate_radial(a, 4), ib = integrate_radial(b, 4);
    CHECK(std::abs(ia - ib) <= 10.0 * 1e-8 * std::abs(ib));
    const double da = differentiate(a, 2).evaluate(0.7), db = differentiate(b, 2).evaluate(0.7);
    CHECK(std::abs(da - db) <= 10.0 * 1e-8 * std::max(1.0, std::abs(db)));
}

TEST_CASE("limit of 1 + 1/r") {
    const std::vector<double> radii{8, 16, 32, 64};
    std::vector<double> v;
    for (double r : radii) v.push_back(1.0 + 1.0 / r);
    const LimitEstimate e = extrapolate_limit(radii, v);
    CHECK(e.converged);
    CHECK(e.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("limit of a constant sequence") {
    const auto radii = geometric_radii(10, 2, 6);
    const LimitEstimate e = extrapolate_limit(radii, std::vector<double>(6, 0.37));
    CHECK(e.converged);
    CHECK(e.value == 0.37);
    CHECK(e.error_bar == 0.0);
}

TEST_CASE("log r has no limit") {
    const auto radii = geometric_radii(10, 2, 6);
    std::vector<double> v;
    for (double r : radii) v.push_back(std::log(r));
    CHECK_FALSE(extrapolate_limit(radii, v).converged);
}

TEST_CASE("limits commute with affine maps") {
    const auto radii = geometric_radii(10, 2, 6);
    std::vector<double> v, w;
    for (double r : radii) {
        v.push_back(0.5 + 2.0 / r - 3.0 / (r * r));
        w.push_back(-4.0 * v.back() + 7.0);
    }
    const LimitEstimate a = extrapolate_limit(radii, v), b = extrapolate_limit(radii, w);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    CHECK(b.value == doctest::Approx(-4.0 * a.value + 7.0).epsilon(1e-10));
}

TEST_CASE("build reuses grids with equal specs") {
    GridSpec s;
    s.node_count = 48;
    CHECK(Grid::build(s).get() == Grid::build(s).get());
}
