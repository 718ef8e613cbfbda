#include <doctest.h>

#include <cmath>
#include <random>

#include "qdeficit/error.hpp"
#include "qdeficit/kernels.hpp"
#include "qdeficit/quadrature.hpp"

using namespace qdeficit;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Closed forms for n = 3 from the polar integral in t = cos(phi).
double K2_n3(double r, double s) { return std::log((r + s) / std::abs(r - s)) / (2.0 * r * s); }
double Lambda_n3(double r, double s) {
    const double d = std::abs(r - s);
    return ((r + s) * (r + s) * std::log(r + s) - (d > 0 ? d * d * std::log(d) : 0.0)) / (4.0 * r * s) - 0.5;
}

// Mean over |z| = r of g(|z - y|), |y| = s, by sampling the sphere.
template <class G>
std::pair<double, double> mc_sphere(int n, double r, double s, G g, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<double> z(n);
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < samples; ++i) {
        double nz = 0.0;
        for (double& v : z) {
            v = normal(rng);
            nz += v * v;
        }
        nz = std::sqrt(nz);
        double d2 = 0.0;
        for (int j = 0; j < n; ++j) {
            const double x = r * z[j] / nz - (j == 0 ? s : 0.0);
            d2 += x * x;
        }
        const double v = g(std::sqrt(d2));
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / samples;
    return {mean, std::sqrt((sum2 / samples - mean * mean) / (samples - 1))};
}

}  // namespace

TEST_CASE("gauss-legendre integrates polynomials exactly") {
    const GaussRule g = gauss_legendre(8);
    for (int k = 0; k <= 15; ++k) {
        double q = 0.0;
        for (size_t i = 0; i < g.nodes.size(); ++i) q += g.weights[i] * std::pow(g.nodes[i], k);
        CHECK(q == doctest::Approx(k % 2 ? 0.0 : 2.0 / (k + 1)).epsilon(1e-14));
    }
}

TEST_CASE("adaptive gauss-kronrod") {
    CHECK(integrate_gk([](double x) { return std::sin(x); }, 0.0, M_PI).value ==
          doctest::Approx(2.0).epsilon(1e-13));
    CHECK(integrate_gk([](double x) { return 1.0 / std::sqrt(x); }, graded_breaks(0.0, 1.0, 0.0, 1e-14)).value ==
          doctest::Approx(2.0).epsilon(1e-10));
    CHECK(integrate_gk_to_infinity([](double x) { return std::exp(-x); }, 1.0).value ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("sphere average with the point at the centre") {
    for (int n : {3, 4, 6})
        for (double p : {0.5, 1.0, 3.0}) CHECK(sphere_average_power(n, p, 2.0, 0.0) == doctest::Approx(std::pow(2.0, -p)).epsilon(1e-13));
}

TEST_CASE("newton kernel mean value in three dimensions") {
    CHECK(sphere_average_power(3, 1.0, 2.0, 1.0) == doctest::Approx(0.5).epsilon(1e-13));
    const auto mc = mc_sphere(3, 2.0, 1.0, [](double d) { return 1.0 / d; }, 200000, 11);
    CHECK(std::abs(mc.first - 0.5) <= 5.0 * mc.second);
}

TEST_CASE("zero exponent averages to one") {
    for (int n : {3, 5}) CHECK(sphere_average_power(n, 0.0, 1.3, 0.4) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("newton oracle for n = 3..8") {
    const double radii[] = {0.01, 0.3, 1.0, 1.0 + 1e-9, 2.5, 40.0};
    for (int n = 3; n <= 8; ++n)
        for (double r : radii)
            for (double s : radii)
                CHECK(rel(sphere_average_power(n, n - 2.0, r, s), std::pow(std::max(r, s), 2.0 - n)) <= 1e-10);
}

TEST_CASE("closed forms in three dimensions") {
    for (auto [r, s] : {std::pair{1.0, 0.3}, {1.0, 2.0}, {5.0, 5.5}, {0.2, 0.21}}) {
        CHECK(rel(sphere_average_power(3, 2.0, r, s), K2_n3(r, s)) <= 1e-10);
        CHECK(rel(kernel_I(3, r, s), std::abs(r * r - s * s) * K2_n3(r, s)) <= 1e-10);
        CHECK(std::abs(sphere_average_log(3, r, s) - Lambda_n3(r, s)) <= 1e-10 * (1 + std::abs(Lambda_n3(r, s))));
    }
    CHECK(std::abs(sphere_average_log(3, 1.0, 1.0) - Lambda_n3(1.0, 1.0)) <= 1e-10);
}

TEST_CASE("log average against sphere sampling") {
    CHECK(sphere_average_log(4, 2.0, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-13));
    const auto mc = mc_sphere(3, 1.0, 2.0, [](double d) { return std::log(d); }, 400000, 5);
    const double v = sphere_average_log(3, 1.0, 2.0);
    CHECK(std::abs(mc.first - v) <= std::max(1e-4, 5.0 * mc.second));
    CHECK(v == doctest::Approx(sphere_average_log(3, 2.0, 1.0)).epsilon(1e-13));
}

TEST_CASE("homogeneity and symmetry") {
    const double radii[] = {0.05, 0.7, 1.0, 1.3, 9.0};
    for (int n : {3, 4, 7})
        for (double p : {0.5, 1.0, 2.0, n - 1.5})
            for (double r : radii)
                for (double s : radii) {
                    if (r == s && p >= n - 1 - 1e-6) continue;
                    const double base = sphere_average_power(n, p, r, s);
                    CHECK(rel(sphere_average_power(n, p, s, r), base) <= 1e-10);
                    for (double lambda : {1e-3, 0.5, 7.0, 1e4})
                        CHECK(rel(sphere_average_power(n, p, lambda * r, lambda * s), std::pow(lambda, -p) * base) <=
                              1e-10);
                }
    for (int n : {3, 4})
        CHECK(sphere_average_log(n, 0.3, 2.0) == doctest::Approx(sphere_average_log(n, 2.0, 0.3)).epsilon(1e-13));
}

TEST_CASE("kernels decrease as the point moves outward") {
    for (int n : {3, 5})
        for (double p : {1.0, 2.0}) {
            double prev = sphere_average_power(n, p, 1.0, 1.0 + 1e-3);
            for (double s = 1.01; s < 100.0; s *= 1.3) {
                const double v = sphere_average_power(n, p, 1.0, s);
                CHECK(v <= prev * (1 + 1e-13));
                prev = v;
            }
        }
}

TEST_CASE("coincident radii at the singular exponent") {
    try {
        sphere_average_power(3, 2.0, 1.0, 1.0);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::singular_average);
    }
    try {
        sphere_average_log(3, 0.0, 0.0);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::domain);
    }
}

TEST_CASE("kernel I limits") {
    for (int n : {3, 4, 6}) {
        CHECK(kernel_I(n, 1.0, 1e-8) == doctest::Approx(1.0).epsilon(1e-7));
        CHECK(kernel_I(n, 2.0, 2.0) == 0.0);
    }
}

TEST_CASE("kernel I against sampling and the scanned supremum") {
    const SupScan scan = kernel_sup_scan(4, 4);
    CHECK(std::isfinite(scan.sup_I));
    CHECK(std::isfinite(scan.sup_J));
    const double v = kernel_I(4, 1.0, 1.1);
    CHECK(v <= scan.sup_I * (1 + 1e-9));
    const auto mc = mc_sphere(4, 1.0, 1.1, [](double d) { return (1.1 * 1.1 - 1.0) / (d * d); }, 400000, 3);
    CHECK(std::abs(mc.first - v) <= 5.0 * mc.second);
    // MC spot check of the J maximum at its argmax
    const double r = scan.argmax_J_r, s = scan.argmax_J_s;
    const auto mj = mc_sphere(4, r, s, [&](double d) { return (r * r + s * s) / (d * d); }, 400000, 4);
    CHECK(std::abs(mj.first - scan.sup_J) <= 5.0 * mj.second + 1e-3 * scan.sup_J);
}

TEST_CASE("scale invariant kernel combinations") {
    for (int n : {3, 4, 5})
        for (auto [r, s] : {std::pair{0.3, 0.7}, {2.0, 1.1}}) {
            const double j = (r * r + s * s) * sphere_average_power(n, 2.0, r, s);
            const double j10 = (100 * r * r + 100 * s * s) * sphere_average_power(n, 2.0, 10 * r, 10 * s);
            CHECK(j10 == doctest::Approx(j).epsilon(1e-11));
            CHECK(kernel_I(n, 10 * r, 10 * s) == doctest::Approx(kernel_I(n, r, s)).epsilon(1e-11));
        }
}

TEST_CASE("sup scan is stable under refinement") {
    for (int n = 3; n <= 6; ++n) {
        const SupScan a = kernel_sup_scan(n, 6, 4), b = kernel_sup_scan(n, 6, 8);
        CHECK(rel(a.sup_I, b.sup_I) <= 0.05);
        CHECK(rel(a.sup_J, b.sup_J) <= 0.05);
    }
}

TEST_CASE("kernel tables reproduce direct quadrature") {
    for (int n : {3, 5}) {
        auto K = KernelTable::power(n, n - 1.0);
        for (double s : {0.1, 0.9, 0.999, 1.001, 3.0, 100.0})
            CHECK(rel((*K)(1.0, s), sphere_average_power(n, n - 1.0, 1.0, s)) <= 1e-11);
        auto L = KernelTable::log(n);
        for (double s : {0.1, 0.9, 1.0, 3.0}) CHECK(std::abs((*L)(1.0, s) - sphere_average_log(n, 1.0, s)) <= 1e-11);
    }
}
