#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "qdeficit.h"

TEST_CASE("status names and version") {
    CHECK(std::string(qd_version()) == "0.1.0");
    CHECK(std::string(qd_status_name(QD_OK)) == "ok");
    CHECK(std::string(qd_status_name(QD_ERR_IO)) == "io");
    CHECK(std::string(qd_status_name(static_cast<qd_status>(99))) == "unknown");
}

TEST_CASE("scalar entry points") {
    CHECK(qd_total_q_bound(4) == doctest::Approx(8 * M_PI * M_PI).epsilon(1e-14));
    double v = 0;
    REQUIRE(qd_sphere_average_power(3, 1.0, 2.0, 1.0, &v) == QD_OK);
    CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::string(qd_last_error()).empty());
    CHECK(qd_sphere_average_power(3, 1.0, 2.0, 1.0, nullptr) == QD_ERR_INVALID_ARGUMENT);
    CHECK_FALSE(std::string(qd_last_error()).empty());
    CHECK(qd_sphere_average_power(3, 2.0, 1.0, 1.0, &v) != QD_OK);

    qd_green_check g;
    REQUIRE(qd_green_constant_check(3, nullptr, &g) == QD_OK);
    CHECK(g.rel_err <= 1e-3);
    qd_grid_spec spec = qd_grid_spec_default();
    spec.node_count = 3;
    CHECK(qd_green_constant_check(3, &spec, &g) == QD_ERR_CONFIGURATION);
}

TEST_CASE("metric handles") {
    qd_metric* m = nullptr;
    REQUIRE(qd_metric_create("alpha", 0.5, 4, nullptr, 0, &m) == QD_OK);
    CHECK(qd_metric_dimension(m) == 4);
    double vol = 0;
    REQUIRE(qd_volume(m, 1.0, &vol) == QD_OK);
    CHECK(vol > 0);
    qd_curvature c;
    REQUIRE(qd_total_q(m, nullptr, &c) == QD_OK);
    CHECK(c.total_q == doctest::Approx(0.5 * c.bound_Cn).epsilon(1e-3));
    CHECK(c.q_abs_convergent == 1);
    qd_deficit d;
    REQUIRE(qd_deficit_compute(m, nullptr, &d) == QD_OK);
    CHECK(d.lhs == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(std::abs(d.rhs - d.lhs) <= 1e-2);
    qd_metric_destroy(m);

    CHECK(qd_metric_create("alfa", 0.5, 3, nullptr, 0, &m) == QD_ERR_INVALID_ARGUMENT);
    CHECK(m == nullptr);

    const double center[3] = {2.0, 0.0, 0.0};
    const qd_bump bump{center, 1.0, 0.3};
    REQUIRE(qd_metric_create("flat", 0.0, 3, &bump, 1, &m) == QD_OK);
    double s = 0;
    const double far[3] = {10.0, 0.0, 0.0};
    REQUIRE(qd_scalar_curvature_at(m, far, &s) == QD_OK);
    CHECK(std::abs(s) <= 1e-12);
    qd_metric_destroy(m);
    qd_metric_destroy(nullptr);
}

TEST_CASE("runs") {
    const auto dir = std::filesystem::temp_directory_path() / "qdeficit-capi";
    std::filesystem::remove_all(dir);
    const std::string out = dir.string();
    qd_run_overrides o{};
    o.out_dir = out.c_str();
    qd_run* run = nullptr;
    CHECK(qd_run_create(R"({"family": "flat"})", &o, &run) == QD_ERR_CONFIGURATION);
    CHECK(qd_run_create(R"({"nodes_cout": 1})", &o, &run) == QD_ERR_CONFIGURATION);
    CHECK(std::string(qd_last_error()).find("node_count") != std::string::npos);

    o.subcommand = "verify";
    REQUIRE(qd_run_create(R"({"family": "flat", "dimensions": [3]})", &o, &run) == QD_OK);
    int code = -1;
    REQUIRE(qd_run_execute(run, &code) == QD_OK);
    CHECK(code == 0);
    REQUIRE(qd_run_file_count(run) == 1);
    CHECK(std::filesystem::exists(qd_run_file(run, 0)));
    CHECK(qd_run_file(run, 1) == nullptr);
    CHECK(std::string(qd_run_summary(run)).find("1 pass") != std::string::npos);
    qd_run_destroy(run);
    std::filesystem::remove_all(dir);
}
