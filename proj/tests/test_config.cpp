#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <sstream>

#include "qdeficit/config.hpp"
#include "qdeficit/error.hpp"
#include "qdeficit/report_io.hpp"
#include "qdeficit/runner.hpp"

using namespace qdeficit;
namespace fs = std::filesystem;

namespace {

std::string config_message(const std::string& text) {
    try {
        parse_config(text);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::configuration);
        return e.what();
    }
    FAIL("config accepted: " << text);
    return {};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("qdeficit-test-" + name);
    fs::remove_all(p);
    return p;
}

TheoremReport report(Verdict v, bool expected = false, bool control = false) {
    TheoremReport r;
    r.verdict = v;
    r.expected_violation = expected;
    r.control = control;
    return r;
}

}  // namespace

TEST_CASE("minimal config") {
    const RunConfig c = parse_config(R"({"subcommand": "verify", "family": "alpha", "param": 0.5, "dimensions": [3]})");
    CHECK(c.subcommand == Subcommand::verify);
    CHECK(c.subcommand_given);
    CHECK(c.param == 0.5);
    CHECK(c.dimensions == std::vector<int>{3});
    CHECK_FALSE(parse_config("{}").subcommand_given);
}

TEST_CASE("config errors name the key") {
    CHECK(config_message(R"({"nodes_cout": 64})").find("did you mean \"node_count\"") != std::string::npos);
    const std::string range = config_message(R"({"family": "alpha", "param": 2.5})");
    CHECK(range.find("$.param") != std::string::npos);
    CHECK(config_message(R"({"dimensions": [3, "4"]})").find("$.dimensions[1]") != std::string::npos);
    CHECK(config_message(R"({"subcommand": "swep"})").find("subcommand") != std::string::npos);
    CHECK(config_message("[1, 2]").size() > 0);
    CHECK(config_message("{").size() > 0);
    CHECK(config_message(R"({"jobs": 0})").find("jobs") != std::string::npos);
}

TEST_CASE("edit distance") {
    CHECK(edit_distance("", "abc") == 3);
    CHECK(edit_distance("kitten", "sitting") == 3);
    CHECK(edit_distance("nodes_cout", "node_count") == 2);
}

TEST_CASE("exit policy") {
    CHECK(exit_code_for({report(Verdict::pass), report(Verdict::inconclusive)}, true) == 0);
    CHECK(exit_code_for({report(Verdict::pass), report(Verdict::fail)}, true) == 1);
    CHECK(exit_code_for({report(Verdict::fail, true)}, true) == 0);
    CHECK(exit_code_for({report(Verdict::fail, true)}, false) == 1);
    CHECK(exit_code_for({report(Verdict::fail, false, true)}, true) == 0);
    CHECK(exit_code_for({report(Verdict::fail, false, true)}, false) == 1);
    CHECK(exit_code_for({}, false) == 0);
}

TEST_CASE("numbers survive the JSON round trip") {
    TheoremReport r = report(Verdict::pass);
    r.metric.param = 0.1;
    r.curvature.total_q = 2.0 / 3.0 * 1234.5678;
    r.curvature.bound_Cn = std::sqrt(2.0) * 100;
    r.deficit.lhs = 1e-300;
    r.deficit.rhs.value = -std::nextafter(0.7, 1.0);
    const auto j = nlohmann::json::parse(reports_json({r}, "verify"));
    auto find = [&](const std::string& key) {
        double v = NAN;
        std::function<void(const nlohmann::json&)> walk = [&](const nlohmann::json& x) {
            if (x.is_object()) {
                for (auto it = x.begin(); it != x.end(); ++it) {
                    if (it.key() == key && it->is_number()) v = it->get<double>();
                    if (it.key() == key && it->is_object() && it->contains("value")) v = it->at("value").get<double>();
                    walk(*it);
                }
            } else if (x.is_array()) {
                for (const auto& y : x) walk(y);
            }
        };
        walk(j);
        return v;
    };
    CHECK(find("total_q") == r.curvature.total_q);
    CHECK(find("lhs") == r.deficit.lhs);
    CHECK(find("rhs") == r.deficit.rhs.value);
    CHECK(find("param") == 0.1);
}

TEST_CASE("csv columns") {
    CHECK(report_columns() == std::vector<std::string>{"n", "family", "param", "total_q", "Cn", "bound_residual", "lhs",
                                                       "rhs", "rhs_err", "verdict"});
    const std::string csv = reports_csv({});
    CHECK(csv == "n,family,param,total_q,Cn,bound_residual,lhs,rhs,rhs_err,verdict\n");
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(NAN) == "nan");
}

TEST_CASE("the runner writes report files") {
    const fs::path dir = scratch_dir("runner");
    RunConfig c = parse_config(R"({"subcommand": "verify", "family": "flat", "dimensions": [3], "format": "both"})");
    c.out_dir = (dir / "nested").string();
    const RunOutcome o = execute(c);
    CHECK(o.exit_code == 0);
    CHECK(o.passed == 1);
    REQUIRE(o.files.size() == 2);
    const std::string csv = slurp((dir / "nested" / "verify.csv").string());
    CHECK(csv.rfind("n,family,param,total_q,Cn,bound_residual,lhs,rhs,rhs_err,verdict\n", 0) == 0);
    CHECK(csv.find(",pass\n") != std::string::npos);
    CHECK(nlohmann::json::parse(slurp((dir / "nested" / "verify.json").string())).is_object());
    fs::remove_all(dir);
}

TEST_CASE("unwritable output is an IO error") {
    const fs::path dir = scratch_dir("io");
    fs::create_directories(dir);
    std::ofstream(dir / "file") << "x";
    RunConfig c = parse_config(R"({"subcommand": "green-check", "dimensions": [3]})");
    c.out_dir = (dir / "file" / "sub").string();
    try {
        execute(c);
        FAIL("expected an IO error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::io);
    }
    fs::remove_all(dir);
}
