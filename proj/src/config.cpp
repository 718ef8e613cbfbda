#include "qdeficit/config.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <sstream>

#include "qdeficit/error.hpp"

namespace qdeficit {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
    fail(ErrorCode::configuration, path + ": " + what);
}

const char* type_of(const json& j) {
    switch (j.type()) {
        case json::value_t::null: return "null";
        case json::value_t::object: return "object";
        case json::value_t::array: return "array";
        case json::value_t::string: return "string";
        case json::value_t::boolean: return "boolean";
        case json::value_t::number_integer:
        case json::value_t::number_unsigned: return "integer";
        case json::value_t::number_float: return "number";
        default: return "value";
    }
}

double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) config_error(path, std::string("expected a number, got ") + type_of(j));
    const double v = j.get<double>();
    if (!std::isfinite(v)) config_error(path, "expected a finite number");
    return v;
}

long long get_integer(const json& j, const std::string& path) {
    if (j.is_number_integer()) return j.get<long long>();
    if (j.is_number_float()) {
        const double v = j.get<double>();
        if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9e15) return static_cast<long long>(v);
    }
    config_error(path, std::string("expected an integer, got ") + type_of(j));
}

int get_int_in(const json& j, const std::string& path, long long lo, long long hi) {
    const long long v = get_integer(j, path);
    if (v < lo || v > hi) {
        std::ostringstream s;
        s << "value " << v << " out of range [" << lo << ", " << hi << "]";
        config_error(path, s.str());
    }
    return static_cast<int>(v);
}

bool get_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) config_error(path, std::string("expected a boolean, got ") + type_of(j));
    return j.get<bool>();
}

std::string get_string(const json& j, const std::string& path) {
    if (!j.is_string()) config_error(path, std::string("expected a string, got ") + type_of(j));
    return j.get<std::string>();
}

const json& get_array(const json& j, const std::string& path) {
    if (!j.is_array()) config_error(path, std::string("expected an array, got ") + type_of(j));
    return j;
}

std::string suggestion(const std::string& key, const std::vector<std::string>& known) {
    std::string best;
    int best_d = 1 << 30;
    for (const auto& k : known) {
        const int d = edit_distance(key, k);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    const int limit = std::max<int>(2, static_cast<int>(key.size()) / 3);
    return best_d <= limit ? best : std::string();
}

void check_keys(const json& obj, const std::vector<std::string>& known, const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) != known.end()) continue;
        std::string msg = "unknown key \"" + it.key() + "\"";
        const std::string s = suggestion(it.key(), known);
        if (!s.empty()) msg += "; did you mean \"" + s + "\"?";
        config_error(path, msg);
    }
}

const std::vector<std::string> bump_keys{"center", "radius", "amplitude"};
const std::vector<std::string> control_keys{"family", "param", "n", "bumps"};

Bump parse_bump(const json& j, const std::string& path) {
    if (!j.is_object()) config_error(path, std::string("expected an object, got ") + type_of(j));
    check_keys(j, bump_keys, path);
    Bump b;
    if (!j.contains("center")) config_error(path, "missing key \"center\"");
    const json& c = get_array(j.at("center"), path + ".center");
    for (size_t i = 0; i < c.size(); ++i) b.center.push_back(get_number(c[i], path + ".center[" + std::to_string(i) + "]"));
    if (j.contains("radius")) b.radius = get_number(j.at("radius"), path + ".radius");
    if (!(b.radius > 0.0)) config_error(path + ".radius", "expected a positive number");
    if (j.contains("amplitude")) b.amplitude = get_number(j.at("amplitude"), path + ".amplitude");
    return b;
}

std::vector<Bump> parse_bumps(const json& j, const std::string& path) {
    std::vector<Bump> out;
    const json& a = get_array(j, path);
    for (size_t i = 0; i < a.size(); ++i) out.push_back(parse_bump(a[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

const std::vector<std::string> families{"alpha", "log", "sphere", "flat", "capped-log"};

void check_family_param(const std::string& family, double param, const std::string& path) {
    if (std::find(families.begin(), families.end(), family) == families.end()) {
        std::string msg = "unknown family \"" + family + "\" (expected alpha, log, sphere, flat or capped-log)";
        const std::string s = suggestion(family, families);
        if (!s.empty()) msg += "; did you mean \"" + s + "\"?";
        config_error(path, msg);
    }
    if (family == "alpha" && !(param >= 0.0 && param < 2.0)) {
        std::ostringstream s;
        s << "alpha = " << param << " out of range [0, 2)";
        config_error(path, s.str());
    }
    if (family == "capped-log" && param != 0.0 && param != 1.0) config_error(path, "capped-log variant must be 0 or 1");
}

void check_dimension(int n, bool bumps, const std::string& path) {
    if (n < 2 || n > 12) config_error(path, "dimension " + std::to_string(n) + " out of range [2, 12]");
    if (bumps && n != 3 && n != 4) config_error(path, "bumps need dimension 3 or 4, got " + std::to_string(n));
}

void check_bumps(const std::vector<Bump>& bumps, int n, const std::string& path) {
    for (size_t i = 0; i < bumps.size(); ++i)
        if (static_cast<int>(bumps[i].center.size()) != n)
            config_error(path + "[" + std::to_string(i) + "].center",
                         "expected " + std::to_string(n) + " coordinates for dimension " + std::to_string(n));
}

}  // namespace

const char* subcommand_name(Subcommand s) {
    switch (s) {
        case Subcommand::verify: return "verify";
        case Subcommand::sweep: return "sweep";
        case Subcommand::kernel: return "kernel";
        case Subcommand::green_check: return "green-check";
        case Subcommand::deficit_table: return "deficit-table";
    }
    return "?";
}

Subcommand parse_subcommand(const std::string& name) {
    for (Subcommand s : {Subcommand::verify, Subcommand::sweep, Subcommand::kernel, Subcommand::green_check,
                         Subcommand::deficit_table})
        if (name == subcommand_name(s)) return s;
    fail(ErrorCode::configuration,
         "unknown subcommand \"" + name + "\" (expected verify, sweep, kernel, green-check or deficit-table)");
}

const char* format_name(OutputFormat f) {
    switch (f) {
        case OutputFormat::csv: return "csv";
        case OutputFormat::json: return "json";
        case OutputFormat::both: return "both";
    }
    return "?";
}

OutputFormat parse_format(const std::string& name) {
    if (name == "csv") return OutputFormat::csv;
    if (name == "json") return OutputFormat::json;
    if (name == "both") return OutputFormat::both;
    fail(ErrorCode::configuration, "unknown format \"" + name + "\" (expected csv, json or both)");
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "subcommand",     "family",      "param",          "params",           "dimensions",
        "bumps",          "controls",    "allow_expected_violations",         "node_count",
        "map_scale",      "tail_cutoff", "rel_tol",        "max_derivative_order", "tail_fraction_tol",
        "tol_bound_rel",  "tol_deficit", "cross_check",    "kernel_decades",   "kernel_points_per_decade",
        "mc_samples",     "table_r0",    "table_ratio",    "table_count",      "out",
        "format",         "seed",        "jobs"};
    return keys;
}

int edit_distance(const std::string& a, const std::string& b) {
    std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
    for (size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
    for (size_t i = 1; i <= a.size(); ++i) {
        cur[0] = static_cast<int>(i);
        for (size_t j = 1; j <= b.size(); ++j)
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::configuration, std::string("$: malformed JSON: ") + e.what());
    }
    if (!j.is_object()) config_error("$", std::string("expected an object, got ") + type_of(j));
    check_keys(j, config_keys(), "$");

    RunConfig cfg;
    auto has = [&](const char* k) { return j.contains(k); };
    auto path = [](const char* k) { return std::string("$.") + k; };

    if (has("subcommand")) {
        try {
            cfg.subcommand = parse_subcommand(get_string(j.at("subcommand"), path("subcommand")));
        } catch (const Error& e) {
            config_error(path("subcommand"), e.what());
        }
        cfg.subcommand_given = true;
    }
    if (has("family")) cfg.family = get_string(j.at("family"), path("family"));
    if (has("param")) cfg.param = get_number(j.at("param"), path("param"));
    if (has("params")) {
        const json& a = get_array(j.at("params"), path("params"));
        for (size_t i = 0; i < a.size(); ++i)
            cfg.params.push_back(get_number(a[i], path("params") + "[" + std::to_string(i) + "]"));
    }
    if (has("dimensions")) {
        const json& a = get_array(j.at("dimensions"), path("dimensions"));
        cfg.dimensions.clear();
        for (size_t i = 0; i < a.size(); ++i)
            cfg.dimensions.push_back(get_int_in(a[i], path("dimensions") + "[" + std::to_string(i) + "]", 2, 12));
    }
    if (has("bumps")) cfg.bumps = parse_bumps(j.at("bumps"), path("bumps"));
    if (has("controls")) {
        const json& a = get_array(j.at("controls"), path("controls"));
        for (size_t i = 0; i < a.size(); ++i) {
            const std::string p = path("controls") + "[" + std::to_string(i) + "]";
            if (!a[i].is_object()) config_error(p, std::string("expected an object, got ") + type_of(a[i]));
            check_keys(a[i], control_keys, p);
            MetricSpec m;
            if (a[i].contains("family")) m.family = get_string(a[i].at("family"), p + ".family");
            if (a[i].contains("param")) m.param = get_number(a[i].at("param"), p + ".param");
            if (a[i].contains("n")) m.n = get_int_in(a[i].at("n"), p + ".n", 2, 12);
            if (a[i].contains("bumps")) m.bumps = parse_bumps(a[i].at("bumps"), p + ".bumps");
            cfg.controls.push_back(m);
        }
    }
    if (has("allow_expected_violations"))
        cfg.allow_expected_violations = get_bool(j.at("allow_expected_violations"), path("allow_expected_violations"));

    if (has("node_count")) cfg.grid.node_count = get_int_in(j.at("node_count"), path("node_count"), 16, 4096);
    if (has("map_scale")) cfg.grid.map_scale = get_number(j.at("map_scale"), path("map_scale"));
    if (has("tail_cutoff")) cfg.grid.tail_cutoff = get_number(j.at("tail_cutoff"), path("tail_cutoff"));
    if (has("rel_tol")) cfg.grid.rel_tol = get_number(j.at("rel_tol"), path("rel_tol"));
    if (has("max_derivative_order"))
        cfg.grid.max_derivative_order = get_int_in(j.at("max_derivative_order"), path("max_derivative_order"), 1, 16);
    if (has("tail_fraction_tol")) cfg.grid.tail_fraction_tol = get_number(j.at("tail_fraction_tol"), path("tail_fraction_tol"));
    if (has("tol_bound_rel")) cfg.tol_bound_rel = get_number(j.at("tol_bound_rel"), path("tol_bound_rel"));
    if (has("tol_deficit")) cfg.tol_deficit = get_number(j.at("tol_deficit"), path("tol_deficit"));
    if (has("cross_check")) cfg.cross_check = get_bool(j.at("cross_check"), path("cross_check"));

    if (has("kernel_decades")) cfg.kernel_decades = get_int_in(j.at("kernel_decades"), path("kernel_decades"), 1, 24);
    if (has("kernel_points_per_decade"))
        cfg.kernel_points_per_decade =
            get_int_in(j.at("kernel_points_per_decade"), path("kernel_points_per_decade"), 1, 256);
    if (has("mc_samples")) cfg.mc_samples = get_int_in(j.at("mc_samples"), path("mc_samples"), 1, 100000000);
    if (has("table_r0")) cfg.table_r0 = get_number(j.at("table_r0"), path("table_r0"));
    if (has("table_ratio")) cfg.table_ratio = get_number(j.at("table_ratio"), path("table_ratio"));
    if (has("table_count")) cfg.table_count = get_int_in(j.at("table_count"), path("table_count"), 1, 200);

    if (has("out")) cfg.out_dir = get_string(j.at("out"), path("out"));
    if (has("format")) {
        try {
            cfg.format = parse_format(get_string(j.at("format"), path("format")));
        } catch (const Error& e) {
            config_error(path("format"), e.what());
        }
    }
    if (has("seed")) {
        const json& s = j.at("seed");
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
            config_error(path("seed"), std::string("expected a nonnegative integer, got ") + type_of(s));
        cfg.seed = s.get<std::uint64_t>();
    }
    if (has("jobs")) cfg.jobs = get_int_in(j.at("jobs"), path("jobs"), 1, 256);

    validate(cfg);
    return cfg;
}

void validate(const RunConfig& cfg) {
    try {
        validate(cfg.grid);
    } catch (const Error& e) {
        config_error("$", e.what());
    }
    if (cfg.dimensions.empty()) config_error("$.dimensions", "expected at least one dimension");
    const bool bumps = !cfg.bumps.empty();
    for (size_t i = 0; i < cfg.dimensions.size(); ++i) {
        const std::string p = "$.dimensions[" + std::to_string(i) + "]";
        check_dimension(cfg.dimensions[i], bumps, p);
        check_bumps(cfg.bumps, cfg.dimensions[i], "$.bumps");
    }
    check_family_param(cfg.family, cfg.param, cfg.params.empty() ? "$.param" : "$.family");
    for (size_t i = 0; i < cfg.params.size(); ++i)
        check_family_param(cfg.family, cfg.params[i], "$.params[" + std::to_string(i) + "]");
    if (cfg.subcommand == Subcommand::sweep && cfg.params.empty())
        config_error("$.params", "sweep needs a nonempty parameter list");
    for (size_t i = 0; i < cfg.controls.size(); ++i) {
        const std::string p = "$.controls[" + std::to_string(i) + "]";
        const MetricSpec& m = cfg.controls[i];
        check_family_param(m.family, m.param, p + ".param");
        check_dimension(m.n, !m.bumps.empty(), p + ".n");
        check_bumps(m.bumps, m.n, p + ".bumps");
    }
    if (!(cfg.tol_bound_rel > 0.0 && cfg.tol_bound_rel < 1.0))
        config_error("$.tol_bound_rel", "expected a number in (0, 1)");
    if (!(cfg.tol_deficit > 0.0 && cfg.tol_deficit < 1.0)) config_error("$.tol_deficit", "expected a number in (0, 1)");
    if (!(cfg.table_r0 > 0.0)) config_error("$.table_r0", "expected a positive number");
    if (!(cfg.table_ratio > 1.0)) config_error("$.table_ratio", "expected a number > 1");
    if (!(cfg.table_r0 * std::pow(cfg.table_ratio, cfg.table_count - 1) <= 1e12))
        config_error("$.table_count", "largest table radius exceeds 1e12");
    if (cfg.jobs < 1 || cfg.jobs > 256) config_error("$.jobs", "value out of range [1, 256]");
    if (cfg.out_dir.empty()) config_error("$.out", "expected a nonempty directory path");
}

VerifyOptions verify_options(const RunConfig& cfg) {
    VerifyOptions o;
    o.grid = cfg.grid;
    o.tol_bound_rel = cfg.tol_bound_rel;
    o.tol_deficit = cfg.tol_deficit;
    o.cross_check = cfg.cross_check;
    return o;
}

}  // namespace qdeficit
