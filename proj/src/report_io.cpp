#include "qdeficit/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <sstream>

namespace qdeficit {

using nlohmann::json;

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace {

// CSV fields never contain commas or quotes except family names from user
// configs, which are quoted when needed.
std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string join(const std::vector<std::string>& cells) {
    std::string line;
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        line += cells[i];
    }
    return line + "\n";
}

json limit_json(const LimitEstimate& e) {
    return {{"value", e.value},     {"error_bar", e.error_bar}, {"converged", e.converged},
            {"radii", e.radii},     {"samples", e.samples},     {"diagnostic", e.diagnostic}};
}

json metric_json(const MetricSpec& m) {
    json bumps = json::array();
    for (const Bump& b : m.bumps) bumps.push_back({{"center", b.center}, {"radius", b.radius}, {"amplitude", b.amplitude}});
    return {{"family", m.family}, {"param", m.param}, {"n", m.n}, {"bumps", bumps}};
}

json report_json(const TheoremReport& r) {
    const HypothesisReport& h = r.hypotheses;
    json flags = {{"complete", h.flags.complete},
                  {"scal_nonneg_at_infinity", h.flags.scal_nonneg_at_infinity},
                  {"q_abs_convergent", h.flags.q_abs_convergent}};
    json hyp = {{"completeness",
                 {{"status", completeness_name(h.completeness.status)},
                  {"alpha", h.completeness.alpha},
                  {"ray_length", h.completeness.ray_length},
                  {"ray_radius", h.completeness.ray_radius},
                  {"rule", h.completeness.rule}}},
                {"scalar_tail",
                 {{"nonnegative", h.scalar_tail.nonnegative},
                  {"sampled_min", h.scalar_tail.sampled_min},
                  {"r_min", h.scalar_tail.r_min},
                  {"r_max", h.scalar_tail.r_max},
                  {"leading_coefficient", h.scalar_tail.leading_coefficient},
                  {"wording", h.scalar_tail.wording}}},
                {"abs_total_q", h.abs_total_q}};
    const CurvatureReport& c = r.curvature;
    json curv = {{"total_q", c.total_q},       {"abs_total_q", c.abs_total_q}, {"bound_Cn", c.bound_Cn},
                 {"bound_residual", c.bound_residual}, {"method", c.method}, {"cross_gap", c.cross_gap},
                 {"hypothesis_flags", flags},  {"diagnostics", c.diagnostics}};
    const DeficitReport& d = r.deficit;
    json def = {{"lhs", d.lhs},
                {"rhs", limit_json(d.rhs)},
                {"intermediate", limit_json(d.intermediate)},
                {"residual", d.residual},
                {"intermediate_residual", d.intermediate_residual},
                {"branch", branch_name(d.branch)},
                {"diagnostics", d.diagnostics}};
    return {{"descriptor", r.descriptor},
            {"metric", metric_json(r.metric)},
            {"hypothesis_flags", flags},
            {"hypotheses", hyp},
            {"curvature", curv},
            {"deficit", def},
            {"verdict", verdict_name(r.verdict)},
            {"expected_violation", r.expected_violation},
            {"bound_violated", r.bound_violated},
            {"control", r.control},
            {"diagnostics", r.diagnostics}};
}

}  // namespace

const std::vector<std::string>& report_columns() {
    static const std::vector<std::string> cols{"n",   "family", "param", "total_q", "Cn",
                                               "bound_residual", "lhs", "rhs", "rhs_err", "verdict"};
    return cols;
}

std::string reports_csv(const std::vector<TheoremReport>& reports) {
    std::string out = join(report_columns());
    for (const TheoremReport& r : reports) {
        out += join({std::to_string(r.metric.n), csv_field(r.metric.family), format_number(r.metric.param),
                     format_number(r.curvature.total_q), format_number(r.curvature.bound_Cn),
                     format_number(r.curvature.bound_residual), format_number(r.deficit.lhs),
                     format_number(r.deficit.rhs.value), format_number(r.deficit.rhs.error_bar),
                     verdict_name(r.verdict)});
    }
    return out;
}

std::string reports_json(const std::vector<TheoremReport>& reports, const std::string& subcommand) {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(report_json(r));
    return json{{"subcommand", subcommand}, {"reports", arr}}.dump(2) + "\n";
}

std::string kernel_csv(const std::vector<KernelRow>& rows) {
    std::string out = join({"n", "newton_max_rel_err", "homogeneity_max_rel_err", "symmetry_max_rel_err", "sup_I",
                            "sup_I_refined", "sup_J", "sup_J_refined", "sup_stable", "mc_estimate", "mc_exact",
                            "mc_stderr", "mc_samples", "verdict"});
    for (const KernelRow& k : rows)
        out += join({std::to_string(k.n), format_number(k.newton_max_rel_err), format_number(k.homogeneity_max_rel_err),
                     format_number(k.symmetry_max_rel_err), format_number(k.sup_I), format_number(k.sup_I_refined),
                     format_number(k.sup_J), format_number(k.sup_J_refined), k.sup_stable ? "true" : "false",
                     format_number(k.mc_estimate), format_number(k.mc_exact), format_number(k.mc_stderr),
                     std::to_string(k.mc_samples), k.pass ? "pass" : "fail"});
    return out;
}

std::string kernel_values_csv(const std::vector<KernelValueRow>& rows) {
    std::string out = join({"n", "r", "s", "K1", "K2", "K_newton", "Lambda", "I"});
    for (const KernelValueRow& k : rows)
        out += join({std::to_string(k.n), format_number(k.r), format_number(k.s), format_number(k.K1),
                     format_number(k.K2), format_number(k.K_newton), format_number(k.Lambda), format_number(k.I)});
    return out;
}

std::string kernel_json(const std::vector<KernelRow>& rows, const std::vector<KernelValueRow>& values) {
    json arr = json::array();
    for (const KernelRow& k : rows)
        arr.push_back({{"n", k.n},
                       {"newton_max_rel_err", k.newton_max_rel_err},
                       {"homogeneity_max_rel_err", k.homogeneity_max_rel_err},
                       {"symmetry_max_rel_err", k.symmetry_max_rel_err},
                       {"sup_I", k.sup_I},
                       {"sup_I_refined", k.sup_I_refined},
                       {"sup_J", k.sup_J},
                       {"sup_J_refined", k.sup_J_refined},
                       {"sup_stable", k.sup_stable},
                       {"mc_estimate", k.mc_estimate},
                       {"mc_exact", k.mc_exact},
                       {"mc_stderr", k.mc_stderr},
                       {"mc_samples", k.mc_samples},
                       {"verdict", k.pass ? "pass" : "fail"}});
    json vals = json::array();
    for (const KernelValueRow& k : values)
        vals.push_back({{"n", k.n},
                        {"r", k.r},
                        {"s", k.s},
                        {"K1", k.K1},
                        {"K2", k.K2},
                        {"K_newton", k.K_newton},
                        {"Lambda", k.Lambda},
                        {"I", k.I}});
    return json{{"subcommand", "kernel"}, {"rows", arr}, {"values", vals}}.dump(2) + "\n";
}

std::string green_csv(const std::vector<GreenCheck>& rows, double tol) {
    std::string out = join({"n", "numeric", "exact", "rel_err", "numeric_alt", "rel_err_alt", "method", "verdict"});
    for (const GreenCheck& g : rows)
        out += join({std::to_string(g.n), format_number(g.numeric), format_number(g.exact), format_number(g.rel_err),
                     format_number(g.numeric_alt), format_number(g.rel_err_alt), g.method,
                     g.rel_err <= tol && g.rel_err_alt <= tol ? "pass" : "fail"});
    return out;
}

std::string green_json(const std::vector<GreenCheck>& rows, double tol) {
    json arr = json::array();
    for (const GreenCheck& g : rows)
        arr.push_back({{"n", g.n},
                       {"numeric", g.numeric},
                       {"exact", g.exact},
                       {"rel_err", g.rel_err},
                       {"numeric_alt", g.numeric_alt},
                       {"rel_err_alt", g.rel_err_alt},
                       {"method", g.method},
                       {"verdict", g.rel_err <= tol && g.rel_err_alt <= tol ? "pass" : "fail"}});
    return json{{"subcommand", "green-check"}, {"tolerance", tol}, {"rows", arr}}.dump(2) + "\n";
}

std::string deficit_csv(const std::vector<DeficitRow>& rows) {
    std::string out = join({"n", "family", "param", "r", "ratio", "intermediate", "dw_dt", "volume", "area"});
    for (const DeficitRow& d : rows)
        out += join({std::to_string(d.n), csv_field(d.family), format_number(d.param), format_number(d.r),
                     format_number(d.ratio), format_number(d.intermediate), format_number(d.dw_dt),
                     format_number(d.volume), format_number(d.area)});
    return out;
}

std::string deficit_json(const std::vector<DeficitRow>& rows) {
    json arr = json::array();
    for (const DeficitRow& d : rows)
        arr.push_back({{"n", d.n},
                       {"family", d.family},
                       {"param", d.param},
                       {"r", d.r},
                       {"ratio", d.ratio},
                       {"intermediate", d.intermediate},
                       {"dw_dt", d.dw_dt},
                       {"volume", d.volume},
                       {"area", d.area}});
    return json{{"subcommand", "deficit-table"}, {"rows", arr}}.dump(2) + "\n";
}

}  // namespace qdeficit
