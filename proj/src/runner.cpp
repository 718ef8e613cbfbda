#include "qdeficit/runner.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <sstream>

#include "qdeficit/error.hpp"
#include "qdeficit/kernels.hpp"

namespace qdeficit {

LogLevel log_level_from_env() {
    const char* v = std::getenv("QDEFICIT_LOG");
    if (!v) return LogLevel::warn;
    const std::string s(v);
    if (s == "quiet") return LogLevel::quiet;
    if (s == "error") return LogLevel::error;
    if (s == "warn" || s.empty()) return LogLevel::warn;
    if (s == "info") return LogLevel::info;
    if (s == "debug") return LogLevel::debug;
    return LogLevel::warn;
}

void log_message(LogLevel level, const std::string& text) {
    static std::mutex mu;
    if (level == LogLevel::quiet || static_cast<int>(level) > static_cast<int>(log_level_from_env())) return;
    static const char* names[] = {"", "error", "warn", "info", "debug"};
    std::lock_guard<std::mutex> lock(mu);
    std::cerr << "qdeficit[" << names[static_cast<int>(level)] << "] " << text << "\n";
}

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

void write_file(const std::filesystem::path& p, const std::string& content, std::vector<std::string>& files) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorCode::io, "cannot open " + p.string() + " for writing");
    f << content;
    f.close();
    if (!f) fail(ErrorCode::io, "write to " + p.string() + " failed");
    files.push_back(p.string());
}

}  // namespace

KernelRow kernel_checks(int n, int decades, int points_per_decade, int mc_samples, std::uint64_t seed) {
    require(n >= 3, ErrorCode::invalid_argument, "kernel checks need n >= 3");
    KernelRow k;
    k.n = n;
    const double radii[] = {0.1, 0.5, 0.9, 1.0, 1.1, 2.0, 10.0};
    // Newton: the sphere mean of the fundamental solution is max(r, s)^(2-n).
    for (double r : radii)
        for (double s : radii)
            k.newton_max_rel_err = std::max(
                k.newton_max_rel_err, rel(sphere_average_power(n, n - 2.0, r, s), std::pow(std::max(r, s), 2.0 - n)));
    for (double p : {1.0, 2.0})
        for (double r : radii)
            for (double s : radii) {
                if (r == s && p >= n - 1) continue;
                const double base = sphere_average_power(n, p, r, s);
                k.symmetry_max_rel_err = std::max(k.symmetry_max_rel_err, rel(sphere_average_power(n, p, s, r), base));
                for (double lambda : {0.1, 3.0, 100.0})
                    k.homogeneity_max_rel_err =
                        std::max(k.homogeneity_max_rel_err,
                                 rel(sphere_average_power(n, p, lambda * r, lambda * s), std::pow(lambda, -p) * base));
            }
    const SupScan coarse = kernel_sup_scan(n, decades, points_per_decade);
    const SupScan fine = kernel_sup_scan(n, decades, 2 * points_per_decade);
    k.sup_I = coarse.sup_I;
    k.sup_I_refined = fine.sup_I;
    k.sup_J = coarse.sup_J;
    k.sup_J_refined = fine.sup_J;
    k.sup_stable = rel(coarse.sup_I, fine.sup_I) <= 0.05 && rel(coarse.sup_J, fine.sup_J) <= 0.05;
    // Monte-Carlo mean of |z - y|^-1 over |z| = 1 with |y| = 1/2.
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(n));
    std::normal_distribution<double> normal;
    double sum = 0.0, sum2 = 0.0;
    std::vector<double> z(n);
    for (int i = 0; i < mc_samples; ++i) {
        double nz = 0.0;
        for (double& v : z) {
            v = normal(rng);
            nz += v * v;
        }
        nz = std::sqrt(nz);
        double d2 = 0.0;
        for (int j = 0; j < n; ++j) {
            const double x = z[j] / nz - (j == 0 ? 0.5 : 0.0);
            d2 += x * x;
        }
        const double f = 1.0 / std::sqrt(d2);
        sum += f;
        sum2 += f * f;
    }
    k.mc_samples = mc_samples;
    k.mc_estimate = sum / mc_samples;
    k.mc_stderr = mc_samples > 1 ? std::sqrt(std::max(0.0, sum2 / mc_samples - k.mc_estimate * k.mc_estimate) /
                                             (mc_samples - 1))
                                 : std::numeric_limits<double>::infinity();
    k.mc_exact = sphere_average_power(n, 1.0, 1.0, 0.5);
    k.pass = k.newton_max_rel_err <= 1e-10 && k.homogeneity_max_rel_err <= 1e-10 && k.symmetry_max_rel_err <= 1e-10 &&
             k.sup_stable && std::abs(k.mc_estimate - k.mc_exact) <= 5.0 * k.mc_stderr;
    return k;
}

std::vector<KernelValueRow> kernel_values(int n) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double radii[] = {0.25, 0.5, 1.0, 2.0, 4.0};
    auto power = [&](double p, double r, double s) {
        return r == s && p >= n - 1 - 1e-6 ? nan : sphere_average_power(n, p, r, s);
    };
    std::vector<KernelValueRow> rows;
    for (double r : radii)
        for (double s : radii) {
            KernelValueRow k;
            k.n = n;
            k.r = r;
            k.s = s;
            k.K1 = power(1.0, r, s);
            k.K2 = power(2.0, r, s);
            k.K_newton = power(n - 2.0, r, s);
            k.Lambda = sphere_average_log(n, r, s);
            k.I = kernel_I(n, r, s);
            rows.push_back(k);
        }
    return rows;
}

std::vector<DeficitRow> deficit_table(const MetricSpec& spec, const std::vector<double>& radii) {
    const ConformalMetric g = make_metric(spec);
    std::vector<DeficitRow> rows;
    for (double r : radii) {
        DeficitRow d;
        d.n = spec.n;
        d.family = spec.family;
        d.param = spec.param;
        d.r = r;
        d.ratio = isoperimetric_ratio(g, r);
        d.volume = volume(g, r);
        d.area = area(g, r);
        d.dw_dt = 1.0 + r * g.radial_part().derivative(r, 1);
        d.intermediate = spec.n >= 3 ? intermediate_ratio(mixed_volumes(g, std::log(r)), spec.n)
                                     : std::numeric_limits<double>::quiet_NaN();
        rows.push_back(d);
    }
    return rows;
}

std::vector<TheoremReport> theorem_reports(const RunConfig& cfg) {
    std::vector<MetricSpec> items;
    if (cfg.subcommand == Subcommand::sweep) {
        SweepPlan plan;
        plan.family = cfg.family;
        plan.params = cfg.params;
        plan.dimensions = cfg.dimensions;
        items = expand(plan);
        for (auto& m : items) m.bumps = cfg.bumps;
    } else {
        for (int n : cfg.dimensions) {
            MetricSpec m;
            m.family = cfg.family;
            m.param = cfg.param;
            m.n = n;
            m.bumps = cfg.bumps;
            items.push_back(m);
        }
    }
    const size_t main_count = items.size();
    for (const auto& c : cfg.controls) items.push_back(c);
    std::vector<TheoremReport> reports = run_all(items, verify_options(cfg), cfg.jobs);
    for (size_t i = main_count; i < reports.size(); ++i) reports[i].control = true;
    return reports;
}

int exit_code_for(const std::vector<TheoremReport>& reports, bool allow_expected_violations) {
    for (const auto& r : reports)
        if (r.verdict == Verdict::fail && !((r.expected_violation || r.control) && allow_expected_violations)) return 1;
    return 0;
}

RunOutcome execute(const RunConfig& cfg) {
    validate(cfg);
    RunOutcome out;
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) fail(ErrorCode::io, "cannot create output directory " + cfg.out_dir + ": " + ec.message());
    const std::string stem = subcommand_name(cfg.subcommand);
    const fs::path base = fs::path(cfg.out_dir) / stem;
    const bool csv = cfg.format != OutputFormat::json;
    const bool js = cfg.format != OutputFormat::csv;
    std::ostringstream summary;
    log_message(LogLevel::info, std::string("running ") + stem);

    switch (cfg.subcommand) {
        case Subcommand::verify:
        case Subcommand::sweep: {
            const std::vector<TheoremReport> reports = theorem_reports(cfg);
            for (const auto& r : reports) {
                switch (r.verdict) {
                    case Verdict::pass: ++out.passed; break;
                    case Verdict::fail: ++out.failed; break;
                    case Verdict::inconclusive: ++out.inconclusive; break;
                }
                if (r.expected_violation) ++out.expected_violations;
                log_message(LogLevel::info, r.descriptor + ": " + verdict_name(r.verdict));
                for (const auto& d : r.diagnostics) log_message(LogLevel::debug, r.descriptor + ": " + d);
            }
            if (csv) write_file(base.string() + ".csv", reports_csv(reports), out.files);
            if (js) write_file(base.string() + ".json", reports_json(reports, stem), out.files);
            out.exit_code = exit_code_for(reports, cfg.allow_expected_violations);
            summary << reports.size() << " reports: " << out.passed << " pass, " << out.failed << " fail ("
                    << out.expected_violations << " expected violations), " << out.inconclusive << " inconclusive";
            break;
        }
        case Subcommand::kernel: {
            std::vector<KernelRow> rows;
            std::vector<KernelValueRow> values;
            for (int n : cfg.dimensions) {
                if (n < 3) {
                    log_message(LogLevel::warn, "kernel checks skip n = " + std::to_string(n));
                    continue;
                }
                rows.push_back(kernel_checks(n, cfg.kernel_decades, cfg.kernel_points_per_decade, cfg.mc_samples,
                                             cfg.seed));
                for (const auto& v : kernel_values(n)) values.push_back(v);
            }
            require(!rows.empty(), ErrorCode::configuration, "kernel needs a dimension >= 3");
            for (const auto& k : rows) (k.pass ? out.passed : out.failed)++;
            if (csv) {
                write_file(base.string() + ".csv", kernel_csv(rows), out.files);
                write_file((fs::path(cfg.out_dir) / "kernel-values.csv").string(), kernel_values_csv(values), out.files);
            }
            if (js) write_file(base.string() + ".json", kernel_json(rows, values), out.files);
            out.exit_code = out.failed ? 1 : 0;
            summary << rows.size() << " kernel rows: " << out.passed << " pass, " << out.failed << " fail";
            break;
        }
        case Subcommand::green_check: {
            std::vector<GreenCheck> rows;
            for (int n : cfg.dimensions) rows.push_back(green_constant_check(n, cfg.grid));
            for (const auto& g : rows)
                (g.rel_err <= cfg.tol_bound_rel && g.rel_err_alt <= cfg.tol_bound_rel ? out.passed : out.failed)++;
            if (csv) write_file(base.string() + ".csv", green_csv(rows, cfg.tol_bound_rel), out.files);
            if (js) write_file(base.string() + ".json", green_json(rows, cfg.tol_bound_rel), out.files);
            out.exit_code = out.failed ? 1 : 0;
            summary << rows.size() << " dimensions: " << out.passed << " pass, " << out.failed << " fail";
            break;
        }
        case Subcommand::deficit_table: {
            std::vector<double> radii;
            for (int k = 0; k < cfg.table_count; ++k) radii.push_back(cfg.table_r0 * std::pow(cfg.table_ratio, k));
            std::vector<DeficitRow> rows;
            const std::vector<double> params = cfg.params.empty() ? std::vector<double>{cfg.param} : cfg.params;
            for (int n : cfg.dimensions)
                for (double p : params) {
                    MetricSpec m;
                    m.family = cfg.family;
                    m.param = p;
                    m.n = n;
                    m.bumps = cfg.bumps;
                    for (const auto& row : deficit_table(m, radii)) rows.push_back(row);
                }
            if (csv) write_file(base.string() + ".csv", deficit_csv(rows), out.files);
            if (js) write_file(base.string() + ".json", deficit_json(rows), out.files);
            summary << rows.size() << " table rows";
            break;
        }
    }
    out.summary = summary.str();
    log_message(LogLevel::info, out.summary);
    return out;
}

}  // namespace qdeficit
