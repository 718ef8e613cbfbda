// qdeficit command-line driver. Talks to the library only through the C API.

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "qdeficit.h"

namespace {

constexpr int exit_usage = 2;

int report_failure(qd_status s) {
    std::cerr << "qdeficit: " << qd_status_name(s) << ": " << qd_last_error() << "\n";
    return exit_usage;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical checks for conformal metrics on R^n"};
    app.set_version_flag("--version", qd_version());

    std::string config_path, out_dir, format;
    std::uint64_t seed = 0;
    int jobs = 0;
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--format", format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));
    auto* seed_opt = app.add_option("--seed", seed, "seed for Monte-Carlo oracles");
    app.add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1, 256));

    const char* names[][2] = {{"verify", "check the theorem for one metric per dimension"},
                              {"sweep", "check the theorem over a parameter list"},
                              {"kernel", "kernel identities, sup scan and Monte-Carlo oracle"},
                              {"green-check", "fundamental-solution constant per dimension"},
                              {"deficit-table", "isoperimetric ratio series for plotting"}};
    for (const auto& n : names) app.add_subcommand(n[0], n[1])->fallthrough();
    app.require_subcommand(0, 1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    }

    std::string config_text;
    if (!config_path.empty()) {
        std::ifstream f(config_path, std::ios::binary);
        if (!f) {
            std::cerr << "qdeficit: io: cannot read " << config_path << "\n";
            return exit_usage;
        }
        std::ostringstream ss;
        ss << f.rdbuf();
        config_text = ss.str();
    }

    qd_run_overrides ov{};
    std::string sub;
    if (!app.get_subcommands().empty()) sub = app.get_subcommands().front()->get_name();
    ov.subcommand = sub.empty() ? nullptr : sub.c_str();
    ov.out_dir = out_dir.empty() ? nullptr : out_dir.c_str();
    ov.format = format.empty() ? nullptr : format.c_str();
    ov.has_seed = seed_opt->count() > 0;
    ov.seed = seed;
    ov.jobs = jobs;

    qd_run* run = nullptr;
    if (qd_status s = qd_run_create(config_text.c_str(), &ov, &run); s != QD_OK) return report_failure(s);
    int exit_code = 0;
    const qd_status s = qd_run_execute(run, &exit_code);
    if (s != QD_OK) {
        qd_run_destroy(run);
        return report_failure(s);
    }
    for (size_t i = 0; i < qd_run_file_count(run); ++i) std::cout << qd_run_file(run, i) << "\n";
    std::cerr << qd_run_summary(run) << "\n";
    qd_run_destroy(run);
    return exit_code;
}
