#pragma once

// Executes a RunConfig: computes, writes the report files and derives the
// exit code.

#include <cstdint>
#include <string>
#include <vector>

#include "qdeficit/config.hpp"
#include "qdeficit/report_io.hpp"

namespace qdeficit {

enum class LogLevel { quiet = 0, error, warn, info, debug };
// From QDEFICIT_LOG (quiet, error, warn, info, debug); warn when unset.
LogLevel log_level_from_env();
void log_message(LogLevel level, const std::string& text);

// Kernel checks for one dimension; the Monte-Carlo estimate uses seed + n.
KernelRow kernel_checks(int n, int decades, int points_per_decade, int mc_samples, std::uint64_t seed);

// K_1, K_2, K_(n-2), Lambda and I on a log-spaced (r, s) grid.
std::vector<KernelValueRow> kernel_values(int n);

std::vector<DeficitRow> deficit_table(const MetricSpec& spec, const std::vector<double>& radii);

struct RunOutcome {
    // 0: no counted failure; 1: at least one fail verdict that counts.
    int exit_code = 0;
    int passed = 0, failed = 0, inconclusive = 0, expected_violations = 0;
    std::vector<std::string> files;
    std::string summary;
};

// Theorem reports for verify and sweep, main items first, then controls.
std::vector<TheoremReport> theorem_reports(const RunConfig& cfg);

// Exit code of a list of theorem reports. With allow_expected_violations,
// fails of controls and of metrics whose hypotheses fail are not counted.
int exit_code_for(const std::vector<TheoremReport>& reports, bool allow_expected_violations);

RunOutcome execute(const RunConfig& cfg);

}  // namespace qdeficit
