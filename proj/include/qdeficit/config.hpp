#pragma once

// Declarative run configuration: a JSON object with a fixed set of keys.
// Unknown keys are rejected with the closest known key as a suggestion.

#include <cstdint>
#include <string>
#include <vector>

#include "qdeficit/verify.hpp"

namespace qdeficit {

enum class Subcommand { verify, sweep, kernel, green_check, deficit_table };
const char* subcommand_name(Subcommand s);
// Throws a configuration error for names outside the five subcommands.
Subcommand parse_subcommand(const std::string& name);

enum class OutputFormat { csv, json, both };
const char* format_name(OutputFormat f);
OutputFormat parse_format(const std::string& name);

struct RunConfig {
    Subcommand subcommand = Subcommand::verify;
    bool subcommand_given = false;

    // verify: one metric per dimension; sweep: family x params x dimensions.
    std::string family = "alpha";
    double param = 0.0;
    std::vector<double> params;
    std::vector<int> dimensions{3};
    std::vector<Bump> bumps;

    // Negative controls, run after the main items and reported as such.
    std::vector<MetricSpec> controls;
    // Expected violations (hypotheses fail) count towards the exit code only
    // when this is false.
    bool allow_expected_violations = true;

    GridSpec grid;
    double tol_bound_rel = 1e-3;
    double tol_deficit = 1e-2;
    bool cross_check = true;

    // kernel subcommand
    int kernel_decades = 6;
    int kernel_points_per_decade = 4;
    int mc_samples = 1000000;

    // deficit-table subcommand: radii r0 * ratio^k, k < table_count
    double table_r0 = 10.0;
    double table_ratio = 2.0;
    int table_count = 6;

    std::string out_dir = ".";
    OutputFormat format = OutputFormat::csv;
    std::uint64_t seed = 1;
    int jobs = 1;
};

// Keys accepted at the top level of a config object.
const std::vector<std::string>& config_keys();

// Levenshtein distance, used for key suggestions.
int edit_distance(const std::string& a, const std::string& b);

// Parses and validates; errors are ErrorCode::configuration with the key
// path (like $.dimensions[1]) and the expected type or range.
RunConfig parse_config(const std::string& text);

// Range checks shared by parse_config and command-line overrides.
void validate(const RunConfig& cfg);

VerifyOptions verify_options(const RunConfig& cfg);

}  // namespace qdeficit
