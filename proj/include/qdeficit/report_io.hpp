#pragma once

// CSV and JSON serialization of run results. CSV numbers carry 12
// significant digits; JSON numbers use the shortest round-trip form.

#include <string>
#include <vector>

#include "qdeficit/fraclap.hpp"
#include "qdeficit/verify.hpp"

namespace qdeficit {

// 12 significant digits; nan, inf and -inf spelled out.
std::string format_number(double v);

// Column order of the theorem CSV; fixed.
const std::vector<std::string>& report_columns();
std::string reports_csv(const std::vector<TheoremReport>& reports);
std::string reports_json(const std::vector<TheoremReport>& reports, const std::string& subcommand);

struct KernelRow {
    int n = 0;
    double newton_max_rel_err = 0.0;  // sphere mean of |z - y|^(2-n) against max(r, s)^(2-n)
    double homogeneity_max_rel_err = 0.0;
    double symmetry_max_rel_err = 0.0;
    double sup_I = 0.0, sup_I_refined = 0.0;
    double sup_J = 0.0, sup_J_refined = 0.0;
    bool sup_stable = false;  // both sups agree to 5% under 2x refinement
    double mc_estimate = 0.0, mc_exact = 0.0, mc_stderr = 0.0;
    int mc_samples = 0;
    bool pass = false;
};
std::string kernel_csv(const std::vector<KernelRow>& rows);

// Tabulated kernels; entries that are singular at r = s are NaN.
struct KernelValueRow {
    int n = 0;
    double r = 0.0, s = 0.0;
    double K1 = 0.0, K2 = 0.0, K_newton = 0.0;  // K_p for p = 1, 2, n - 2
    double Lambda = 0.0;                         // sphere mean of log |z - y|
    double I = 0.0;
};
std::string kernel_values_csv(const std::vector<KernelValueRow>& rows);
std::string kernel_json(const std::vector<KernelRow>& rows, const std::vector<KernelValueRow>& values);

std::string green_csv(const std::vector<GreenCheck>& rows, double tol);
std::string green_json(const std::vector<GreenCheck>& rows, double tol);

struct DeficitRow {
    int n = 0;
    std::string family;
    double param = 0.0;
    double r = 0.0;
    double ratio = 0.0;         // isoperimetric ratio
    double intermediate = 0.0;  // NaN for n = 2
    double dw_dt = 0.0;
    double volume = 0.0;
    double area = 0.0;
};
std::string deficit_csv(const std::vector<DeficitRow>& rows);
std::string deficit_json(const std::vector<DeficitRow>& rows);

}  // namespace qdeficit
