#pragma once

// Conformal metrics g = e^(2u) g_0 on R^n: curvature totals, completeness,
// volumes, mixed volumes in cylindrical coordinates and the isoperimetric
// deficit.

#include <memory>
#include <string>
#include <vector>

#include "qdeficit/fraclap.hpp"
#include "qdeficit/grids.hpp"
#include "qdeficit/profile.hpp"
#include "qdeficit/symmetrize.hpp"

namespace qdeficit {

class ConformalMetric {
public:
    ConformalMetric(RadialProfile u, int n);
    explicit ConformalMetric(NonRadialField f);

    int dimension() const { return n_; }
    bool radial() const { return field_ == nullptr; }
    // The radial factor; for a non-radial field this is its base profile.
    const RadialProfile& profile() const { return u_; }
    // Null for radial metrics.
    const NonRadialField* field() const { return field_.get(); }
    // u for radial metrics, u-bar otherwise.
    const RadialProfile& radial_part() const { return radial_part_; }
    std::string describe() const;

private:
    RadialProfile u_;
    RadialProfile radial_part_;
    std::shared_ptr<const NonRadialField> field_;
    int n_;
};

// S = -2(n-1) e^(-2u) (Laplacian u + (n-2)/2 |grad u|^2), radial metrics.
double scalar_curvature(const ConformalMetric& g, double r);
double scalar_curvature_at(const ConformalMetric& g, const std::vector<double>& x);

enum class Completeness { complete, incomplete, inconclusive };
const char* completeness_name(Completeness c);

struct CompletenessReport {
    Completeness status = Completeness::inconclusive;
    double alpha = 0.0;
    double ray_length = 0.0;  // integral of e^u along a ray up to ray_radius
    double ray_radius = 0.0;
    std::string rule;
};

// From the declared tail: alpha < 1 complete, alpha > 1 incomplete; at alpha = 1
// e^u ~ e^c / r, whose integral diverges, provided the tail declares a
// vanishing correction (correction order >= 1).
CompletenessReport completeness_check(const ConformalMetric& g);

struct ScalarTailReport {
    bool nonnegative = false;
    double sampled_min = 0.0;  // min S over the outer region
    double r_min = 0.0, r_max = 0.0;
    double leading_coefficient = 0.0;  // (n-2) alpha (1 - alpha/2), the sign of S r^2 e^(2u) at infinity
    std::string wording;
};

constexpr double scalar_tail_r0 = 1e2;
constexpr double scalar_tail_tol = 1e-8;

// Sampled on geometric radii in [scalar_tail_r0, R_max]: nonnegative when
// the minimum is >= -scalar_tail_tol and the leading tail term is >= 0.
ScalarTailReport scalar_tail_check(const ConformalMetric& g, const GridSpec& spec = {});

struct HypothesisFlags {
    bool complete = false;
    bool scal_nonneg_at_infinity = false;
    bool q_abs_convergent = false;
};

struct CurvatureReport {
    double total_q = 0.0;
    double abs_total_q = 0.0;
    double bound_Cn = 0.0;
    double bound_residual = 0.0;  // C_n - total_q
    HypothesisFlags hypothesis_flags;
    std::string method;
    double cross_gap = 0.0;  // NaN when no secondary backend ran
    std::vector<std::string> diagnostics;
};

// Total Q-curvature through the fractional Laplacian. The completeness and
// scalar-curvature flags are filled by verify; here only q_abs_convergent.
CurvatureReport total_q(const ConformalMetric& g, const GridSpec& spec = {}, const FracLapOptions& opt = {});

// v_g(B_r) and s_g(dB_r).
double volume(const ConformalMetric& g, double r);
double area(const ConformalMetric& g, double r);

struct MixedVolumes {
    double t = 0.0;
    double V_n = 0.0, V_n1 = 0.0, V_n2 = 0.0, V_n3 = 0.0;  // closed w-forms
    double w = 0.0, dw_dt = 0.0;
    double H1 = 0.0, H2 = 0.0;
    double V_n2_from_H = 0.0, V_n3_from_H = 0.0;  // through H_1, H_2 and tr L^2
    double route_gap = 0.0;  // max relative gap between the two routes
};

// Radial part of the metric at t = log r; n >= 3.
MixedVolumes mixed_volumes(const ConformalMetric& g, double t);

// V_(n-3)^((n-2)/(n-1)) / (w_n^(1/(n-1)) V_(n-2)^((n-3)/(n-1))), which equals dw/dt.
double intermediate_ratio(const MixedVolumes& mv, int n);

// V_(n-1)^(n/(n-1)) / (w_n^(1/(n-1)) V_n) at radius r.
double isoperimetric_ratio(const ConformalMetric& g, double r);

enum class DeficitBranch {
    positive_slope,         // lim dw/dt > 0; L'Hopital applies
    zero_slope_unbounded,   // lim dw/dt = 0, volume and area unbounded
    zero_slope_bounded_area,
    bounded_volume,
    negative_slope,         // lim dw/dt < 0, outside the theorem's scope
    unclassified
};
const char* branch_name(DeficitBranch b);

struct DeficitReport {
    double lhs = 0.0;  // 1 - total_q / C_n
    LimitEstimate rhs;
    LimitEstimate intermediate;
    double residual = 0.0;               // |lhs - rhs|
    double intermediate_residual = 0.0;  // |lhs - intermediate|
    DeficitBranch branch = DeficitBranch::unclassified;
    std::vector<std::string> diagnostics;
};

constexpr double deficit_limit_tol = 1e-3;

// Radii 10 * 2^k, k = 0..5.
std::vector<double> deficit_radii();

DeficitReport deficit(const ConformalMetric& g, double total_q);
DeficitReport deficit(const ConformalMetric& g, const GridSpec& spec = {});

}  // namespace qdeficit
