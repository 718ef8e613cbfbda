#pragma once

// Non-radial conformal factors u = base(|x|) + sum of compactly supported
// bumps, and their averages over spheres centred at the origin.

#include <vector>

#include "qdeficit/grids.hpp"
#include "qdeficit/profile.hpp"

namespace qdeficit {

// A exp(1 - 1 / (1 - |x - c|^2 / w^2)) inside |x - c| < w, zero outside.
struct Bump {
    std::vector<double> center;
    double radius = 1.0;
    double amplitude = 0.0;
};

class NonRadialField {
public:
    NonRadialField(RadialProfile base, std::vector<Bump> bumps, int n);

    int dimension() const { return n_; }
    const RadialProfile& base() const { return base_; }
    const std::vector<Bump>& bumps() const { return bumps_; }
    // All bumps lie inside |x| < support_radius().
    double support_radius() const { return support_; }
    bool disjoint() const { return disjoint_; }

    double value(const std::vector<double>& x) const;
    std::vector<double> gradient(const std::vector<double>& x) const;
    double laplacian(const std::vector<double>& x) const;
    double radial_derivative(const std::vector<double>& x) const;

private:
    RadialProfile base_;
    std::vector<Bump> bumps_;
    std::vector<double> center_norm_;
    int n_;
    double support_ = 0.0;
    bool disjoint_ = true;
};

enum class ShellIntegrand {
    u,         // u
    exp_pu,    // e^(p u), p = param
    dr_power,  // (du/dr)^k, k = param
    laplacian  // Laplacian of u
};

// Product Gauss rule on the unit sphere S^(n-1), n in {3, 4}; integrates
// spherical polynomials up to `degree` exactly. Weights sum to 1.
struct SphereRule {
    int n = 0;
    int degree = 0;
    std::vector<std::vector<double>> points;
    std::vector<double> weights;
};
SphereRule sphere_rule(int n, int degree);

// Mean over |x| = r. Disjoint bumps use exact zonal reductions (each bump is
// symmetric about its centre direction); otherwise the product rule is used
// with an automatic resolution check.
double sphere_mean(const NonRadialField& f, double r, ShellIntegrand what, double param = 1.0);

// Mean with a product rule of the given degree. Throws a resolution error
// (with the smallest degree that passes) when raising the degree by half
// changes the result by more than 1e-10 relative.
double sphere_mean_product(const NonRadialField& f, double r, ShellIntegrand what, double param, int degree);

// u-bar(r) = mean of u over |x| = r, as a profile with exact derivatives
// (means of the Taylor coefficients of u along rays) and the base tail.
RadialProfile symmetrized_profile(const NonRadialField& f);

// e^(-p u-bar(r)) * mean of e^(p u) over |x| = r.
double exp_average_ratio(const NonRadialField& f, double p, double r);

// Mean of (du/dr)^k over |x| = r.
double derivative_moment(const NonRadialField& f, int k, double r);

// The bump as a radial profile about its own centre; integrals of
// translation-invariant operators applied to the bump can use it.
RadialProfile centered_bump(const Bump& b);

// Sum over bumps of the integral of (-Laplacian)^(n/2) b: the closed-form
// integral for even n, 0 for odd n (flux identity).
double bump_total_q(const NonRadialField& f);

struct TotalQPair {
    double total_u = 0.0;     // base total plus the bump totals
    double total_ubar = 0.0;  // total of the symmetrized profile
    double bump_total = 0.0;  // sum over bumps of the integral of (-Laplacian)^(n/2) b
};

// Total Q-curvature of u and of u-bar. For even n each bump's integral is
// computed from its closed form; for odd n a compactly supported bump has
// zero total by the flux identity and contributes 0.
TotalQPair totalq_preserved(const NonRadialField& f, const GridSpec& spec = {});

struct ShellCheck {
    // max over rule points of Laplacian u + (n/2 - 1)|grad u|^2; <= 0 means
    // nonnegative scalar curvature on the shell.
    double pointwise_max = 0.0;
    // The same combination for u-bar.
    double symmetrized = 0.0;
};
ShellCheck shell_scalar_check(const NonRadialField& f, double r, int degree = 48);

}  // namespace qdeficit
