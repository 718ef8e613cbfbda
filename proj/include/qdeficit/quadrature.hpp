#pragma once

// One-dimensional quadrature building blocks shared by the numerical modules.

#include <functional>
#include <limits>
#include <vector>

namespace qdeficit {

using Integrand = std::function<double(double)>;

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    double l1 = 0.0;  // integral of |f|
    int evaluations = 0;
    bool converged = true;
};

struct QuadOptions {
    double abs_tol = 0.0;
    double rel_tol = 1e-12;
    // Also accept an error below this fraction of the integral of |f|; needed
    // when the integral is much smaller than the integrand (cancellation).
    double l1_rel_tol = 0.0;
    int max_intervals = 2000;
};

// Globally adaptive Gauss-Kronrod (10/21) on a finite interval.
QuadResult integrate_gk(const Integrand& f, double a, double b, const QuadOptions& opt = {});

// Same, on a list of breakpoints; each sub-interval is handled adaptively and
// the tolerances are shared.
QuadResult integrate_gk(const Integrand& f, const std::vector<double>& breaks,
                        const QuadOptions& opt = {});

// Integral over [a, inf) through s = a + x/(1-x).
QuadResult integrate_gk_to_infinity(const Integrand& f, double a, const QuadOptions& opt = {});

// Geometric breakpoints accumulating at `point` from both sides inside [a, b].
// Used for integrands with an integrable singularity (or a near singularity of
// width `width`) at `point`.
std::vector<double> graded_breaks(double a, double b, double point, double width, int max_levels = 60);

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule on [-1, 1].
GaussRule gauss_legendre(int n);

}  // namespace qdeficit
