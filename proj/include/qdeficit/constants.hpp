#pragma once

#include <cmath>

namespace qdeficit {

// Volume of the unit ball in R^n.
inline double unit_ball_volume(int n) { return 2.0 * std::pow(M_PI, 0.5 * n) / (n * std::tgamma(0.5 * n)); }

// Area of the unit sphere S^(n-1).
inline double unit_sphere_area(int n) { return n * unit_ball_volume(n); }

// C_n = 2^(n-1) Gamma(n/2) pi^(n/2): total Q-curvature of the round sphere
// and the upper bound for complete metrics with nonnegative scalar curvature
// at infinity.
inline double total_q_bound(int n) { return std::pow(2.0, n - 1) * std::tgamma(0.5 * n) * std::pow(M_PI, 0.5 * n); }

// Integral of sin^(n-2) over [0, pi].
inline double polar_weight_total(int n) {
    return std::sqrt(M_PI) * std::tgamma(0.5 * (n - 1)) / std::tgamma(0.5 * n);
}

}  // namespace qdeficit
