#pragma once

// (-Laplacian)^(n/2) of radial profiles, the order-1 Riesz potential, the
// logarithmic potential and the fundamental-solution constant check.

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "qdeficit/grids.hpp"
#include "qdeficit/profile.hpp"

namespace qdeficit {

enum class FracLapMethod { even_iterated, odd_riesz, odd_hankel };
const char* method_name(FracLapMethod m);

// A radial source given pointwise, used where a grid representation would
// lose accuracy (exact jets, sources singular at the origin).
struct RadialSource {
    std::function<double(double)> f;
    TailModel tail = TailModel::rapid();
    std::vector<double> breaks;  // radii where f is not smooth
};

struct RieszDetail {
    double trusted_radius = std::numeric_limits<double>::infinity();
    double decay_exponent = 0.0;  // exponent of the power-law continuation
    double max_relative_error = 0.0;  // quadrature estimate over trusted nodes
    long evaluations = 0;
};

// Relative error estimate above which a Riesz node is treated as lost to
// cancellation; such nodes are replaced by a power-law continuation.
constexpr double riesz_trust_tol = 1e-6;

// I_1 f = c_n * integral of |x - y|^(1-n) f(y) dy,
// c_n = Gamma((n-1)/2) / (2 pi^((n+1)/2)). f needs a rapid or power tail r^-q, q > 1.
GridFunction riesz_potential_order1(const GridFunction& f, int n, RieszDetail* detail = nullptr);
GridFunction riesz_potential_order1(std::shared_ptr<const Grid> grid, const RadialSource& f, int n,
                                    RieszDetail* detail = nullptr);

// (-Laplacian)^(1/2) f = (-Laplacian) I_1 f.
GridFunction half_laplacian(const GridFunction& f, int n);

struct HankelDetail {
    double k_max = 0.0;
    double spectral_tail = 0.0;  // |k Phi(k_max)| relative to its maximum
    int k_nodes = 0;
};

// (-Laplacian)^(1/2) f in R^3 through the radial Fourier (sine) transform.
GridFunction hankel_half_laplacian(const GridFunction& f, int n = 3, HankelDetail* detail = nullptr);
GridFunction hankel_half_laplacian(std::shared_ptr<const Grid> grid, const RadialSource& f, int n = 3,
                                   HankelDetail* detail = nullptr);

// Relative gap of two fields in the r^(n-1)-weighted L1 norm, integrated with
// the grid weights over [0, min(R_max, r_max)].
double weighted_l1_gap(const GridFunction& a, const GridFunction& b, int n,
                       double r_max = std::numeric_limits<double>::infinity());

struct FracLapOptions {
    double cross_tol = 1e-3;
    // Run the secondary backend: Hankel for n = 3, spectral iterated
    // Laplacians for even n.
    bool cross_check = true;
};

struct FracLapResult {
    GridFunction field;  // (-Laplacian)^(n/2) u at the nodes
    FracLapMethod method = FracLapMethod::even_iterated;
    TailModel tail_model = TailModel::rapid();
    double condition_estimate = 0.0;
    bool accuracy_warning = false;
    double trusted_radius = std::numeric_limits<double>::infinity();
    // Weighted L1 gap to the secondary backend; NaN when it was not run.
    double cross_gap = std::numeric_limits<double>::quiet_NaN();
    std::string cross_method;
    int dimension = 0;
};

FracLapResult fractional_power_laplacian(const RadialProfile& u, int n, std::shared_ptr<const Grid> grid,
                                         const FracLapOptions& opt = {});
FracLapResult fractional_power_laplacian(const RadialProfile& u, int n, const GridSpec& spec = {},
                                         const FracLapOptions& opt = {});

struct PotentialResult {
    GridFunction v;
    LimitEstimate slope_at_zero;      // r v'(r) as r -> 0
    LimitEstimate slope_at_infinity;  // r v'(r) as r -> inf
    double constant_c = std::numeric_limits<double>::quiet_NaN();  // best fit of u - v
    double fit_residual = std::numeric_limits<double>::quiet_NaN(); // max |u - v - c|
};

// v(x) = C_n^-1 * integral of log(|y| / |x - y|) Q(y) dy.
double log_potential_at(const FracLapResult& q, int n, double r);
// r v'(r) = -(n w_n / (2 C_n)) * integral of [1 + (r^2 - s^2) K_2(r, s)] Q(s) s^(n-1) ds.
double log_potential_slope(const FracLapResult& q, int n, double r);
// With u given, constant_c and fit_residual are filled in.
PotentialResult log_potential(const FracLapResult& q, int n, const RadialProfile* u = nullptr);

struct GreenCheck {
    int n = 0;
    double numeric = 0.0;  // total integral for the first cap
    double exact = 0.0;
    double rel_err = 0.0;
    double numeric_alt = 0.0;  // same with the second cap
    double rel_err_alt = 0.0;
    std::string method;
};

// Total integral of (-Laplacian)^(n/2) of two smooth caps of -log r,
// compared with C_n.
GreenCheck green_constant_check(int n, const GridSpec& spec = {});

}  // namespace qdeficit
