#pragma once

// Spectral collocation on the half line. Radii are r = L t / (1 - t) with t on
// Chebyshev-Radau points of [0, 1); node 0 sits at r = 0.

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace qdeficit {

struct GridSpec {
    int node_count = 256;
    double map_scale = 1.0;     // L
    double tail_cutoff = 1e6;   // R_max
    double rel_tol = 1e-8;
    int max_derivative_order = 6;
    // A power-law tail beyond R_max may contribute at most this fraction of a
    // radial integral before it is treated as divergent.
    double tail_fraction_tol = 1e-3;
};

void validate(const GridSpec& spec);

enum class Parity { even, odd, none };

// Declared decay of a function beyond the cutoff.
struct TailModel {
    enum class Kind { undeclared, rapid, power };
    Kind kind = Kind::rapid;
    double exponent = std::numeric_limits<double>::infinity();  // f ~ A r^-exponent

    static TailModel rapid() { return {Kind::rapid, std::numeric_limits<double>::infinity()}; }
    static TailModel power(double q) { return {Kind::power, q}; }
    static TailModel undeclared() { return {Kind::undeclared, 0.0}; }
};

class Grid {
public:
    static std::shared_ptr<const Grid> build(const GridSpec& spec);

    const GridSpec& spec() const { return spec_; }
    int size() const { return static_cast<int>(t_.size()); }
    const std::vector<double>& t() const { return t_; }
    const std::vector<double>& r() const { return r_; }
    double t_max() const { return t_max_; }

    double r_of_t(double t) const { return spec_.map_scale * t / (1.0 - t); }
    double t_of_r(double r) const { return r / (spec_.map_scale + r); }

    // d/dt on nodal values (row-major N x N).
    const std::vector<double>& diff_matrix() const { return d_; }
    // Weights for the integral over [0, t_max] of the polynomial interpolant.
    const std::vector<double>& quad_weights() const { return w_quad_; }

    std::vector<double> apply_dt(const std::vector<double>& values) const;
    double interpolate(const std::vector<double>& values, double t) const;

    explicit Grid(const GridSpec& spec);

private:
    GridSpec spec_;
    std::vector<double> t_, r_, bary_, d_, w_quad_;
    double t_max_ = 0.0;
};

// Nodal values of a radial function on a grid.
//  * growth p: f grows like r^p; polynomials in r of degree <= p are then exact.
//  * log_coeff b: f = smooth + b * ell(r) with ell(r) = 0.5 log(1 + (r/L)^2).
struct GridFunction {
    std::shared_ptr<const Grid> grid;
    std::vector<double> values;
    Parity parity = Parity::even;
    int growth = 0;
    double log_coeff = 0.0;
    TailModel tail = TailModel::rapid();

    int size() const { return static_cast<int>(values.size()); }
    const std::vector<double>& r() const { return grid->r(); }
    double evaluate(double r) const;
};

// Repeated point evaluation of a GridFunction (barycentric in t, declared tail
// beyond the cutoff).
class FunctionInterpolant {
public:
    explicit FunctionInterpolant(const GridFunction& f);
    double operator()(double r) const;

private:
    std::shared_ptr<const Grid> grid_;
    std::vector<double> smooth_;
    double decay_ = 0.0;  // values are stored times (1 - t)^-decay_ for power tails
    int growth_;
    double log_coeff_;
    TailModel tail_;
    double f_cutoff_ = 0.0;
};

GridFunction sample(std::shared_ptr<const Grid> grid, const std::function<double(double)>& f,
                    Parity parity = Parity::even, TailModel tail = TailModel::rapid(), int growth = 0,
                    double log_coeff = 0.0);

GridFunction differentiate(const GridFunction& f, int k);

// f'' + (n - 1) f' / r, with n f''(0) at the origin.
GridFunction radial_laplacian(const GridFunction& f, int n);

struct IteratedLaplacian {
    GridFunction field;        // (-Laplacian)^m f
    double condition_estimate; // roundoff amplification, about eps N^(2m)
    bool accuracy_warning;
};

IteratedLaplacian iterated_laplacian(const GridFunction& f, int n, int m);

struct RadialIntegral {
    double value = 0.0;  // includes the analytic tail
    double tail = 0.0;
    double tail_fraction = 0.0;
};

// Integral of f(r) r^(n-1) over [0, inf).
RadialIntegral integrate_radial_detail(const GridFunction& f, int n);
double integrate_radial(const GridFunction& f, int n);

struct LimitEstimate {
    double value = std::numeric_limits<double>::quiet_NaN();
    double error_bar = std::numeric_limits<double>::infinity();
    bool converged = false;
    std::vector<double> radii;
    std::vector<double> samples;
    std::string diagnostic;
};

// Limit of a sequence sampled at geometric radii (r_{k+1} / r_k constant),
// accelerated with the Wynn epsilon algorithm, which removes error terms of
// the form c_i q_i^k for arbitrary ratios q_i.
LimitEstimate extrapolate_limit(const std::vector<double>& radii, const std::vector<double>& samples,
                                double rel_tol = 1e-8);

std::vector<double> geometric_radii(double r0, double ratio, int count);

}  // namespace qdeficit
