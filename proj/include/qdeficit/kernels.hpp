#pragma once

// Averages over the sphere |z| = r of functions of |z - y| with |y| = s. All
// kernels depend on (r, s) only and are symmetric in their two radii.

#include <memory>
#include <vector>

namespace qdeficit {

struct KernelValue {
    double value = 0.0;
    double conditioning = 1.0;  // amplification of quadrature error near the singular exponent
};

// Mean over |z| = r of |z - y|^-p, |y| = s. Requires r, s >= 0 (not both 0);
// r = s needs p < n - 1 - 1e-6.
KernelValue sphere_average_power_detail(int n, double p, double r, double s);
double sphere_average_power(int n, double p, double r, double s);

// Mean over |z| = r of log |z - y|, |y| = s.
double sphere_average_log(int n, double r, double s);

// Mean of |r^2 - s^2| / |z - y|^2; zero at r = s.
double kernel_I(int n, double r, double s);

// (r^2 - s^2) times the mean of |z - y|^-2; the signed form of kernel_I.
double kernel_I_signed(int n, double r, double s);

struct SupScan {
    double sup_I = 0.0;
    double argmax_I_r = 0.0, argmax_I_s = 0.0;
    double sup_J = 0.0;  // (r^2 + s^2) K_2 for n >= 4, (r + s) K_1 for n = 3
    double argmax_J_r = 0.0, argmax_J_s = 0.0;
    int points = 0;
};

// Maxima over a log-spaced (r, s) grid covering 10^(-decades/2) .. 10^(decades/2).
SupScan kernel_sup_scan(int n, int decades, int points_per_decade = 8);

// Piecewise Chebyshev table of the reduced kernel in tau = -log(1 - q),
// q = min(r, s) / max(r, s). Tables are built once per (n, p) and shared;
// the tabulated values agree with direct quadrature to about 1e-12.
class KernelTable {
public:
    enum class Kind { power, log };

    static std::shared_ptr<const KernelTable> power(int n, double p);
    static std::shared_ptr<const KernelTable> log(int n);

    // K_p(r, s) for Kind::power, Lambda(r, s) for Kind::log.
    double operator()(double r, double s) const;
    // Reduced kernel at q = 1 - eps (eps in (0, 1]).
    double reduced(double eps) const;

    int dimension() const { return n_; }
    double exponent() const { return p_; }
    Kind kind() const { return kind_; }

    KernelTable(Kind kind, int n, double p);

private:
    Kind kind_;
    int n_;
    double p_;
    bool singular_;
    double at_coincidence_ = 0.0;  // value at q = 1 when finite
    double tail_slope_ = 0.0;      // d k / d tau past the last panel
    std::vector<double> panels_;
    std::vector<std::vector<double>> values_;
};

}  // namespace qdeficit
