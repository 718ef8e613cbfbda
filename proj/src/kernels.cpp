#include "qdeficit/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "qdeficit/constants.hpp"
#include "qdeficit/error.hpp"
#include "qdeficit/quadrature.hpp"

namespace qdeficit {

namespace {

constexpr double singular_margin = 1e-6;
constexpr double head_angle = 1e-3;

double ipow(double x, int k) {
    double v = 1.0;
    for (int i = 0; i < k; ++i) v *= x;
    return v;
}

void check_arguments(int n, double r, double s) {
    require(n >= 2, ErrorCode::invalid_argument, "sphere averages need n >= 2");
    require(std::isfinite(r) && std::isfinite(s) && r >= 0.0 && s >= 0.0, ErrorCode::domain,
            "radii must be finite and nonnegative");
    require(r > 0.0 || s > 0.0, ErrorCode::domain, "radii must not both vanish");
}

// Breakpoints 0, h, 2h, 4h, ... accumulating at phi = 0 where the integrand
// varies on the scale h.
std::vector<double> polar_breaks(double start, double h) {
    std::vector<double> b{start};
    double x = std::max(h, start);
    if (x <= start) x = 2.0 * start;
    while (x < M_PI) {
        if (x > b.back()) b.push_back(x);
        x *= 2.0;
    }
    b.push_back(M_PI);
    return b;
}

// Mean over the polar angle of [eps^2 + 4 q sin^2(phi/2)]^(-p/2) with
// q = 1 - eps in (0, 1]; eps is passed separately to keep it accurate.
double reduced_power(int n, double p, double eps, double& cond) {
    const double q = 1.0 - eps;
    const double a = eps * eps;
    auto g = [&](double phi) {
        const double sh = std::sin(0.5 * phi);
        const double d2 = a + 4.0 * q * sh * sh;
        return std::pow(d2, -0.5 * p) * ipow(std::sin(phi), n - 2);
    };
    QuadOptions opt;
    opt.rel_tol = 1e-13;
    opt.max_intervals = 6000;
    double head = 0.0;
    std::vector<double> breaks;
    if (eps == 0.0) {
        // phi^(beta-1) h(phi) with h = 1 + c2 phi^2 + ...; the head is integrated analytically.
        const double beta = n - 1 - p;
        const double c2 = p / 24.0 - (n - 2) / 6.0;
        head = std::pow(head_angle, beta) / beta + c2 * std::pow(head_angle, beta + 2.0) / (beta + 2.0);
        breaks = polar_breaks(head_angle, 2.0 * head_angle);
        cond = std::max(1.0, 1.0 / beta);
    } else {
        const double delta = eps / std::sqrt(q);
        breaks = polar_breaks(0.0, 0.25 * delta);
        cond = 1.0;
    }
    const QuadResult res = integrate_gk(g, breaks, opt);
    return (head + res.value) / polar_weight_total(n);
}

double reduced_log(int n, double eps) {
    const double q = 1.0 - eps;
    const double a = eps * eps;
    auto g = [&](double phi) {
        const double sh = std::sin(0.5 * phi);
        const double d2 = a + 4.0 * q * sh * sh;
        return 0.5 * std::log(d2) * ipow(std::sin(phi), n - 2);
    };
    QuadOptions opt;
    opt.abs_tol = 1e-15;
    opt.rel_tol = 1e-13;
    opt.l1_rel_tol = 1e-13;  // the reduced mean vanishes identically for n = 2
    opt.max_intervals = 6000;
    std::vector<double> breaks;
    if (eps == 0.0) {
        breaks = polar_breaks(0.0, 1e-14);
    } else {
        const double delta = eps / std::sqrt(q);
        breaks = polar_breaks(0.0, 0.25 * delta);
    }
    return integrate_gk(g, breaks, opt).value / polar_weight_total(n);
}

constexpr int table_degree = 24;
constexpr double table_panels[] = {0.0,  0.125, 0.25, 0.5,  1.0,  1.5,  2.0,  3.0,  4.0,  5.0,  6.0,
                                   8.0,  10.0,  12.0, 16.0, 20.0, 24.0, 28.0, 32.0, 37.5};

// Chebyshev extreme points on [-1, 1], descending.
double cheb_node(int j) { return std::cos(M_PI * j / table_degree); }

}  // namespace

KernelTable::KernelTable(Kind kind, int n, double p) : kind_(kind), n_(n), p_(p) {
    require(n >= 2, ErrorCode::invalid_argument, "kernel tables need n >= 2");
    singular_ = kind == Kind::power && !(p < n - 1 - singular_margin);
    auto direct = [&](double eps) {
        double cond = 1.0;
        return kind_ == Kind::log ? reduced_log(n_, eps) : reduced_power(n_, p_, eps, cond);
    };
    panels_.assign(std::begin(table_panels), std::end(table_panels));
    values_.resize(panels_.size() - 1);
    for (size_t k = 0; k + 1 < panels_.size(); ++k) {
        const double a = panels_[k], b = panels_[k + 1];
        values_[k].resize(table_degree + 1);
        for (int j = 0; j <= table_degree; ++j) {
            // eps = 1 - q = e^-tau; tau = 0 is q = 0 where the sphere sees a constant.
            const double tau = 0.5 * (a + b) + 0.5 * (b - a) * cheb_node(j);
            values_[k][j] = tau == 0.0 ? (kind_ == Kind::log ? 0.0 : 1.0) : direct(std::exp(-tau));
        }
    }
    if (singular_) {
        const double t1 = panels_.back(), t0 = t1 - 1.0;
        tail_slope_ = direct(std::exp(-t1)) - direct(std::exp(-t0));
    } else {
        at_coincidence_ = direct(0.0);
    }
}

double KernelTable::reduced(double eps) const {
    require(eps >= 0.0 && eps <= 1.0, ErrorCode::domain, "reduced kernel needs eps in [0, 1]");
    if (eps == 0.0) {
        if (singular_)
            fail(ErrorCode::singular_average, "mean of |z - y|^-" + std::to_string(p_) +
                                                  " over a sphere through y diverges for p >= " + std::to_string(n_ - 1));
        return at_coincidence_;
    }
    const double tau = -std::log(eps);
    if (tau >= panels_.back()) {
        if (singular_) return values_.back().front() + tail_slope_ * (tau - panels_.back());
        return values_.back().front();
    }
    const size_t k = std::upper_bound(panels_.begin(), panels_.end(), tau) - panels_.begin() - 1;
    const double a = panels_[k], b = panels_[k + 1];
    const double x = (2.0 * tau - a - b) / (b - a);
    const std::vector<double>& v = values_[k];
    double num = 0.0, den = 0.0;
    for (int j = 0; j <= table_degree; ++j) {
        const double d = x - cheb_node(j);
        if (d == 0.0) return v[j];
        const double w = ((j % 2) ? -1.0 : 1.0) * ((j == 0 || j == table_degree) ? 0.5 : 1.0) / d;
        num += w * v[j];
        den += w;
    }
    return num / den;
}

double KernelTable::operator()(double r, double s) const {
    check_arguments(n_, r, s);
    const double M = std::max(r, s);
    const double eps = (M - std::min(r, s)) / M;
    if (kind_ == Kind::log) return std::log(M) + reduced(eps);
    if (p_ == 0.0) return 1.0;
    return std::pow(M, -p_) * reduced(eps);
}

namespace {

std::mutex table_mutex;
std::map<std::pair<int, double>, std::shared_ptr<const KernelTable>> power_tables;
std::map<int, std::shared_ptr<const KernelTable>> log_tables;

}  // namespace

std::shared_ptr<const KernelTable> KernelTable::power(int n, double p) {
    require(std::isfinite(p) && p >= 0.0, ErrorCode::invalid_argument, "kernel exponent must be finite and >= 0");
    std::lock_guard<std::mutex> lock(table_mutex);
    auto& slot = power_tables[{n, p}];
    if (!slot) slot = std::make_shared<KernelTable>(Kind::power, n, p);
    return slot;
}

std::shared_ptr<const KernelTable> KernelTable::log(int n) {
    std::lock_guard<std::mutex> lock(table_mutex);
    auto& slot = log_tables[n];
    if (!slot) slot = std::make_shared<KernelTable>(Kind::log, n, 0.0);
    return slot;
}

KernelValue sphere_average_power_detail(int n, double p, double r, double s) {
    check_arguments(n, r, s);
    require(std::isfinite(p), ErrorCode::invalid_argument, "exponent must be finite");
    const double M = std::max(r, s);
    const double q = std::min(r, s) / M;
    KernelValue out;
    if (q == 0.0 || p == 0.0) {
        out.value = std::pow(M, -p);
        return out;
    }
    if (q == 1.0 && !(p < n - 1 - singular_margin))
        fail(ErrorCode::singular_average, "mean of |z - y|^-" + std::to_string(p) + " over a sphere through y diverges for p >= " +
                                              std::to_string(n - 1));
    const double k = reduced_power(n, p, (M - std::min(r, s)) / M, out.conditioning);
    out.value = std::pow(M, -p) * k;
    return out;
}

double sphere_average_power(int n, double p, double r, double s) {
    return sphere_average_power_detail(n, p, r, s).value;
}

double sphere_average_log(int n, double r, double s) {
    check_arguments(n, r, s);
    const double M = std::max(r, s);
    const double q = std::min(r, s) / M;
    if (q == 0.0) return std::log(M);
    return std::log(M) + reduced_log(n, (M - std::min(r, s)) / M);
}

double kernel_I_signed(int n, double r, double s) {
    check_arguments(n, r, s);
    if (r == s) return 0.0;
    const double M = std::max(r, s);
    const double q = std::min(r, s) / M;
    if (q == 0.0) return r > s ? 1.0 : -1.0;
    double cond = 1.0;
    const double k = reduced_power(n, 2.0, (M - std::min(r, s)) / M, cond);
    const double mag = (1.0 - q) * (1.0 + q) * k;
    return r > s ? mag : -mag;
}

double kernel_I(int n, double r, double s) { return std::abs(kernel_I_signed(n, r, s)); }

SupScan kernel_sup_scan(int n, int decades, int points_per_decade) {
    require(n >= 3, ErrorCode::invalid_argument, "kernel scan needs n >= 3");
    require(decades >= 1 && decades <= 24, ErrorCode::invalid_argument, "decades must lie in [1, 24]");
    require(points_per_decade >= 1 && points_per_decade <= 256, ErrorCode::invalid_argument,
            "points_per_decade must lie in [1, 256]");
    const int m = decades * points_per_decade + 1;
    std::vector<double> radii(m);
    for (int i = 0; i < m; ++i)
        radii[i] = std::pow(10.0, -0.5 * decades + static_cast<double>(i) / points_per_decade);
    SupScan out;
    out.points = m * m;
    for (double r : radii) {
        for (double s : radii) {
            const double I = kernel_I(n, r, s);
            if (I > out.sup_I) {
                out.sup_I = I;
                out.argmax_I_r = r;
                out.argmax_I_s = s;
            }
            const double J = n == 3 ? (r + s) * sphere_average_power(n, 1.0, r, s)
                                    : (r * r + s * s) * sphere_average_power(n, 2.0, r, s);
            if (J > out.sup_J) {
                out.sup_J = J;
                out.argmax_J_r = r;
                out.argmax_J_s = s;
            }
        }
    }
    return out;
}

}  // namespace qdeficit
