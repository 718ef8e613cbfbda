#pragma once

// Truncated Taylor series arithmetic. A Jet of order K holds the coefficients
// c_k = f^(k)(x0)/k! for k = 0..K of a function expanded around a point x0.

#include <array>
#include <cmath>

#include "qdeficit/error.hpp"

namespace qdeficit {

class Jet {
public:
    static constexpr int max_order = 16;

    Jet() = default;
    Jet(double value, int order) : order_(checked(order)) { c_[0] = value; }

    // The identity x0 + h.
    static Jet variable(double x0, int order) {
        Jet j(x0, order);
        if (order >= 1) j.c_[1] = 1.0;
        return j;
    }

    int order() const { return order_; }
    double operator[](int k) const { return c_[k]; }
    double& operator[](int k) { return c_[k]; }
    double value() const { return c_[0]; }

    // k-th derivative at the expansion point.
    double derivative(int k) const {
        double f = 1.0;
        for (int i = 2; i <= k; ++i) f *= i;
        return c_[k] * f;
    }

    Jet truncated(int order) const {
        Jet j(*this);
        j.order_ = std::min(order_, checked(order));
        for (int k = j.order_ + 1; k <= max_order; ++k) j.c_[k] = 0.0;
        return j;
    }

    Jet& operator+=(const Jet& o) {
        order_ = std::min(order_, o.order_);
        for (int k = 0; k <= order_; ++k) c_[k] += o.c_[k];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        order_ = std::min(order_, o.order_);
        for (int k = 0; k <= order_; ++k) c_[k] -= o.c_[k];
        return *this;
    }
    Jet& operator*=(double s) {
        for (int k = 0; k <= order_; ++k) c_[k] *= s;
        return *this;
    }
    Jet& operator+=(double s) {
        c_[0] += s;
        return *this;
    }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator+(Jet a, double s) { return a += s; }
    friend Jet operator+(double s, Jet a) { return a += s; }
    friend Jet operator-(Jet a, double s) { return a += -s; }
    friend Jet operator-(double s, const Jet& a) { return (-a) + s; }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator/(Jet a, double s) { return a *= 1.0 / s; }
    Jet operator-() const {
        Jet j(*this);
        return j *= -1.0;
    }

    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r(0.0, std::min(a.order_, b.order_));
        for (int k = 0; k <= r.order_; ++k) {
            double s = 0.0;
            for (int j = 0; j <= k; ++j) s += a.c_[j] * b.c_[k - j];
            r.c_[k] = s;
        }
        return r;
    }

    friend Jet operator/(const Jet& a, const Jet& b) {
        Jet q(0.0, std::min(a.order_, b.order_));
        const double b0 = b.c_[0];
        for (int k = 0; k <= q.order_; ++k) {
            double s = a.c_[k];
            for (int j = 1; j <= k; ++j) s -= b.c_[j] * q.c_[k - j];
            q.c_[k] = s / b0;
        }
        return q;
    }

    friend Jet operator/(double s, const Jet& b) { return Jet(s, b.order_) / b; }

    friend Jet exp(const Jet& f) {
        Jet e(std::exp(f.c_[0]), f.order_);
        for (int k = 1; k <= f.order_; ++k) {
            double s = 0.0;
            for (int j = 1; j <= k; ++j) s += j * f.c_[j] * e.c_[k - j];
            e.c_[k] = s / k;
        }
        return e;
    }

    friend Jet log(const Jet& f) {
        Jet g(std::log(f.c_[0]), f.order_);
        const double f0 = f.c_[0];
        for (int k = 1; k <= f.order_; ++k) {
            double s = f.c_[k];
            for (int j = 1; j < k; ++j) s -= (static_cast<double>(j) / k) * g.c_[j] * f.c_[k - j];
            g.c_[k] = s / f0;
        }
        return g;
    }

    // f^a for f0 > 0.
    friend Jet pow(const Jet& f, double a) {
        Jet p(std::pow(f.c_[0], a), f.order_);
        const double f0 = f.c_[0];
        for (int k = 1; k <= f.order_; ++k) {
            double s = 0.0;
            for (int j = 1; j <= k; ++j) s += ((a + 1.0) * j - k) * f.c_[j] * p.c_[k - j];
            p.c_[k] = s / (k * f0);
        }
        return p;
    }

    // Shift: Taylor coefficients of f'(x0 + h).
    Jet differentiated() const {
        Jet d(0.0, order_ > 0 ? order_ - 1 : 0);
        for (int k = 0; k < order_; ++k) d.c_[k] = (k + 1) * c_[k + 1];
        return d;
    }

private:
    static int checked(int order) {
        require(order >= 0 && order <= max_order, ErrorCode::unsupported_order,
                "jet order out of range");
        return order;
    }

    std::array<double, max_order + 1> c_{};
    int order_ = 0;
};

// Apply L = 4 rho d^2/drho^2 + 2n d/drho to a jet in rho expanded at rho0.
// For a radial function F(|x|^2) on R^n this is the Laplacian expressed in rho.
inline Jet rho_laplacian(const Jet& a, double rho0, int n) {
    const int K = a.order();
    require(K >= 2, ErrorCode::unsupported_order, "rho_laplacian needs order >= 2");
    Jet g(0.0, K - 2);
    for (int k = 0; k <= K - 2; ++k)
        g[k] = (k + 1) * (4.0 * rho0 * (k + 2) * a[k + 2] + (4.0 * k + 2.0 * n) * a[k + 1]);
    return g;
}

}  // namespace qdeficit
