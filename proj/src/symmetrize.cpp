#include "qdeficit/symmetrize.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <string>

#include "qdeficit/constants.hpp"
#include "qdeficit/error.hpp"
#include "qdeficit/fraclap.hpp"
#include "qdeficit/quadrature.hpp"

namespace qdeficit {

namespace {

double ipow(double x, int k) {
    double v = 1.0;
    for (int i = 0; i < k; ++i) v *= x;
    return v;
}

double norm(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

double bump_of_sigma(double sigma, double A) { return sigma < 1.0 ? A * std::exp(1.0 - 1.0 / (1.0 - sigma)) : 0.0; }

// d b / d sigma.
double bump_slope(double sigma, double A) {
    if (!(sigma < 1.0)) return 0.0;
    const double om = 1.0 - sigma;
    return -A * std::exp(1.0 - 1.0 / om) / (om * om);
}

Jet bump_jet(const Jet& sigma, double A) {
    if (!(sigma.value() < 1.0)) return Jet(0.0, sigma.order());
    return A * exp(1.0 - 1.0 / (1.0 - sigma));
}

// Laplacian^m of the bump at squared distance rho0 from its centre.
double bump_laplacian_power(double rho0, int n, int m, double w, double A) {
    if (!(rho0 < w * w)) return 0.0;
    Jet a = bump_jet(Jet::variable(rho0, 2 * m) / (w * w), A);
    for (int i = 0; i < m; ++i) a = rho_laplacian(a, rho0, n);
    return a.value();
}

// Part of the sphere |x| = r inside a bump with |c| = c and radius w, as a
// polar cap gamma < gamma0 around the centre direction.
struct Window {
    bool empty = true;
    double gamma0 = 0.0;
};

Window bump_window(double r, double c, double w) {
    Window out;
    if (std::abs(r - c) >= w) return out;
    out.empty = false;
    if (r == 0.0 || c == 0.0 || r + c <= w) {
        out.gamma0 = M_PI;
        return out;
    }
    const double mu0 = (r * r + c * c - w * w) / (2.0 * r * c);
    out.gamma0 = mu0 <= -1.0 ? M_PI : std::acos(std::min(1.0, mu0));
    return out;
}

// sigma at polar angle gamma from the centre direction; written to keep
// relative accuracy when r is close to c.
double sigma_at(double r, double c, double w, double gamma) {
    const double sh = std::sin(0.5 * gamma);
    return ((r - c) * (r - c) + 4.0 * r * c * sh * sh) / (w * w);
}

// Mean over the sphere of g(gamma), g vanishing for gamma > gamma0.
double zonal_mean(int n, double gamma0, const std::function<double(double)>& g) {
    QuadOptions opt;
    opt.rel_tol = 1e-13;
    opt.l1_rel_tol = 1e-13;  // Laplacian powers of a bump change sign, so the mean can be tiny
    opt.max_intervals = 4000;
    auto h = [&](double gamma) { return g(gamma) * ipow(std::sin(gamma), n - 2); };
    std::vector<double> br{0.0};
    for (int k = 1; k < 8; ++k) br.push_back(gamma0 * k / 8.0);
    br.push_back(gamma0);
    return integrate_gk(h, br, opt).value / polar_weight_total(n);
}

struct BaseValues {
    double u, du, lap;
};

BaseValues base_at(const RadialProfile& base, int n, double r) {
    const Jet j = base.jet(r, 2);
    const double d2 = j.derivative(2);
    return {j.value(), j[1], r == 0.0 ? n * d2 : d2 + (n - 1) * j[1] / r};
}

void check_integrand(ShellIntegrand what, double param) {
    if (what == ShellIntegrand::exp_pu)
        require(std::isfinite(param) && param > 0.0, ErrorCode::invalid_argument, "exponent p must be > 0");
    if (what == ShellIntegrand::dr_power)
        require(param == std::floor(param) && param >= 1.0 && param <= 8.0, ErrorCode::invalid_argument,
                "moment order must be an integer in [1, 8]");
}

}  // namespace

NonRadialField::NonRadialField(RadialProfile base, std::vector<Bump> bumps, int n)
    : base_(std::move(base)), bumps_(std::move(bumps)), n_(n) {
    require(n == 3 || n == 4, ErrorCode::invalid_argument, "non-radial fields are supported for n in {3, 4}");
    for (const Bump& b : bumps_) {
        require(static_cast<int>(b.center.size()) == n, ErrorCode::invalid_argument,
                "bump centre must have n coordinates");
        require(std::isfinite(b.radius) && b.radius > 0.0, ErrorCode::invalid_argument, "bump radius must be > 0");
        require(std::isfinite(b.amplitude), ErrorCode::invalid_argument, "bump amplitude must be finite");
        for (double v : b.center) require(std::isfinite(v), ErrorCode::invalid_argument, "bump centre must be finite");
        center_norm_.push_back(norm(b.center));
        support_ = std::max(support_, center_norm_.back() + b.radius);
    }
    for (size_t i = 0; i < bumps_.size(); ++i)
        for (size_t j = i + 1; j < bumps_.size(); ++j) {
            std::vector<double> d(n);
            for (int k = 0; k < n; ++k) d[k] = bumps_[i].center[k] - bumps_[j].center[k];
            if (norm(d) < bumps_[i].radius + bumps_[j].radius) disjoint_ = false;
        }
}

double NonRadialField::value(const std::vector<double>& x) const {
    require(static_cast<int>(x.size()) == n_, ErrorCode::invalid_argument, "point must have n coordinates");
    double u = base_.value(norm(x));
    for (const Bump& b : bumps_) {
        double d2 = 0.0;
        for (int k = 0; k < n_; ++k) d2 += (x[k] - b.center[k]) * (x[k] - b.center[k]);
        u += bump_of_sigma(d2 / (b.radius * b.radius), b.amplitude);
    }
    return u;
}

std::vector<double> NonRadialField::gradient(const std::vector<double>& x) const {
    require(static_cast<int>(x.size()) == n_, ErrorCode::invalid_argument, "point must have n coordinates");
    const double r = norm(x);
    std::vector<double> g(n_, 0.0);
    if (r > 0.0) {
        const double du = base_.derivative(r, 1);
        for (int k = 0; k < n_; ++k) g[k] = du * x[k] / r;
    }
    for (const Bump& b : bumps_) {
        const double w2 = b.radius * b.radius;
        double d2 = 0.0;
        for (int k = 0; k < n_; ++k) d2 += (x[k] - b.center[k]) * (x[k] - b.center[k]);
        const double s = bump_slope(d2 / w2, b.amplitude) * 2.0 / w2;
        for (int k = 0; k < n_; ++k) g[k] += s * (x[k] - b.center[k]);
    }
    return g;
}

double NonRadialField::laplacian(const std::vector<double>& x) const {
    require(static_cast<int>(x.size()) == n_, ErrorCode::invalid_argument, "point must have n coordinates");
    double lap = base_at(base_, n_, norm(x)).lap;
    for (const Bump& b : bumps_) {
        double d2 = 0.0;
        for (int k = 0; k < n_; ++k) d2 += (x[k] - b.center[k]) * (x[k] - b.center[k]);
        lap += bump_laplacian_power(d2, n_, 1, b.radius, b.amplitude);
    }
    return lap;
}

double NonRadialField::radial_derivative(const std::vector<double>& x) const {
    const double r = norm(x);
    require(r > 0.0, ErrorCode::domain, "radial derivative needs x != 0");
    const std::vector<double> g = gradient(x);
    double s = 0.0;
    for (int k = 0; k < n_; ++k) s += g[k] * x[k] / r;
    return s;
}

namespace {

int max_rule_degree(int n) { return n == 3 ? 1024 : 256; }

void check_rule(int n, int degree) {
    require(n == 3 || n == 4, ErrorCode::invalid_argument, "sphere rules are provided for n in {3, 4}");
    require(degree >= 1 && degree <= max_rule_degree(n), ErrorCode::invalid_argument,
            "rule degree must lie in [1, " + std::to_string(max_rule_degree(n)) + "] for n = " + std::to_string(n));
}

// Visits the nodes of the product rule without storing them: Gauss-Legendre
// in cos(theta) times uniform azimuth on S^2, and for S^3 an extra
// Gauss-Chebyshev (second kind) factor in cos(chi).
template <class Visit>
void for_each_node(int n, int degree, Visit visit) {
    const int n_polar = degree / 2 + 1;
    const int n_azimuth = degree + 1;
    const GaussRule gl = gauss_legendre(n_polar);
    std::vector<double> cphi(n_azimuth), sphi(n_azimuth);
    for (int k = 0; k < n_azimuth; ++k) {
        cphi[k] = std::cos(2.0 * M_PI * k / n_azimuth);
        sphi[k] = std::sin(2.0 * M_PI * k / n_azimuth);
    }
    std::vector<double> x(n);
    auto s2 = [&](double lead, double scale, double wlead) {
        for (int i = 0; i < n_polar; ++i) {
            const double ct = gl.nodes[i], st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
            const double w = wlead * 0.5 * gl.weights[i] / n_azimuth;
            for (int k = 0; k < n_azimuth; ++k) {
                int d = 0;
                if (n == 4) x[d++] = lead;
                x[d++] = scale * st * cphi[k];
                x[d++] = scale * st * sphi[k];
                x[d] = scale * ct;
                visit(x, w);
            }
        }
    };
    if (n == 3) {
        s2(0.0, 1.0, 1.0);
        return;
    }
    const int n_chi = degree / 2 + 1;
    for (int j = 1; j <= n_chi; ++j) {
        const double a = M_PI * j / (n_chi + 1);
        const double sc = std::sin(a);
        s2(std::cos(a), sc, 2.0 / (n_chi + 1) * sc * sc);
    }
}

double product_mean(const NonRadialField& f, double r, ShellIntegrand what, double param, int degree) {
    const int n = f.dimension();
    std::vector<double> x(n);
    double s = 0.0;
    for_each_node(n, degree, [&](const std::vector<double>& p, double w) {
        for (int k = 0; k < n; ++k) x[k] = r * p[k];
        double v = 0.0;
        switch (what) {
            case ShellIntegrand::u: v = f.value(x); break;
            case ShellIntegrand::exp_pu: v = std::exp(param * f.value(x)); break;
            case ShellIntegrand::dr_power:
                v = ipow(r > 0.0 ? f.radial_derivative(x) : 0.0, static_cast<int>(param));
                break;
            case ShellIntegrand::laplacian: v = f.laplacian(x); break;
        }
        s += w * v;
    });
    return s;
}

int refined(int degree, int n) { return std::min(max_rule_degree(n), degree + std::max(2, degree / 2)); }

}  // namespace

SphereRule sphere_rule(int n, int degree) {
    check_rule(n, degree);
    SphereRule rule;
    rule.n = n;
    rule.degree = degree;
    for_each_node(n, degree, [&](const std::vector<double>& p, double w) {
        rule.points.push_back(p);
        rule.weights.push_back(w);
    });
    return rule;
}

double sphere_mean_product(const NonRadialField& f, double r, ShellIntegrand what, double param, int degree) {
    require(std::isfinite(r) && r >= 0.0, ErrorCode::domain, "sphere radius must be finite and >= 0");
    check_integrand(what, param);
    const int n = f.dimension();
    check_rule(n, degree);
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(b)); };
    const int finer = refined(degree, n);
    const double v = product_mean(f, r, what, param, degree);
    const double v2 = product_mean(f, r, what, param, finer);
    if (finer > degree && close(v, v2)) return v2;
    std::ostringstream msg;
    msg << "sphere rule of degree " << degree << " does not resolve the field at r = " << r << " (change "
        << std::abs(v - v2) << "); ";
    int suggest = finer;
    double prev = v2;
    bool found = false;
    while (suggest < max_rule_degree(n)) {
        const int next = refined(suggest, n);
        const double vn = product_mean(f, r, what, param, next);
        if (close(prev, vn)) {
            found = true;
            break;
        }
        prev = vn;
        suggest = next;
    }
    if (found)
        msg << "use degree >= " << suggest;
    else
        msg << "the largest supported degree " << max_rule_degree(n) << " is not enough";
    fail(ErrorCode::resolution, msg.str());
}

namespace {

// Zonal mean of a per-bump contribution h(b, db/dr, Laplacian b) at angle gamma.
template <class H>
double bump_sum(const NonRadialField& f, double r, H h) {
    double total = 0.0;
    for (const Bump& b : f.bumps()) {
        const double c = norm(b.center), w = b.radius;
        const Window win = bump_window(r, c, w);
        if (win.empty) continue;
        auto g = [&](double gamma) {
            const double sigma = sigma_at(r, c, w, gamma);
            if (!(sigma < 1.0)) return 0.0;
            const double val = bump_of_sigma(sigma, b.amplitude);
            const double dr = bump_slope(sigma, b.amplitude) * 2.0 * (r - c * std::cos(gamma)) / (w * w);
            return h(val, dr, sigma * w * w, b);
        };
        total += zonal_mean(f.dimension(), win.gamma0, g);
    }
    return total;
}

}  // namespace

double sphere_mean(const NonRadialField& f, double r, ShellIntegrand what, double param) {
    require(std::isfinite(r) && r >= 0.0, ErrorCode::domain, "sphere radius must be finite and >= 0");
    check_integrand(what, param);
    const int n = f.dimension();
    const BaseValues bv = base_at(f.base(), n, r);
    // Linear integrands split over bumps whether or not they overlap.
    if (what == ShellIntegrand::u)
        return bv.u + bump_sum(f, r, [](double b, double, double, const Bump&) { return b; });
    if (what == ShellIntegrand::laplacian)
        return bv.lap + bump_sum(f, r, [n](double, double, double rho, const Bump& b) {
                   return bump_laplacian_power(rho, n, 1, b.radius, b.amplitude);
               });
    if (!f.disjoint()) {
        int degree = 48;
        for (;;) {
            try {
                return sphere_mean_product(f, r, what, param, degree);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::resolution || 2 * degree > max_rule_degree(n)) throw;
                degree *= 2;
            }
        }
    }
    if (what == ShellIntegrand::exp_pu) {
        const double e = bump_sum(f, r, [param](double b, double, double, const Bump&) { return std::expm1(param * b); });
        return std::exp(param * bv.u) * (1.0 + e);
    }
    const int k = static_cast<int>(param);
    const double d0 = ipow(bv.du, k);
    return d0 + bump_sum(f, r, [&](double, double dr, double, const Bump&) { return ipow(bv.du + dr, k) - d0; });
}

double exp_average_ratio(const NonRadialField& f, double p, double r) {
    check_integrand(ShellIntegrand::exp_pu, p);
    require(std::isfinite(r) && r >= 0.0, ErrorCode::domain, "sphere radius must be finite and >= 0");
    if (!f.disjoint()) {
        const double ubar = sphere_mean(f, r, ShellIntegrand::u);
        return std::exp(-p * ubar) * sphere_mean(f, r, ShellIntegrand::exp_pu, p);
    }
    // Relative to the base value the ratio is e^(-p m) (1 + E) with m the mean
    // bump height and E the mean of expm1(p b); this avoids e^(p u) overflow.
    const double m = bump_sum(f, r, [](double b, double, double, const Bump&) { return b; });
    const double e = bump_sum(f, r, [p](double b, double, double, const Bump&) { return std::expm1(p * b); });
    return std::exp(-p * m) * (1.0 + e);
}

double derivative_moment(const NonRadialField& f, int k, double r) {
    require(r > 0.0 && std::isfinite(r), ErrorCode::domain, "moment radius must be positive");
    return sphere_mean(f, r, ShellIntegrand::dr_power, k);
}

namespace {

// Piecewise Chebyshev table of r -> mean over |x| = r of Laplacian^m of one
// bump, on its shell |c| - w <= r <= |c| + w.
class ShellTable {
public:
    ShellTable(const Bump& b, int n, int m) {
        const double c = norm(b.center);
        lo_ = std::max(0.0, c - b.radius);
        hi_ = c + b.radius;
        values_.resize(panels);
        for (int p = 0; p < panels; ++p) {
            values_[p].resize(degree + 1);
            for (int j = 0; j <= degree; ++j) {
                const double r = node(p, j);
                const Window win = bump_window(r, c, b.radius);
                if (win.empty) {
                    values_[p][j] = 0.0;
                    continue;
                }
                auto g = [&](double gamma) {
                    const double sigma = sigma_at(r, c, b.radius, gamma);
                    return bump_laplacian_power(sigma * b.radius * b.radius, n, m, b.radius, b.amplitude);
                };
                values_[p][j] = zonal_mean(n, win.gamma0, g);
            }
        }
    }

    double operator()(double r) const {
        if (r <= lo_ || r >= hi_) return r == lo_ && lo_ == 0.0 ? values_[0][degree] : 0.0;
        const double u = std::acos(std::clamp(1.0 - 2.0 * (r - lo_) / (hi_ - lo_), -1.0, 1.0)) / M_PI;
        int p = std::min(panels - 1, static_cast<int>(u * panels));
        while (p > 0 && r < edge(p)) --p;
        while (p < panels - 1 && r > edge(p + 1)) ++p;
        const double a = edge(p), b = edge(p + 1);
        const double x = 2.0 * (r - a) / (b - a) - 1.0;
        double num = 0.0, den = 0.0;
        for (int j = 0; j <= degree; ++j) {
            const double d = x - std::cos(M_PI * j / degree);
            if (d == 0.0) return values_[p][j];
            const double w = ((j % 2) ? -1.0 : 1.0) * ((j == 0 || j == degree) ? 0.5 : 1.0) / d;
            num += w * values_[p][j];
            den += w;
        }
        return num / den;
    }

private:
    static constexpr int panels = 32;
    static constexpr int degree = 24;
    // Panels cluster at both shell edges, where the bump profile is steepest.
    double edge(int p) const { return lo_ + 0.5 * (hi_ - lo_) * (1.0 - std::cos(M_PI * p / panels)); }
    double node(int p, int j) const {
        const double a = edge(p), b = edge(p + 1);
        return a + 0.5 * (b - a) * (1.0 + std::cos(M_PI * j / degree));
    }
    double lo_ = 0.0, hi_ = 0.0;
    std::vector<std::vector<double>> values_;
};

class SymmetrizedModel : public ProfileModel {
public:
    explicit SymmetrizedModel(NonRadialField f) : f_(std::move(f)) {}

    Jet radial_jet(double r, int order) const override {
        Jet j = f_.base().jet(r, order);
        for (const Bump& b : f_.bumps()) {
            const double c = norm(b.center), w = b.radius;
            const Window win = bump_window(r, c, w);
            if (win.empty) continue;
            auto ray_jet = [&](double gamma) {
                // sigma((r + h) along the ray at angle gamma) is quadratic in h.
                Jet s(sigma_at(r, c, w, gamma), order);
                if (order >= 1) s[1] = 2.0 * (r - c * std::cos(gamma)) / (w * w);
                if (order >= 2) s[2] = 1.0 / (w * w);
                return bump_jet(s, b.amplitude);
            };
            for (int k = 0; k <= order; ++k)
                j[k] += zonal_mean(f_.dimension(), win.gamma0, [&](double gamma) { return ray_jet(gamma)[k]; });
        }
        return j;
    }

    double laplacian_power(double r, int n, int m) const override {
        require(n == f_.dimension(), ErrorCode::invalid_argument, "symmetrized profile lives in its own dimension");
        double v = f_.base().laplacian_power(r, n, m);
        const auto& tables = tables_for(m);
        for (const auto& t : tables) v += t(r);
        return v;
    }

private:
    const std::vector<ShellTable>& tables_for(int m) const {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = tables_.find(m);
        if (it == tables_.end()) {
            std::vector<ShellTable> t;
            for (const Bump& b : f_.bumps()) t.emplace_back(b, f_.dimension(), m);
            it = tables_.emplace(m, std::move(t)).first;
        }
        return it->second;
    }

    NonRadialField f_;
    mutable std::mutex mu_;
    mutable std::map<int, std::vector<ShellTable>> tables_;
};

}  // namespace

RadialProfile symmetrized_profile(const NonRadialField& f) {
    if (f.bumps().empty()) return f.base();
    return RadialProfile(std::make_shared<SymmetrizedModel>(f), f.base().tail(), "symmetrized-" + f.base().family(),
                         f.base().parameter());
}

RadialProfile centered_bump(const Bump& b) {
    const double w = b.radius, A = b.amplitude;
    return rho_profile([w, A](const Jet& rho) { return bump_jet(rho / (w * w), A); }, {0.0, 0.0, 1000}, "bump", A);
}

double bump_total_q(const NonRadialField& f) {
    const int n = f.dimension();
    if (n % 2 == 1) return 0.0;
    const int m = n / 2;
    const double sign = m % 2 ? -1.0 : 1.0;
    QuadOptions q;
    q.rel_tol = 1e-12;
    q.l1_rel_tol = 1e-14;
    double total = 0.0;
    for (const Bump& b : f.bumps()) {
        auto g = [&](double t) { return sign * bump_laplacian_power(t * t, n, m, b.radius, b.amplitude) * ipow(t, n - 1); };
        std::vector<double> br;
        for (int k = 0; k <= 16; ++k) br.push_back(b.radius * k / 16.0);
        total += unit_sphere_area(n) * integrate_gk(g, br, q).value;
    }
    return total;
}

TotalQPair totalq_preserved(const NonRadialField& f, const GridSpec& spec) {
    const int n = f.dimension();
    // Bump shells are thin on the default grid; the symmetrized field needs
    // about 2048 nodes for a 1e-6 relative total on unit-width bumps.
    GridSpec fine = spec;
    if (!f.bumps().empty()) fine.node_count = std::max(spec.node_count, 2048);
    const auto grid = Grid::build(fine);
    FracLapOptions opt;
    opt.cross_check = false;
    auto total = [&](const RadialProfile& u) {
        return unit_sphere_area(n) * integrate_radial(fractional_power_laplacian(u, n, grid, opt).field, n);
    };
    TotalQPair out;
    out.bump_total = bump_total_q(f);
    const double base = total(f.base());
    out.total_u = base + out.bump_total;
    out.total_ubar = f.bumps().empty() ? base : total(symmetrized_profile(f));
    return out;
}

ShellCheck shell_scalar_check(const NonRadialField& f, double r, int degree) {
    require(r > 0.0 && std::isfinite(r), ErrorCode::domain, "shell radius must be positive");
    const int n = f.dimension();
    const SphereRule rule = sphere_rule(n, degree);
    ShellCheck out;
    out.pointwise_max = -std::numeric_limits<double>::infinity();
    std::vector<double> x(n);
    for (const auto& p : rule.points) {
        for (int k = 0; k < n; ++k) x[k] = r * p[k];
        const std::vector<double> g = f.gradient(x);
        double g2 = 0.0;
        for (double v : g) g2 += v * v;
        out.pointwise_max = std::max(out.pointwise_max, f.laplacian(x) + (0.5 * n - 1.0) * g2);
    }
    const RadialProfile ubar = symmetrized_profile(f);
    const Jet j = ubar.jet(r, 2);
    out.symmetrized = j.derivative(2) + (n - 1) * j[1] / r + (0.5 * n - 1.0) * j[1] * j[1];
    return out;
}

}  // namespace qdeficit
