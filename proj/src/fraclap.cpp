#include "qdeficit/fraclap.hpp"

#include <algorithm>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <cmath>
#include <sstream>

#include "qdeficit/constants.hpp"
#include "qdeficit/error.hpp"
#include "qdeficit/kernels.hpp"
#include "qdeficit/quadrature.hpp"

namespace qdeficit {

const char* method_name(FracLapMethod m) {
    switch (m) {
        case FracLapMethod::even_iterated: return "even-iterated";
        case FracLapMethod::odd_riesz: return "odd-riesz";
        case FracLapMethod::odd_hankel: return "odd-hankel";
    }
    return "unknown";
}

namespace {

constexpr double machine_eps = std::numeric_limits<double>::epsilon();

double riesz_constant(int n) { return std::tgamma(0.5 * (n - 1)) / (2.0 * std::pow(M_PI, 0.5 * (n + 1))); }

double ipow(double x, int k) {
    double v = 1.0;
    for (int i = 0; i < k; ++i) v *= x;
    return v;
}

void check_source_tail(const TailModel& tail, const char* what) {
    if (tail.kind == TailModel::Kind::undeclared)
        fail(ErrorCode::configuration, std::string(what) + " needs a declared source tail");
    if (tail.kind == TailModel::Kind::power && !(tail.exponent > 1.0)) {
        std::ostringstream msg;
        msg << what << " diverges for a source decaying like r^-" << tail.exponent << " (needs exponent > 1)";
        fail(ErrorCode::divergent_potential, msg.str());
    }
}

RadialSource source_of(const GridFunction& f, const char* what) {
    require(f.grid != nullptr, ErrorCode::invalid_argument, "grid function has no grid");
    require(f.parity == Parity::even, ErrorCode::parity, std::string(what) + " needs an even radial source");
    if (f.growth > 0 || f.log_coeff != 0.0)
        fail(ErrorCode::divergent_potential, std::string(what) + " diverges for a source that does not decay");
    auto interp = std::make_shared<FunctionInterpolant>(f);
    RadialSource src;
    src.tail = f.tail;
    // A rapid tail is zero once the nodal values reach roundoff; between such
    // nodes the interpolant only carries noise, which the r^(n-1) weight of
    // radial integrals would amplify.
    double support = std::numeric_limits<double>::infinity();
    if (f.tail.kind == TailModel::Kind::rapid) {
        double peak = 0.0;
        for (double v : f.values) peak = std::max(peak, std::abs(v));
        int last = -1;
        for (int j = 0; j < f.size(); ++j)
            if (std::abs(f.values[j]) > 16.0 * std::numeric_limits<double>::epsilon() * peak) last = j;
        if (last + 1 < f.size()) support = f.r()[last + 1];
        if (std::isfinite(support)) src.breaks.push_back(support);
    }
    src.f = [interp, support](double s) { return s >= support ? 0.0 : (*interp)(s); };
    return src;
}

// Breakpoints for radial integrals over [0, S] whose integrand has a kink or
// a logarithmic singularity at s = r.
std::vector<double> radial_breaks(double r, double S, double L, const std::vector<double>& extra) {
    std::vector<double> br{0.0};
    for (double x = 1e-3 * L; x < S; x *= 4.0) br.push_back(x);
    if (r > 0.0 && r < S) {
        const std::vector<double> g = graded_breaks(0.0, S, r, r * 1e-14, 50);
        br.insert(br.end(), g.begin(), g.end());
    }
    for (double x : extra)
        if (x > 0.0 && x < S) br.push_back(x);
    br.push_back(S);
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    return br;
}

struct NodeValue {
    double value = 0.0;
    double error = 0.0;
    long evaluations = 0;
};

NodeValue riesz_node(const KernelTable& K, int n, const RadialSource& src, double r, double extent, double L) {
    const double S = std::max(extent, 1e3 * r);
    auto g = [&](double s) {
        if (s == r || s == 0.0) return 0.0;
        const double f = src.f(s);
        if (f == 0.0) return 0.0;
        return K(r, s) * f * ipow(s, n - 1);
    };
    QuadOptions opt;
    opt.rel_tol = 1e-10;
    opt.l1_rel_tol = 1e-13;
    opt.max_intervals = 8000;
    const QuadResult res = integrate_gk(g, radial_breaks(r, S, L, src.breaks), opt);
    double tail = 0.0;
    if (src.tail.kind == TailModel::Kind::power) {
        // Beyond S the kernel is s^(1-n) up to (r/S)^2.
        tail = src.f(S) * S / (src.tail.exponent - 1.0);
    }
    const double c = riesz_constant(n) * unit_sphere_area(n);
    NodeValue out;
    out.value = c * (res.value + tail);
    out.error = c * (res.error + 4.0 * machine_eps * res.l1 + std::abs(tail) * (r / S) * (r / S));
    if (!res.converged) out.error = std::max(out.error, c * res.l1);
    out.evaluations = res.evaluations;
    return out;
}

double fitted_decay(double r0, double v0, double r1, double v1, double fallback) {
    if (v0 == 0.0 || v1 == 0.0 || (v0 > 0) != (v1 > 0)) return fallback;
    const double q = -std::log(v1 / v0) / std::log(r1 / r0);
    return std::isfinite(q) && q > 0.0 ? q : fallback;
}

}  // namespace

GridFunction riesz_potential_order1(std::shared_ptr<const Grid> grid, const RadialSource& src, int n,
                                    RieszDetail* detail) {
    require(grid != nullptr, ErrorCode::invalid_argument, "Riesz potential needs a grid");
    require(n >= 3 && n % 2 == 1, ErrorCode::invalid_argument, "Riesz potential of order 1 is used for odd n >= 3");
    require(static_cast<bool>(src.f), ErrorCode::invalid_argument, "Riesz potential needs a source function");
    check_source_tail(src.tail, "Riesz potential");
    const auto K = KernelTable::power(n, n - 1.0);
    const Grid& g = *grid;
    const int N = g.size();
    const double L = g.spec().map_scale;
    const double extent = g.spec().tail_cutoff;

    GridFunction out;
    out.grid = grid;
    out.values.assign(N, 0.0);
    out.parity = Parity::even;
    RieszDetail d;
    int last = N - 1;
    bool previous_bad = false;
    for (int j = 0; j < N; ++j) {
        const double r = g.r()[j];
        const NodeValue v = riesz_node(*K, n, src, r, extent, L);
        d.evaluations += v.evaluations;
        out.values[j] = v.value;
        const bool bad = !(v.error <= riesz_trust_tol * std::abs(v.value));
        // Two consecutive failures outside the core mark where cancellation
        // has eaten the result; an isolated failure is a sign change.
        if (bad && r > 2.0 * L && previous_bad) {
            last = j - 2;
            break;
        }
        if (!bad && v.value != 0.0) d.max_relative_error = std::max(d.max_relative_error, v.error / std::abs(v.value));
        previous_bad = bad && r > 2.0 * L;
    }
    require(last >= 1, ErrorCode::not_converged, "Riesz potential lost to cancellation at every node");
    const auto& r = g.r();
    d.decay_exponent = fitted_decay(r[last - 1], out.values[last - 1], r[last], out.values[last], n + 2.0);
    if (last < N - 1) {
        d.trusted_radius = r[last];
        for (int j = last + 1; j < N; ++j) out.values[j] = out.values[last] * std::pow(r[last] / r[j], d.decay_exponent);
    }
    out.tail = TailModel::power(d.decay_exponent);
    if (detail) *detail = d;
    return out;
}

GridFunction riesz_potential_order1(const GridFunction& f, int n, RieszDetail* detail) {
    return riesz_potential_order1(f.grid, source_of(f, "Riesz potential"), n, detail);
}

// Applied as I_1 (-Laplacian f): the same operator, but the grid Laplacian
// then acts on the smooth input rather than on the slowly decaying potential,
// whose r^-(n-1) leading term cancels under the Laplacian.
GridFunction half_laplacian(const GridFunction& f, int n) {
    GridFunction lap = radial_laplacian(f, n);
    for (double& v : lap.values) v = -v;
    return riesz_potential_order1(lap, n);
}

GridFunction hankel_half_laplacian(std::shared_ptr<const Grid> grid, const RadialSource& src, int n,
                                   HankelDetail* detail) {
    require(grid != nullptr, ErrorCode::invalid_argument, "Hankel transform needs a grid");
    require(n == 3, ErrorCode::invalid_argument, "the Hankel backend is implemented for n = 3 only");
    require(static_cast<bool>(src.f), ErrorCode::invalid_argument, "Hankel transform needs a source function");
    check_source_tail(src.tail, "Hankel transform");
    const Grid& g = *grid;
    const double L = g.spec().map_scale;

    // Phi(k) = integral of f(s) s sin(k s) over [0, inf); the 3-d transform is 4 pi Phi / k.
    // A fresh integrator per call keeps results independent of call history.
    boost::math::quadrature::ooura_fourier_sin<double> forward(1e-11, 5);
    auto fs = [&](double s) { return s == 0.0 ? 0.0 : src.f(s) * s; };
    auto phi = [&](double k) { return k == 0.0 ? 0.0 : forward.integrate(fs, k).first; };

    // Spectral extent: first doubling of k past the peak where |k Phi| drops
    // below 1e-12 of the peak. Beyond that the transform is at its roundoff
    // floor and the integrator stops converging.
    double peak = 0.0, k_max = 0.0, last_ratio = 1.0;
    for (double k = 1.0 / (64.0 * L); k <= 4096.0 / L; k *= 2.0) {
        const double a = std::abs(k * phi(k));
        peak = std::max(peak, a);
        k_max = k;
        last_ratio = peak > 0.0 ? a / peak : 0.0;
        if (peak > 0.0 && a < 1e-12 * peak) break;
    }
    HankelDetail hd;
    hd.k_max = k_max;
    hd.spectral_tail = last_ratio;
    if (peak > 0.0 && last_ratio > g.spec().rel_tol) {
        std::ostringstream msg;
        msg << "spectrum not resolved: |k Phi(k)| at k = " << k_max << " is " << last_ratio << " of its peak";
        fail(ErrorCode::resolution, msg.str());
    }

    GridFunction out;
    out.grid = grid;
    out.values.assign(g.size(), 0.0);
    out.parity = Parity::even;
    out.tail = TailModel::power(src.tail.kind == TailModel::Kind::power ? src.tail.exponent + 1.0 : n + 1.0);
    if (peak == 0.0) {
        if (detail) *detail = hd;
        return out;
    }

    // k Phi(k) on Chebyshev-Lobatto points of [0, k_max].
    const int M = 257;
    hd.k_nodes = M;
    std::vector<double> xk(M), hk(M), wk(M);
    for (int j = 0; j < M; ++j) {
        const double x = std::cos(M_PI * j / (M - 1));
        xk[j] = 0.5 * k_max * (1.0 - x);
        hk[j] = xk[j] * phi(xk[j]);
        wk[j] = ((j % 2) ? -1.0 : 1.0) * ((j == 0 || j == M - 1) ? 0.5 : 1.0);
    }
    auto h = [&](double k) {
        if (k <= 0.0 || k >= k_max) return 0.0;
        double num = 0.0, den = 0.0;
        for (int j = 0; j < M; ++j) {
            const double d = k - xk[j];
            if (d == 0.0) return hk[j];
            const double c = wk[j] / d;
            num += c * hk[j];
            den += c;
        }
        return num / den;
    };

    boost::math::quadrature::ooura_fourier_sin<double> inverse(1e-10, 8);
    QuadOptions opt;
    opt.rel_tol = 1e-11;
    opt.l1_rel_tol = 1e-13;
    opt.max_intervals = 4000;
    std::vector<double> kb;
    for (double k = 0.0; k < k_max; k += k_max / 64.0) kb.push_back(k);
    kb.push_back(k_max);
    for (int j = 0; j < g.size(); ++j) {
        const double r = g.r()[j];
        double I = 0.0;
        if (r == 0.0) {
            // g(0) = (2 / pi) * integral of k^2 Phi(k).
            I = integrate_gk([&](double k) { return k * h(k); }, kb, opt).value;
            out.values[j] = 2.0 / M_PI * I;
            continue;
        }
        if (r * k_max <= 400.0) {
            std::vector<double> br = kb;
            for (double k = M_PI / r; k < k_max; k += M_PI / r) br.push_back(k);
            std::sort(br.begin(), br.end());
            br.erase(std::unique(br.begin(), br.end()), br.end());
            I = integrate_gk([&](double k) { return h(k) * std::sin(k * r); }, br, opt).value;
        } else {
            I = inverse.integrate(h, r).first;
        }
        out.values[j] = 2.0 / (M_PI * r) * I;
    }
    if (detail) *detail = hd;
    return out;
}

GridFunction hankel_half_laplacian(const GridFunction& f, int n, HankelDetail* detail) {
    return hankel_half_laplacian(f.grid, source_of(f, "Hankel transform"), n, detail);
}

double weighted_l1_gap(const GridFunction& a, const GridFunction& b, int n, double r_max) {
    require(a.grid == b.grid, ErrorCode::invalid_argument, "fields live on different grids");
    const Grid& g = *a.grid;
    const double L = g.spec().map_scale;
    double num = 0.0, den = 0.0;
    for (int j = 0; j < g.size() && g.r()[j] <= r_max; ++j) {
        const double om = 1.0 - g.t()[j];
        const double w = g.quad_weights()[j] * ipow(g.r()[j], n - 1) * L / (om * om);
        num += std::abs(w) * std::abs(a.values[j] - b.values[j]);
        den += std::abs(w) * std::abs(a.values[j]);
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return num / den;
}

FracLapResult fractional_power_laplacian(const RadialProfile& u, int n, std::shared_ptr<const Grid> grid,
                                         const FracLapOptions& opt) {
    require(grid != nullptr, ErrorCode::invalid_argument, "fractional Laplacian needs a grid");
    require(n >= 2 && n <= 12, ErrorCode::invalid_argument, "dimension must lie in [2, 12]");
    const Grid& g = *grid;
    const int N = g.size();
    const int k = u.tail().correction_order;
    FracLapResult res;
    res.dimension = n;
    res.field.grid = grid;
    res.field.parity = Parity::even;
    res.field.values.assign(N, 0.0);
    // (-Laplacian)^(n/2) kills -alpha log r away from the origin, so an
    // O(r^-k) correction in u leaves an O(r^-(n+k)) field.
    const TailModel declared = k > 0 ? TailModel::power(n + k) : TailModel::undeclared();

    if (n % 2 == 0) {
        const int m = n / 2;
        const double sign = m % 2 ? -1.0 : 1.0;
        for (int j = 0; j < N; ++j) res.field.values[j] = sign * u.laplacian_power(g.r()[j], n, m);
        res.method = FracLapMethod::even_iterated;
        res.field.tail = declared;
        res.tail_model = declared;
        res.condition_estimate = machine_eps * std::pow(static_cast<double>(N), 2.0 * m);
        if (opt.cross_check && 2 * m <= g.spec().max_derivative_order) {
            // Spectral chain of Laplacians on the sampled profile.
            const double alpha = u.tail().alpha;
            GridFunction s = sample(grid, [&](double r) { return u.value(r); }, Parity::even,
                                    TailModel::undeclared(), 0, -alpha);
            const IteratedLaplacian it = iterated_laplacian(s, n, m);
            // Far out the spectral chain sits on a roundoff floor that the
            // r^(n-1) weight would amplify, so compare on the core region.
            res.cross_gap = weighted_l1_gap(res.field, it.field, n, 100.0 * g.spec().map_scale);
            res.cross_method = "spectral-iterated";
            res.accuracy_warning = it.accuracy_warning;
        }
        return res;
    }

    const int m = (n + 1) / 2;
    const double sign = m % 2 ? -1.0 : 1.0;
    RadialSource src;
    src.f = [&u, n, m, sign](double s) { return sign * u.laplacian_power(s, n, m); };
    src.tail = k > 0 ? TailModel::power(2.0 * m) : TailModel::undeclared();
    RieszDetail d;
    res.field = riesz_potential_order1(grid, src, n, &d);
    res.method = FracLapMethod::odd_riesz;
    res.trusted_radius = d.trusted_radius;
    res.condition_estimate = d.max_relative_error;
    res.accuracy_warning = d.trusted_radius < 10.0 * g.spec().map_scale;
    res.tail_model = res.field.tail;
    if (n == 3 && opt.cross_check) {
        RadialSource h;
        h.f = [&u](double s) { return -u.laplacian_power(s, 3, 1); };
        h.tail = k > 0 ? TailModel::power(2.0) : TailModel::undeclared();
        const GridFunction alt = hankel_half_laplacian(grid, h, 3);
        res.cross_gap = weighted_l1_gap(res.field, alt, n);
        res.cross_method = method_name(FracLapMethod::odd_hankel);
        if (!(res.cross_gap <= opt.cross_tol)) {
            std::ostringstream msg;
            msg << "Riesz and Hankel routes differ by " << res.cross_gap << " (weighted L1, tolerance "
                << opt.cross_tol << ")";
            fail(ErrorCode::backend_disagreement, msg.str());
        }
    }
    return res;
}

FracLapResult fractional_power_laplacian(const RadialProfile& u, int n, const GridSpec& spec,
                                         const FracLapOptions& opt) {
    return fractional_power_laplacian(u, n, Grid::build(spec), opt);
}

namespace {

struct PotentialContext {
    FunctionInterpolant q;
    std::shared_ptr<const KernelTable> lambda;
    std::shared_ptr<const KernelTable> k2;
    double extent;
    double L;
    double prefactor;  // n w_n / C_n
};

PotentialContext potential_context(const FracLapResult& q, int n) {
    require(q.field.grid != nullptr, ErrorCode::invalid_argument, "potential needs a computed field");
    require(q.dimension == 0 || q.dimension == n, ErrorCode::invalid_argument, "field was computed for another n");
    if (q.field.tail.kind == TailModel::Kind::undeclared ||
        (q.field.tail.kind == TailModel::Kind::power && !(q.field.tail.exponent > n)))
        fail(ErrorCode::divergent_potential, "field is not absolutely integrable; the log potential is undefined");
    const GridSpec& spec = q.field.grid->spec();
    return {FunctionInterpolant(q.field), KernelTable::log(n), KernelTable::power(n, 2.0), spec.tail_cutoff,
            spec.map_scale, unit_sphere_area(n) / total_q_bound(n)};
}

double potential_value(const PotentialContext& c, int n, double r) {
    if (r == 0.0) return 0.0;
    const double S = std::max(c.extent, 1e3 * r);
    auto g = [&](double s) {
        if (s == 0.0) return 0.0;
        const double M = std::max(r, s);
        const double bracket = (s < r ? std::log(s / r) : 0.0) - c.lambda->reduced((M - std::min(r, s)) / M);
        return bracket * c.q(s) * ipow(s, n - 1);
    };
    QuadOptions opt;
    opt.rel_tol = 1e-10;
    opt.l1_rel_tol = 1e-13;
    opt.max_intervals = 8000;
    return c.prefactor * integrate_gk(g, radial_breaks(r, S, c.L, {}), opt).value;
}

double potential_slope(const PotentialContext& c, int n, double r) {
    if (r == 0.0) return 0.0;
    const double S = std::max(c.extent, 1e3 * r);
    auto g = [&](double s) {
        if (s == 0.0 || s == r) return 0.0;
        const double M = std::max(r, s);
        const double eps = (M - std::min(r, s)) / M;
        // (r^2 - s^2) K_2 = +-(1 - q^2) k_2(q), 1 - q^2 = eps (2 - eps).
        const double I = eps * (2.0 - eps) * c.k2->reduced(eps);
        return (1.0 + (r > s ? I : -I)) * c.q(s) * ipow(s, n - 1);
    };
    QuadOptions opt;
    opt.rel_tol = 1e-10;
    opt.l1_rel_tol = 1e-13;
    opt.max_intervals = 8000;
    return -0.5 * c.prefactor * integrate_gk(g, radial_breaks(r, S, c.L, {}), opt).value;
}

}  // namespace

double log_potential_at(const FracLapResult& q, int n, double r) {
    require(std::isfinite(r) && r >= 0.0, ErrorCode::domain, "potential radius must be finite and >= 0");
    return potential_value(potential_context(q, n), n, r);
}

double log_potential_slope(const FracLapResult& q, int n, double r) {
    require(std::isfinite(r) && r >= 0.0, ErrorCode::domain, "potential radius must be finite and >= 0");
    return potential_slope(potential_context(q, n), n, r);
}

PotentialResult log_potential(const FracLapResult& q, int n, const RadialProfile* u) {
    const PotentialContext c = potential_context(q, n);
    const Grid& g = *q.field.grid;
    PotentialResult out;
    out.v.grid = q.field.grid;
    out.v.parity = Parity::even;
    out.v.values.resize(g.size());
    for (int j = 0; j < g.size(); ++j) out.v.values[j] = potential_value(c, n, g.r()[j]);
    // v ~ b log r at infinity; carry it as the log part of the grid function.
    const double L = g.spec().map_scale;
    const auto radii_inf = geometric_radii(10.0 * L, 2.0, 6);
    const auto radii_zero = geometric_radii(0.1 * L, 0.5, 6);
    std::vector<double> s_inf, s_zero;
    for (double r : radii_inf) s_inf.push_back(potential_slope(c, n, r));
    for (double r : radii_zero) s_zero.push_back(potential_slope(c, n, r));
    out.slope_at_infinity = extrapolate_limit(radii_inf, s_inf, 1e-6);
    out.slope_at_zero = extrapolate_limit(radii_zero, s_zero, 1e-6);
    if (std::isfinite(out.slope_at_infinity.value)) out.v.log_coeff = out.slope_at_infinity.value;
    out.v.tail = TailModel::undeclared();
    if (u) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (int j = 0; j < g.size(); ++j) {
            const double d = u->value(g.r()[j]) - out.v.values[j];
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
        out.constant_c = 0.5 * (lo + hi);
        out.fit_residual = 0.5 * (hi - lo);
    }
    return out;
}

GreenCheck green_constant_check(int n, const GridSpec& spec) {
    require(n >= 2 && n <= 8, ErrorCode::invalid_argument, "green check supports n in [2, 8]");
    const auto grid = Grid::build(spec);
    FracLapOptions opt;
    opt.cross_check = false;
    auto total = [&](const RadialProfile& u, std::string& method) {
        const FracLapResult r = fractional_power_laplacian(u, n, grid, opt);
        method = method_name(r.method);
        return unit_sphere_area(n) * integrate_radial(r.field, n);
    };
    GreenCheck out;
    out.n = n;
    out.exact = total_q_bound(n);
    out.numeric = total(capped_log(0), out.method);
    out.numeric_alt = total(capped_log(1), out.method);
    out.rel_err = std::abs(out.numeric - out.exact) / out.exact;
    out.rel_err_alt = std::abs(out.numeric_alt - out.exact) / out.exact;
    return out;
}

}  // namespace qdeficit
