#include "qdeficit/grids.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "qdeficit/error.hpp"
#include "qdeficit/jet.hpp"

namespace qdeficit {

void validate(const GridSpec& s) {
    require(s.node_count >= 16 && s.node_count <= 4096, ErrorCode::configuration,
            "node_count must lie in [16, 4096]");
    require(std::isfinite(s.map_scale) && s.map_scale > 0.0, ErrorCode::configuration, "map_scale must be positive");
    require(std::isfinite(s.tail_cutoff) && s.tail_cutoff > s.map_scale, ErrorCode::configuration,
            "tail_cutoff must exceed map_scale");
    require(s.rel_tol > 0.0 && s.rel_tol < 1.0, ErrorCode::configuration, "rel_tol must lie in (0, 1)");
    require(s.max_derivative_order >= 1 && s.max_derivative_order <= 12, ErrorCode::configuration,
            "max_derivative_order must lie in [1, 12]");
    require(s.tail_fraction_tol > 0.0 && s.tail_fraction_tol < 1.0, ErrorCode::configuration,
            "tail_fraction_tol must lie in (0, 1)");
}

Grid::Grid(const GridSpec& spec) : spec_(spec) {
    validate(spec);
    const int N = spec.node_count;
    t_.resize(N);
    r_.resize(N);
    for (int j = 0; j < N; ++j) {
        const double theta = 2.0 * M_PI * j / (2.0 * N - 1.0);
        // (1 - cos)/2 written as sin^2 keeps relative accuracy near t = 0.
        const double s = std::sin(0.5 * theta);
        t_[j] = s * s;
        r_[j] = r_of_t(t_[j]);
    }
    r_[0] = 0.0;
    t_max_ = t_of_r(spec.tail_cutoff);

    // The nodes are the zeros of the third-kind Chebyshev polynomial V_{N-1}
    // in x = 2t - 1 together with x = -1, which gives closed-form barycentric
    // weights. Node differences use sin^2 a - sin^2 b = sin(a + b) sin(a - b)
    // to keep full relative accuracy near both ends.
    std::vector<double> half(N);
    bary_.resize(N);
    for (int j = 0; j < N; ++j) {
        half[j] = M_PI * j / (2.0 * N - 1.0);
        bary_[j] = (j % 2 ? -1.0 : 1.0) * std::cos(half[j]) * (j == 0 ? 0.5 : 1.0);
    }
    auto diff = [&](int i, int j) { return std::sin(half[i] + half[j]) * std::sin(half[i] - half[j]); };

    d_.assign(static_cast<size_t>(N) * N, 0.0);
    for (int i = 0; i < N; ++i) {
        double diag = 0.0;
        for (int j = 0; j < N; ++j) {
            if (i == j) continue;
            const double v = (bary_[j] / bary_[i]) / diff(i, j);
            d_[static_cast<size_t>(i) * N + j] = v;
            diag -= v;
        }
        d_[static_cast<size_t>(i) * N + i] = diag;
    }

    // Interpolatory weights: solve V^T w = m with V_jk = T_k(x_j), x = 2t - 1,
    // m_k = 0.5 * integral of T_k over [-1, x_max].
    Eigen::MatrixXd V(N, N);
    for (int j = 0; j < N; ++j) {
        const double x = 2.0 * t_[j] - 1.0;
        double tm = 1.0, tk = x;
        V(j, 0) = 1.0;
        if (N > 1) V(j, 1) = x;
        for (int k = 2; k < N; ++k) {
            const double tn = 2.0 * x * tk - tm;
            V(j, k) = tn;
            tm = tk;
            tk = tn;
        }
    }
    const double xm = 2.0 * t_max_ - 1.0;
    auto cheb = [](int k, double x) { return std::cos(k * std::acos(std::clamp(x, -1.0, 1.0))); };
    auto antideriv = [&](int k, double x) {
        if (k == 0) return x;
        if (k == 1) return 0.5 * x * x;
        return cheb(k + 1, x) / (2.0 * (k + 1)) - cheb(k - 1, x) / (2.0 * (k - 1));
    };
    Eigen::VectorXd m(N);
    for (int k = 0; k < N; ++k) m(k) = 0.5 * (antideriv(k, xm) - antideriv(k, -1.0));
    Eigen::VectorXd w = V.transpose().partialPivLu().solve(m);
    w_quad_.assign(w.data(), w.data() + N);
}

std::shared_ptr<const Grid> Grid::build(const GridSpec& spec) {
    static std::mutex mu;
    static std::vector<std::shared_ptr<const Grid>> cache;
    validate(spec);
    std::lock_guard<std::mutex> lock(mu);
    for (const auto& g : cache) {
        const GridSpec& s = g->spec();
        if (s.node_count == spec.node_count && s.map_scale == spec.map_scale &&
            s.tail_cutoff == spec.tail_cutoff && s.rel_tol == spec.rel_tol &&
            s.max_derivative_order == spec.max_derivative_order && s.tail_fraction_tol == spec.tail_fraction_tol)
            return g;
    }
    auto g = std::make_shared<const Grid>(spec);
    if (cache.size() > 16) cache.erase(cache.begin());
    cache.push_back(g);
    return g;
}

std::vector<double> Grid::apply_dt(const std::vector<double>& v) const {
    const int N = size();
    std::vector<double> out(N, 0.0);
    for (int i = 0; i < N; ++i) {
        const double* row = &d_[static_cast<size_t>(i) * N];
        double s = 0.0;
        for (int j = 0; j < N; ++j) s += row[j] * v[j];
        out[i] = s;
    }
    return out;
}

double Grid::interpolate(const std::vector<double>& v, double t) const {
    const int N = size();
    double num = 0.0, den = 0.0;
    for (int j = 0; j < N; ++j) {
        const double d = t - t_[j];
        if (d == 0.0) return v[j];
        const double c = bary_[j] / d;
        num += c * v[j];
        den += c;
    }
    return num / den;
}

namespace {

Jet ell_jet(double r, double L, int order) {
    const Jet x = Jet::variable(r, order) / L;
    return 0.5 * log(1.0 + x * x);
}

double ell(double r, double L) { return 0.5 * std::log1p((r / L) * (r / L)); }

TailModel derived_tail(const GridFunction& f, double extra) {
    if (f.growth > 0 || f.log_coeff != 0.0) return TailModel::undeclared();
    if (f.tail.kind == TailModel::Kind::power) return TailModel::power(f.tail.exponent + extra);
    return f.tail;
}

Parity flip(Parity p) {
    if (p == Parity::even) return Parity::odd;
    if (p == Parity::odd) return Parity::even;
    return Parity::none;
}

GridFunction derivative_once(const GridFunction& f) {
    const Grid& g = *f.grid;
    const int N = g.size();
    const double L = g.spec().map_scale;
    const auto& t = g.t();
    const auto& r = g.r();
    // Growth r^p is divided out, and so is a declared power tail r^-q (as
    // p = -q), so that w is bounded and smooth up to t = 1 and the derivative
    // keeps its relative accuracy far out.
    double p = f.growth;
    if (f.growth == 0 && f.log_coeff == 0.0 && f.tail.kind == TailModel::Kind::power) {
        const double log_span = -std::log(1.0 - *std::max_element(t.begin(), t.end()));
        p = -std::min({f.tail.exponent, 64.0, log_span > 0.0 ? 200.0 / log_span : 64.0});
    }
    std::vector<double> s(N), w(N);
    for (int j = 0; j < N; ++j) {
        s[j] = f.values[j] - (f.log_coeff != 0.0 ? f.log_coeff * ell(r[j], L) : 0.0);
        w[j] = s[j] * std::pow(1.0 - t[j], p);
    }
    const std::vector<double> dw = g.apply_dt(w);
    GridFunction out;
    out.grid = f.grid;
    out.values.resize(N);
    for (int j = 0; j < N; ++j) {
        const double om = 1.0 - t[j];
        double v = (dw[j] * std::pow(om, 2 - p) + p * s[j] * om) / L;
        if (f.log_coeff != 0.0) v += f.log_coeff * ell_jet(r[j], L, 1)[1];
        out.values[j] = v;
    }
    out.parity = flip(f.parity);
    if (f.parity == Parity::even) out.values[0] = 0.0;
    out.growth = std::max(f.growth - 1, 0);
    out.log_coeff = 0.0;
    out.tail = derived_tail(f, 1.0);
    return out;
}

// Radau nodes cluster like N^-2 at r = 0, so the f'/r term amplifies roundoff
// by about r_1^-1 and iterated Laplacians lose all accuracy there; plain
// derivatives at the first nodes suffer the same way, only less. Near the
// origin these are instead taken from a least-squares fit of f by a
// polynomial in rho = r^2 (even by construction) over r <= fit_radius.
struct OriginFit {
    double rho_fit = 0.0;
    Eigen::VectorXd a;  // Chebyshev coefficients in s = 2 rho / rho_fit - 1
    int used = 0;       // nodes whose values the fit replaces
};

bool origin_fit(const GridFunction& f, OriginFit& fit) {
    const Grid& g = *f.grid;
    const double L = g.spec().map_scale;
    const double fit_radius = 0.2 * L;
    const double use_radius = 0.08 * L;
    const auto& r = g.r();
    int count = 0;
    while (count < g.size() && r[count] <= fit_radius) ++count;
    int used = 0;
    while (used < count && r[used] <= use_radius) ++used;
    const int degree = std::min(12, count / 2 - 1);
    if (degree < 4 || used == 0) return false;
    fit.rho_fit = fit_radius * fit_radius;
    fit.used = used;
    Eigen::MatrixXd A(count, degree + 1);
    Eigen::VectorXd b(count);
    for (int j = 0; j < count; ++j) {
        const double x = 2.0 * r[j] * r[j] / fit.rho_fit - 1.0;
        double t0 = 1.0, t1 = x;
        A(j, 0) = t0;
        A(j, 1) = t1;
        for (int k = 2; k <= degree; ++k) {
            const double t2 = 2.0 * x * t1 - t0;
            A(j, k) = t2;
            t0 = t1;
            t1 = t2;
        }
        b(j) = f.values[j] - (f.log_coeff != 0.0 ? f.log_coeff * ell(r[j], L) : 0.0);
    }
    fit.a = A.colPivHouseholderQr().solve(b);
    // A poor fit means f has structure below the fit radius; keep the spectral values.
    const double resid = (A * fit.a - b).cwiseAbs().maxCoeff();
    return resid <= 1e-6 * std::max(1.0, b.cwiseAbs().maxCoeff());
}

// Taylor coefficients in rho of the fitted polynomial at rho.
Jet fit_rho_jet(const OriginFit& fit, double rho, int order) {
    const Jet x = Jet::variable(rho, order) * (2.0 / fit.rho_fit) - 1.0;
    Jet t0(1.0, order), t1 = x;
    Jet sum = fit.a(0) * t0 + fit.a(1) * t1;
    for (int k = 2; k < fit.a.size(); ++k) {
        const Jet t2 = 2.0 * x * t1 - t0;
        sum += fit.a(k) * t2;
        t0 = t1;
        t1 = t2;
    }
    return sum;
}

void origin_correction(const GridFunction& f, int n, std::vector<double>& lap) {
    OriginFit fit;
    if (!origin_fit(f, fit)) return;
    const double L = f.grid->spec().map_scale;
    const auto& r = f.grid->r();
    for (int j = 0; j < fit.used; ++j) {
        const double rho = r[j] * r[j];
        const Jet p = fit_rho_jet(fit, rho, 2);
        double v = 4.0 * rho * p.derivative(2) + 2.0 * n * p.derivative(1);
        if (f.log_coeff != 0.0) {
            const Jet e = ell_jet(r[j], L, 2);
            v += f.log_coeff * (j == 0 ? n * 2.0 * e[2] : 2.0 * e[2] + (n - 1) * e[1] / r[j]);
        }
        lap[j] = v;
    }
}

void origin_derivative_correction(const GridFunction& f, int k, std::vector<double>& d) {
    OriginFit fit;
    if (!origin_fit(f, fit)) return;
    const double L = f.grid->spec().map_scale;
    const auto& r = f.grid->r();
    for (int j = 0; j < fit.used; ++j) {
        // P(r^2) as a jet in r
        const Jet x = Jet::variable(r[j], k);
        const Jet rho = x * x;
        const Jet p = fit_rho_jet(fit, r[j] * r[j], k);
        Jet h = rho - r[j] * r[j];
        Jet composed(p[0], k), power(1.0, k);
        for (int i = 1; i <= k; ++i) {
            power = power * h;
            composed += p[i] * power;
        }
        double v = composed.derivative(k);
        if (f.log_coeff != 0.0) v += f.log_coeff * ell_jet(r[j], L, k).derivative(k);
        d[j] = v;
    }
}

}  // namespace

FunctionInterpolant::FunctionInterpolant(const GridFunction& f)
    : grid_(f.grid), growth_(f.growth), log_coeff_(f.log_coeff), tail_(f.tail) {
    const Grid& g = *grid_;
    const double L = g.spec().map_scale;
    // Interpolating f (1 + r/L)^q instead of f keeps relative accuracy far out
    // for a tail r^-q; plain interpolation has an absolute roundoff floor.
    if (growth_ == 0 && log_coeff_ == 0.0 && tail_.kind == TailModel::Kind::power)
        decay_ = std::min(tail_.exponent, 64.0);
    // Keep the scaled values far from overflow at the last node.
    const double log_span = -std::log(1.0 - *std::max_element(g.t().begin(), g.t().end()));
    if (log_span > 0.0) decay_ = std::min(decay_, 200.0 / log_span);
    smooth_.resize(g.size());
    for (int j = 0; j < g.size(); ++j) {
        double s = f.values[j] - (log_coeff_ != 0.0 ? log_coeff_ * ell(g.r()[j], L) : 0.0);
        if (growth_ > 0) s *= std::pow(1.0 - g.t()[j], growth_);
        if (decay_ > 0.0) s *= std::pow(1.0 - g.t()[j], -decay_);
        smooth_[j] = s;
    }
    const double R = g.spec().tail_cutoff;
    const double tR = g.t_of_r(R);
    f_cutoff_ = g.interpolate(smooth_, tR) * std::pow(1.0 - tR, decay_);
}

double FunctionInterpolant::operator()(double rr) const {
    require(rr >= 0.0 && std::isfinite(rr), ErrorCode::domain, "evaluate needs a finite radius >= 0");
    const Grid& g = *grid_;
    const double R = g.spec().tail_cutoff;
    if (rr > R && growth_ == 0 && log_coeff_ == 0.0) {
        if (tail_.kind == TailModel::Kind::rapid) return 0.0;
        if (tail_.kind == TailModel::Kind::power) return f_cutoff_ * std::pow(R / rr, tail_.exponent);
    }
    const double t = g.t_of_r(rr);
    double v = g.interpolate(smooth_, t);
    if (decay_ > 0.0) v *= std::pow(1.0 - t, decay_);
    if (growth_ > 0) v /= std::pow(1.0 - t, growth_);
    if (log_coeff_ != 0.0) v += log_coeff_ * ell(rr, g.spec().map_scale);
    return v;
}

double GridFunction::evaluate(double rr) const { return FunctionInterpolant(*this)(rr); }

GridFunction sample(std::shared_ptr<const Grid> grid, const std::function<double(double)>& f, Parity parity,
                    TailModel tail, int growth, double log_coeff) {
    require(growth >= 0, ErrorCode::invalid_argument, "growth order must be >= 0");
    GridFunction out;
    out.values.resize(grid->size());
    for (int j = 0; j < grid->size(); ++j) out.values[j] = f(grid->r()[j]);
    out.grid = std::move(grid);
    out.parity = parity;
    out.tail = tail;
    out.growth = growth;
    out.log_coeff = log_coeff;
    return out;
}

GridFunction differentiate(const GridFunction& f, int k) {
    require(k >= 0, ErrorCode::invalid_argument, "derivative order must be >= 0");
    require(k <= f.grid->spec().max_derivative_order, ErrorCode::unsupported_order,
            "derivative order " + std::to_string(k) + " exceeds configured maximum " +
                std::to_string(f.grid->spec().max_derivative_order));
    GridFunction out = f;
    for (int i = 0; i < k; ++i) out = derivative_once(out);
    if (k >= 1 && f.parity == Parity::even) origin_derivative_correction(f, k, out.values);
    return out;
}

GridFunction radial_laplacian(const GridFunction& f, int n) {
    require(n >= 1, ErrorCode::invalid_argument, "dimension must be >= 1");
    require(f.parity == Parity::even, ErrorCode::parity, "radial Laplacian needs an even function");
    const GridFunction d1 = derivative_once(f);
    const GridFunction d2 = derivative_once(d1);
    GridFunction out;
    out.grid = f.grid;
    const auto& r = f.grid->r();
    out.values.resize(f.size());
    out.values[0] = n * d2.values[0];
    for (int j = 1; j < f.size(); ++j) out.values[j] = d2.values[j] + (n - 1) * d1.values[j] / r[j];
    origin_correction(f, n, out.values);
    out.parity = Parity::even;
    out.growth = std::max(f.growth - 2, 0);
    out.log_coeff = 0.0;
    out.tail = derived_tail(f, 2.0);
    if (f.log_coeff != 0.0 && f.growth == 0) out.tail = TailModel::power(2.0);
    return out;
}

IteratedLaplacian iterated_laplacian(const GridFunction& f, int n, int m) {
    require(m >= 0, ErrorCode::invalid_argument, "Laplacian power must be >= 0");
    require(2 * m <= f.grid->spec().max_derivative_order, ErrorCode::unsupported_order,
            "Laplacian power " + std::to_string(m) + " exceeds configured derivative order");
    GridFunction g = f;
    for (int i = 0; i < m; ++i) {
        g = radial_laplacian(g, n);
        for (double& v : g.values) v = -v;
    }
    const double N = f.grid->size();
    const double cond = std::numeric_limits<double>::epsilon() * std::pow(N, 2.0 * m);
    return {g, cond, cond > f.grid->spec().rel_tol};
}

RadialIntegral integrate_radial_detail(const GridFunction& f, int n) {
    require(n >= 1, ErrorCode::invalid_argument, "dimension must be >= 1");
    require(f.growth == 0 && f.log_coeff == 0.0, ErrorCode::tail_divergence,
            "integrand grows at infinity; radial integral diverges");
    require(f.tail.kind != TailModel::Kind::undeclared, ErrorCode::configuration,
            "integrand has no declared tail model");
    const Grid& g = *f.grid;
    const double L = g.spec().map_scale;
    const double R = g.spec().tail_cutoff;
    if (f.tail.kind == TailModel::Kind::power && !(f.tail.exponent > n))
        fail(ErrorCode::tail_divergence, "declared tail r^-" + std::to_string(f.tail.exponent) +
                                             " is not integrable against r^" + std::to_string(n - 1));
    const auto& t = g.t();
    const auto& r = g.r();
    const auto& w = g.quad_weights();
    double sum = 0.0;
    for (int j = 0; j < g.size(); ++j) {
        const double om = 1.0 - t[j];
        const double h = f.values[j] * std::pow(r[j], n - 1) * L / (om * om);
        sum += w[j] * h;
    }
    RadialIntegral out;
    if (f.tail.kind == TailModel::Kind::power) {
        const double fR = f.evaluate(R);
        const double q = f.tail.exponent;
        out.tail = fR * std::pow(R, n) / (q - n);
    }
    out.value = sum + out.tail;
    const double scale = std::abs(sum) + std::abs(out.tail);
    out.tail_fraction = scale > 0 ? std::abs(out.tail) / scale : 0.0;
    if (out.tail_fraction > g.spec().tail_fraction_tol) {
        std::ostringstream msg;
        msg << "tail beyond r = " << R << " carries fraction " << out.tail_fraction << " of the integral";
        fail(ErrorCode::tail_divergence, msg.str());
    }
    return out;
}

double integrate_radial(const GridFunction& f, int n) { return integrate_radial_detail(f, n).value; }

std::vector<double> geometric_radii(double r0, double ratio, int count) {
    std::vector<double> out(count);
    for (int k = 0; k < count; ++k) out[k] = r0 * std::pow(ratio, k);
    return out;
}

LimitEstimate extrapolate_limit(const std::vector<double>& radii, const std::vector<double>& samples, double tol) {
    require(radii.size() == samples.size(), ErrorCode::invalid_argument, "radii and samples differ in length");
    require(samples.size() >= 4, ErrorCode::invalid_argument, "extrapolation needs at least four samples");
    for (size_t k = 0; k < radii.size(); ++k)
        require(radii[k] > 0.0 && std::isfinite(radii[k]), ErrorCode::invalid_argument, "radii must be positive");
    const double q = radii[1] / radii[0];
    require(q != 1.0, ErrorCode::invalid_argument, "radii must be geometric with ratio != 1");
    for (size_t k = 1; k < radii.size(); ++k)
        require(std::abs(radii[k] / radii[k - 1] - q) <= 1e-9 * std::abs(q), ErrorCode::invalid_argument,
                "radii are not geometric");

    LimitEstimate est;
    est.radii = radii;
    est.samples = samples;
    for (double s : samples) {
        if (!std::isfinite(s)) {
            est.diagnostic = "non-finite sample";
            return est;
        }
    }
    const int m = static_cast<int>(samples.size());
    double scale = 0.0;
    for (double s : samples) scale = std::max(scale, std::abs(s));

    // eps[k][j]: column k, row j.
    std::vector<std::vector<double>> eps;
    eps.push_back(std::vector<double>(m + 1, 0.0));  // column -1
    eps.push_back(samples);                          // column 0
    bool exact = false;
    for (int k = 1; k < m && !exact; ++k) {
        const auto& prev = eps[k];      // column k-1
        const auto& prev2 = eps[k - 1]; // column k-2
        std::vector<double> col;
        bool ok = true;
        for (size_t j = 0; j + 1 < prev.size(); ++j) {
            const double d = prev[j + 1] - prev[j];
            if (d == 0.0) {
                ok = false;
                // Equal entries in an even column: the sequence is already stationary.
                if ((k - 1) % 2 == 0) exact = true;
                break;
            }
            col.push_back(prev2[j + 1] + 1.0 / d);
        }
        if (!ok) break;
        for (double v : col)
            if (!std::isfinite(v)) ok = false;
        if (!ok) break;
        eps.push_back(col);
    }

    // Deepest even column (index 2i + 1 in eps).
    int best = 1;
    for (int c = 1; c < static_cast<int>(eps.size()); c += 2) best = c;
    const auto& col = eps[best];
    est.value = col.back();
    if (exact && col.size() >= 2 && col[col.size() - 1] == col[col.size() - 2]) {
        est.error_bar = 0.0;
    } else if (col.size() >= 2) {
        est.error_bar = std::abs(col[col.size() - 1] - col[col.size() - 2]);
    } else if (best >= 3) {
        est.error_bar = std::abs(col.back() - eps[best - 2].back());
    } else {
        est.error_bar = std::abs(samples[m - 1] - samples[m - 2]);
    }
    if (exact) est.error_bar = std::min(est.error_bar, std::abs(samples[m - 1] - samples[m - 2]));
    const double thresh = tol * std::max(std::abs(est.value), scale);
    est.converged = std::isfinite(est.value) && est.error_bar <= thresh;
    if (!est.converged) {
        std::ostringstream msg;
        msg << "extrapolation did not settle: estimate " << est.value << " with error bar " << est.error_bar
            << " (needs <= " << thresh << ")";
        if (best == 1) msg << "; acceleration table broke down, sequence looks divergent";
        est.diagnostic = msg.str();
    }
    return est;
}

}  // namespace qdeficit
