#include "qdeficit/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qdeficit/constants.hpp"
#include "qdeficit/error.hpp"
#include "qdeficit/quadrature.hpp"

namespace qdeficit {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

double norm(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

void check_radius(double r) { require(std::isfinite(r) && r > 0.0, ErrorCode::domain, "radius must be finite and > 0"); }

// u, u', Laplacian u of a radial profile.
struct Radial2 {
    double u, du, lap;
};

Radial2 radial_values(const RadialProfile& u, int n, double r) {
    const Jet j = u.jet(r, 2);
    const double d2 = j.derivative(2);
    return {j.value(), j[1], r == 0.0 ? n * d2 : d2 + (n - 1) * j[1] / r};
}

double scalar_from(int n, double u, double lap, double grad2) {
    return -2.0 * (n - 1) * std::exp(-2.0 * u) * (lap + 0.5 * (n - 2) * grad2);
}

// Radii where the integrand of a volume integral is not smooth or changes scale.
std::vector<double> volume_breaks(const ConformalMetric& g, double r) {
    std::vector<double> br{0.0};
    for (double x = 0.125; x < r; x *= 2.0) br.push_back(x);
    if (const NonRadialField* f = g.field()) {
        for (const Bump& b : f->bumps()) {
            const double c = norm(b.center);
            for (double x : {c - b.radius, c, c + b.radius})
                if (x > 0.0 && x < r) br.push_back(x);
        }
    }
    br.push_back(r);
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    return br;
}

// Mean of e^(p u) over |x| = rho.
double exp_mean(const ConformalMetric& g, double p, double rho) {
    if (g.radial()) return std::exp(p * g.profile().value(rho));
    return sphere_mean(*g.field(), rho, ShellIntegrand::exp_pu, p);
}

double wynn_or_nan(const LimitEstimate& e) { return e.converged ? e.value : nan; }

}  // namespace

ConformalMetric::ConformalMetric(RadialProfile u, int n) : u_(u), radial_part_(std::move(u)), n_(n) {
    require(n >= 2 && n <= 12, ErrorCode::invalid_argument, "dimension must lie in [2, 12]");
}

ConformalMetric::ConformalMetric(NonRadialField f)
    : u_(f.base()), radial_part_(symmetrized_profile(f)), n_(f.dimension()) {
    field_ = std::make_shared<const NonRadialField>(std::move(f));
}

std::string ConformalMetric::describe() const {
    std::ostringstream s;
    s << u_.family() << "(" << u_.parameter() << ") n=" << n_;
    if (field_) s << " +" << field_->bumps().size() << " bumps";
    return s.str();
}

double scalar_curvature(const ConformalMetric& g, double r) {
    require(g.radial(), ErrorCode::invalid_argument, "scalar_curvature(r) needs a radial metric; use scalar_curvature_at");
    require(std::isfinite(r) && r >= 0.0, ErrorCode::domain, "radius must be finite and >= 0");
    const Radial2 v = radial_values(g.profile(), g.dimension(), r);
    return scalar_from(g.dimension(), v.u, v.lap, v.du * v.du);
}

double scalar_curvature_at(const ConformalMetric& g, const std::vector<double>& x) {
    require(static_cast<int>(x.size()) == g.dimension(), ErrorCode::invalid_argument, "point must have n coordinates");
    if (g.radial()) return scalar_curvature(g, norm(x));
    const NonRadialField& f = *g.field();
    const std::vector<double> grad = f.gradient(x);
    double g2 = 0.0;
    for (double v : grad) g2 += v * v;
    return scalar_from(g.dimension(), f.value(x), f.laplacian(x), g2);
}

const char* completeness_name(Completeness c) {
    switch (c) {
        case Completeness::complete: return "complete";
        case Completeness::incomplete: return "incomplete";
        case Completeness::inconclusive: return "inconclusive";
    }
    return "?";
}

CompletenessReport completeness_check(const ConformalMetric& g) {
    const TailDescriptor& tail = g.profile().tail();
    CompletenessReport out;
    out.alpha = tail.alpha;
    // Supporting number: length of a ray up to 1e4, which grows without bound
    // exactly when the metric is complete.
    out.ray_radius = 1e4;
    QuadOptions q;
    q.rel_tol = 1e-10;
    const RadialProfile& u = g.profile();
    std::vector<double> br{0.0};
    for (double x = 0.125; x < out.ray_radius; x *= 2.0) br.push_back(x);
    br.push_back(out.ray_radius);
    out.ray_length = integrate_gk([&](double r) { return std::exp(u.value(r)); }, br, q).value;
    if (tail.correction_order < 0) {
        out.status = Completeness::inconclusive;
        out.rule = "tail not declared";
        return out;
    }
    if (tail.alpha < 1.0) {
        out.status = Completeness::complete;
        out.rule = "alpha < 1: e^u ~ r^-alpha is not integrable";
    } else if (tail.alpha > 1.0) {
        out.status = Completeness::incomplete;
        out.rule = "alpha > 1: e^u ~ r^-alpha is integrable";
    } else if (tail.correction_order >= 1) {
        out.status = Completeness::complete;
        out.rule = "alpha = 1 with u + log r -> c: e^u ~ e^c / r, logarithmic divergence";
    } else {
        out.status = Completeness::inconclusive;
        out.rule = "alpha = 1 without a vanishing tail correction";
    }
    return out;
}

ScalarTailReport scalar_tail_check(const ConformalMetric& g, const GridSpec& spec) {
    validate(spec);
    const int n = g.dimension();
    const double alpha = g.profile().tail().alpha;
    ScalarTailReport out;
    out.r_min = scalar_tail_r0;
    out.r_max = std::max(spec.tail_cutoff, 10.0 * scalar_tail_r0);
    out.leading_coefficient = (n - 2) * alpha * (1.0 - 0.5 * alpha) + 0.0;  // no -0 in reports
    out.sampled_min = std::numeric_limits<double>::infinity();
    // S r^2 e^(2u) tends to 2(n-1) times the leading coefficient, so sampling
    // it keeps the tolerance meaningful where S itself decays.
    const int per_decade = 8;
    const int count = static_cast<int>(std::round(per_decade * std::log10(out.r_max / out.r_min))) + 1;
    for (int k = 0; k < count; ++k) {
        const double r = out.r_min * std::pow(out.r_max / out.r_min, static_cast<double>(k) / (count - 1));
        double s = 0.0;
        if (g.radial() || r > g.field()->support_radius()) {
            const Radial2 v = radial_values(g.profile(), n, r);
            s = -2.0 * (n - 1) * r * r * (v.lap + 0.5 * (n - 2) * v.du * v.du);
        } else {
            s = std::numeric_limits<double>::infinity();
            const SphereRule rule = sphere_rule(n, 48);
            std::vector<double> x(n);
            for (const auto& p : rule.points) {
                for (int i = 0; i < n; ++i) x[i] = r * p[i];
                s = std::min(s, scalar_curvature_at(g, x) * r * r * std::exp(2.0 * g.field()->value(x)));
            }
        }
        out.sampled_min = std::min(out.sampled_min, s);
    }
    out.nonnegative = out.sampled_min >= -scalar_tail_tol && out.leading_coefficient >= 0.0;
    std::ostringstream w;
    w << (out.sampled_min >= -scalar_tail_tol ? "sampled-nonnegative" : "sampled-negative") << " on [" << out.r_min
      << ", " << out.r_max << "] (min of S r^2 e^(2u) = " << out.sampled_min << ") with "
      << (out.leading_coefficient >= 0.0 ? "nonnegative" : "negative") << " leading tail term "
      << out.leading_coefficient;
    out.wording = w.str();
    return out;
}

CurvatureReport total_q(const ConformalMetric& g, const GridSpec& spec, const FracLapOptions& opt) {
    const int n = g.dimension();
    CurvatureReport rep;
    rep.bound_Cn = total_q_bound(n);
    rep.total_q = nan;
    rep.abs_total_q = nan;
    rep.cross_gap = nan;
    rep.bound_residual = nan;
    FracLapResult res = fractional_power_laplacian(g.profile(), n, spec, opt);
    rep.method = method_name(res.method);
    rep.cross_gap = res.cross_gap;
    if (res.accuracy_warning) rep.diagnostics.push_back("fractional Laplacian accuracy warning");
    const double area = unit_sphere_area(n);
    try {
        rep.total_q = area * integrate_radial(res.field, n);
        GridFunction abs_field = res.field;
        for (double& v : abs_field.values) v = std::abs(v);
        rep.abs_total_q = area * integrate_radial(abs_field, n);
        rep.hypothesis_flags.q_abs_convergent = std::isfinite(rep.abs_total_q);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::tail_divergence && e.code() != ErrorCode::configuration) throw;
        rep.hypothesis_flags.q_abs_convergent = false;
        rep.diagnostics.push_back(std::string("Q not absolutely integrable: ") + e.what());
        return rep;
    }
    if (const NonRadialField* f = g.field()) {
        // Each bump is smooth with compact support, so its (-Laplacian)^(n/2)
        // decays like |x|^(-2n); its absolute integral is translation invariant.
        rep.total_q += bump_total_q(*f);
        GridSpec fine = spec;
        fine.node_count = std::max(spec.node_count, 2048);
        FracLapOptions o = opt;
        o.cross_check = false;
        for (const Bump& b : f->bumps()) {
            GridFunction q = fractional_power_laplacian(centered_bump(b), n, fine, o).field;
            for (double& v : q.values) v = std::abs(v);
            rep.abs_total_q += area * integrate_radial(q, n);
        }
        rep.diagnostics.push_back("abs_total_q for a non-radial field is the triangle-inequality bound");
    }
    rep.bound_residual = rep.bound_Cn - rep.total_q;
    return rep;
}

double volume(const ConformalMetric& g, double r) {
    check_radius(r);
    const int n = g.dimension();
    QuadOptions q;
    q.rel_tol = 1e-13;
    q.max_intervals = 4000;
    auto h = [&](double rho) { return exp_mean(g, n, rho) * std::pow(rho, n - 1); };
    return unit_sphere_area(n) * integrate_gk(h, volume_breaks(g, r), q).value;
}

double area(const ConformalMetric& g, double r) {
    check_radius(r);
    const int n = g.dimension();
    return unit_sphere_area(n) * std::pow(r, n - 1) * exp_mean(g, n - 1, r);
}

MixedVolumes mixed_volumes(const ConformalMetric& g, double t) {
    const int n = g.dimension();
    require(n >= 3, ErrorCode::invalid_argument, "mixed volumes V_(n-3) need n >= 3");
    require(std::isfinite(t), ErrorCode::domain, "t must be finite");
    const double r = std::exp(t);
    const double om = unit_ball_volume(n);
    const Jet j = g.radial_part().jet(r, 1);
    MixedVolumes mv;
    mv.t = t;
    mv.w = t + j.value();
    mv.dw_dt = 1.0 + r * j[1];
    mv.V_n = volume(ConformalMetric(g.radial_part(), n), r);
    mv.V_n1 = om * std::exp((n - 1) * mv.w);
    mv.V_n2 = om * std::exp((n - 2) * mv.w) * mv.dw_dt;
    mv.V_n3 = om * std::exp((n - 3) * mv.w) * mv.dw_dt * mv.dw_dt;
    // Second fundamental form of the sphere in g: L = e^(-u)(1/r + u') I_(n-1).
    const double kappa = std::exp(-j.value()) * (1.0 / r + j[1]);
    mv.H1 = (n - 1) * kappa;
    const double trL2 = (n - 1) * kappa * kappa;
    mv.H2 = 0.5 * (mv.H1 * mv.H1 - trL2);
    const double lift = std::exp((n - 1) * mv.w);
    mv.V_n2_from_H = om / (n - 1) * mv.H1 * lift;
    mv.V_n3_from_H = 2.0 * om / ((n - 1) * (n - 2)) * mv.H2 * lift;
    auto gap = [](double a, double b) {
        const double s = std::max(std::abs(a), std::abs(b));
        return s > 0.0 ? std::abs(a - b) / s : 0.0;
    };
    mv.route_gap = std::max(gap(mv.V_n2, mv.V_n2_from_H), gap(mv.V_n3, mv.V_n3_from_H));
    return mv;
}

double intermediate_ratio(const MixedVolumes& mv, int n) {
    require(n >= 3, ErrorCode::invalid_argument, "the intermediate ratio needs n >= 3");
    // Fractional powers act on magnitudes; the sign of V_(n-2) is that of dw/dt.
    const double a = std::abs(mv.V_n3_from_H), b = std::abs(mv.V_n2_from_H);
    if (a == 0.0) return 0.0;
    const double om = unit_ball_volume(n);
    const double mag = std::exp((n - 2.0) / (n - 1.0) * std::log(a) - std::log(om) / (n - 1.0) -
                                (n - 3.0) / (n - 1.0) * std::log(b));
    return mv.V_n2_from_H < 0.0 ? -mag : mag;
}

double isoperimetric_ratio(const ConformalMetric& g, double r) {
    const int n = g.dimension();
    const double v1 = area(g, r) / n;
    const double vn = volume(g, r);
    return std::exp(n / (n - 1.0) * std::log(v1) - std::log(unit_ball_volume(n)) / (n - 1.0) - std::log(vn));
}

const char* branch_name(DeficitBranch b) {
    switch (b) {
        case DeficitBranch::positive_slope: return "positive-slope";
        case DeficitBranch::zero_slope_unbounded: return "zero-slope-unbounded";
        case DeficitBranch::zero_slope_bounded_area: return "zero-slope-bounded-area";
        case DeficitBranch::bounded_volume: return "bounded-volume";
        case DeficitBranch::negative_slope: return "negative-slope";
        case DeficitBranch::unclassified: return "unclassified";
    }
    return "?";
}

std::vector<double> deficit_radii() {
    std::vector<double> r;
    for (int k = 0; k <= 5; ++k) r.push_back(10.0 * std::ldexp(1.0, k));
    return r;
}

DeficitReport deficit(const ConformalMetric& g, double tq) {
    const int n = g.dimension();
    const std::vector<double> radii = deficit_radii();
    DeficitReport rep;
    rep.lhs = 1.0 - tq / total_q_bound(n);
    std::vector<double> ratio, slope, vol, ar, inter;
    for (double r : radii) {
        ratio.push_back(isoperimetric_ratio(g, r));
        const Jet j = g.radial_part().jet(r, 1);
        slope.push_back(1.0 + r * j[1]);
        vol.push_back(volume(g, r));
        ar.push_back(area(g, r));
        if (n >= 3) inter.push_back(intermediate_ratio(mixed_volumes(g, std::log(r)), n));
    }
    rep.rhs = extrapolate_limit(radii, ratio, deficit_limit_tol);
    if (n >= 3) {
        rep.intermediate = extrapolate_limit(radii, inter, deficit_limit_tol);
    } else {
        rep.intermediate.diagnostic = "intermediate ratio needs n >= 3";
    }
    const LimitEstimate s = extrapolate_limit(radii, slope, deficit_limit_tol);
    const double slope_tol = deficit_limit_tol;
    if (!s.converged) {
        rep.branch = DeficitBranch::unclassified;
        rep.diagnostics.push_back("dw/dt limit: " + s.diagnostic);
    } else if (s.value > slope_tol) {
        rep.branch = DeficitBranch::positive_slope;
    } else if (s.value < -slope_tol) {
        rep.branch = DeficitBranch::negative_slope;
    } else {
        const bool vol_bounded = extrapolate_limit(radii, vol, deficit_limit_tol).converged;
        const bool area_bounded = extrapolate_limit(radii, ar, deficit_limit_tol).converged;
        bool decreasing = true;
        for (size_t k = 1; k < ratio.size(); ++k) decreasing = decreasing && ratio[k] <= ratio[k - 1];
        if (vol_bounded || area_bounded) {
            rep.branch = vol_bounded ? DeficitBranch::bounded_volume : DeficitBranch::zero_slope_bounded_area;
            // With the volume bounded, e^(nw) -> 0; with the area bounded and the
            // volume unbounded, the ratio is bounded by a constant over V_n.
            // Either way the limit is 0; the samples must decrease towards it.
            if (decreasing) {
                rep.rhs.value = 0.0;
                rep.rhs.error_bar = ratio.back();
                rep.rhs.converged = true;
                rep.rhs.diagnostic = std::string("limit 0 from the ") + branch_name(rep.branch) + " branch";
            } else {
                rep.branch = DeficitBranch::unclassified;
                rep.diagnostics.push_back("ratio samples do not decrease on a zero-slope branch");
            }
        } else {
            rep.branch = DeficitBranch::zero_slope_unbounded;
        }
    }
    if (!rep.rhs.converged) rep.diagnostics.push_back("rhs limit: " + rep.rhs.diagnostic);
    if (n >= 3 && !rep.intermediate.converged)
        rep.diagnostics.push_back("intermediate limit: " + rep.intermediate.diagnostic);
    rep.residual = std::abs(rep.lhs - wynn_or_nan(rep.rhs));
    rep.intermediate_residual = std::abs(rep.lhs - wynn_or_nan(rep.intermediate));
    return rep;
}

DeficitReport deficit(const ConformalMetric& g, const GridSpec& spec) {
    return deficit(g, total_q(g, spec).total_q);
}

}  // namespace qdeficit
