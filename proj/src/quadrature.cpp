#include "qdeficit/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "qdeficit/error.hpp"

namespace qdeficit {

namespace {

// Kronrod 21-point abscissae (positive half, descending) and weights; the
// odd-indexed abscissae are the 10-point Gauss nodes.
constexpr double xgk[11] = {0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
                            0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
                            0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
                            0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
                            0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
                            0.0};
constexpr double wgk[11] = {0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
                            0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
                            0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
                            0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
                            0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
                            0.149445554002916905664936468389821};
constexpr double wg[5] = {0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
                          0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
                          0.295524224714752870173892994651338};

struct Segment {
    double a, b, value, error, l1;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk21(const Integrand& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double resk = wgk[10] * fc;
    double resabs = wgk[10] * std::abs(fc);
    double resg = 0.0;
    for (int j = 0; j < 10; ++j) {
        const double x = h * xgk[j];
        const double f1 = f(c - x), f2 = f(c + x);
        const double s = f1 + f2;
        resk += wgk[j] * s;
        resabs += wgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) resg += wg[j / 2] * s;
    }
    const double value = resk * h;
    double err = std::abs((resk - resg) * h);
    // Standard QUADPACK error scaling is too pessimistic for smooth integrands;
    // keep the raw Gauss/Kronrod difference but guard against roundoff.
    err = std::max(err, 50.0 * std::numeric_limits<double>::epsilon() * std::abs(value));
    return {a, b, value, err, std::abs(h) * resabs};
}

}  // namespace

QuadResult integrate_gk(const Integrand& f, const std::vector<double>& breaks, const QuadOptions& opt) {
    require(breaks.size() >= 2, ErrorCode::invalid_argument, "integrate_gk needs at least two breakpoints");
    std::priority_queue<Segment> heap;
    double total = 0.0, err = 0.0, l1 = 0.0;
    int evals = 0;
    for (size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (breaks[i + 1] == breaks[i]) continue;
        Segment s = gk21(f, breaks[i], breaks[i + 1]);
        evals += 21;
        total += s.value;
        err += s.error;
        l1 += s.l1;
        heap.push(s);
    }
    QuadResult res;
    int intervals = static_cast<int>(heap.size());
    while (!heap.empty() &&
           err > std::max({opt.abs_tol, opt.rel_tol * std::abs(total), opt.l1_rel_tol * l1})) {
        if (intervals >= opt.max_intervals) {
            res.converged = false;
            break;
        }
        Segment s = heap.top();
        const double mid = 0.5 * (s.a + s.b);
        if (!(mid > s.a && mid < s.b)) {
            res.converged = false;
            break;
        }
        heap.pop();
        Segment l = gk21(f, s.a, mid);
        Segment r = gk21(f, mid, s.b);
        evals += 42;
        total += l.value + r.value - s.value;
        err += l.error + r.error - s.error;
        l1 += l.l1 + r.l1 - s.l1;
        heap.push(l);
        heap.push(r);
        ++intervals;
    }
    // Re-sum to remove drift from incremental updates.
    double sum = 0.0, esum = 0.0, lsum = 0.0;
    std::vector<Segment> segs;
    while (!heap.empty()) {
        segs.push_back(heap.top());
        heap.pop();
    }
    std::sort(segs.begin(), segs.end(), [](const Segment& x, const Segment& y) { return x.a < y.a; });
    for (const auto& s : segs) {
        sum += s.value;
        esum += s.error;
        lsum += s.l1;
    }
    res.value = sum;
    res.error = esum;
    res.l1 = lsum;
    res.evaluations = evals;
    if (!std::isfinite(sum)) res.converged = false;
    return res;
}

QuadResult integrate_gk(const Integrand& f, double a, double b, const QuadOptions& opt) {
    return integrate_gk(f, std::vector<double>{a, b}, opt);
}

QuadResult integrate_gk_to_infinity(const Integrand& f, double a, const QuadOptions& opt) {
    auto g = [&](double x) {
        const double om = 1.0 - x;
        const double s = a + x / om;
        const double v = f(s);
        return v == 0.0 ? 0.0 : v / (om * om);
    };
    return integrate_gk(g, std::vector<double>{0.0, 0.5, 0.9, 0.99, 0.999, 1.0}, opt);
}

std::vector<double> graded_breaks(double a, double b, double point, double width, int max_levels) {
    std::vector<double> out{a};
    width = std::max(width, 1e-300);
    if (point > a) {
        std::vector<double> left;
        double d = point - a;
        for (int k = 0; k < max_levels && d > width; ++k) {
            d *= 0.5;
            left.push_back(point - d);
        }
        out.insert(out.end(), left.begin(), left.end());
    }
    if (point > a && point < b) out.push_back(point);
    if (point < b) {
        std::vector<double> right;
        double d = b - point;
        for (int k = 0; k < max_levels && d > width; ++k) {
            d *= 0.5;
            right.push_back(point + d);
        }
        std::reverse(right.begin(), right.end());
        out.insert(out.end(), right.begin(), right.end());
    }
    out.push_back(b);
    std::vector<double> clean;
    for (double x : out)
        if (clean.empty() || x > clean.back()) clean.push_back(x);
    return clean;
}

GaussRule gauss_legendre(int n) {
    require(n >= 1, ErrorCode::invalid_argument, "Gauss-Legendre rule needs n >= 1");
    GaussRule g;
    g.nodes.resize(n);
    g.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p1 = x;
                p0 = 1.0;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        g.nodes[i] = -x;
        g.nodes[n - 1 - i] = x;
        g.weights[i] = w;
        g.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) g.nodes[n / 2] = 0.0;
    return g;
}

}  // namespace qdeficit
