#include "bsscov/quadrature.hpp"
#include "bsscov/errors.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace bsscov::quad {

namespace {

// Gauss-Kronrod 7-15 nodes/weights on [-1,1] (QUADPACK dqk15 constants).
constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    double value;
    double err;
    bool operator<(const Panel& o) const { return err < o.err; }
};

Panel evaluate(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * xgk[i]);
        fv[14 - i] = f(c + h * xgk[i]);
    }
    fv[7] = f(c);
    double resk = wgk[7] * fv[7];
    double resg = wg[3] * fv[7];
    for (int i = 0; i < 7; ++i) {
        resk += wgk[i] * (fv[i] + fv[14 - i]);
        if (i % 2 == 1) resg += wg[i / 2] * (fv[i] + fv[14 - i]);
    }
    Panel p;
    p.a = a;
    p.b = b;
    p.value = resk * h;
    double diff = std::abs((resk - resg) * h);
    // QUADPACK-style error sharpening
    double resabs = 0.0;
    for (int i = 0; i < 15; ++i) resabs += std::abs(fv[i]);
    resabs *= std::abs(h) / 15.0;
    p.err = diff;
    if (resabs > 0.0 && diff > 0.0)
        p.err = resabs * std::min(1.0, std::pow(200.0 * diff / resabs, 1.5));
    return p;
}

} // namespace

Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opt) {
    if (a == b) return {0.0, 0.0, 0};
    std::priority_queue<Panel> heap;
    heap.push(evaluate(f, a, b));
    double total = heap.top().value;
    double toterr = heap.top().err;
    int n = 1;
    while (toterr > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
        if (n >= opt.max_intervals)
            throw NonConvergent("quadrature: interval budget exhausted, err=" +
                                std::to_string(toterr));
        Panel worst = heap.top();
        heap.pop();
        if (worst.b - worst.a < 1e-15 * std::max(1.0, std::abs(worst.a))) {
            // cannot subdivide further; accept the panel as-is
            double rest_err = toterr - worst.err;
            if (rest_err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total)))
                break;
            throw NonConvergent("quadrature: panel below resolution limit");
        }
        const double mid = 0.5 * (worst.a + worst.b);
        Panel left = evaluate(f, worst.a, mid);
        Panel right = evaluate(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        toterr += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
        ++n;
    }
    return {total, toterr, n};
}

Result integrate_singular_left(const std::function<double(double)>& f, double a,
                               double b, double alpha, const Options& opt) {
    if (alpha <= -1.0)
        throw DomainError("integrate_singular_left: alpha must exceed -1");
    if (alpha >= 0.0) return integrate(f, a, b, opt);
    // x - a = u^g with g(1 + alpha) = 4: the x^alpha term maps to u^3 and
    // every milder fractional power lands above it, so the transformed
    // integrand is C^3 at the endpoint and the panels converge fast
    const double g = 4.0 / (1.0 + alpha);
    const double ub = std::pow(b - a, 1.0 / g);
    auto transformed = [&](double u) {
        const double x = a + std::pow(u, g);
        return f(x) * g * std::pow(u, g - 1.0);
    };
    return integrate(transformed, 0.0, ub, opt);
}

double exp_tail_cutoff(double s, double poly_degree) {
    if (s <= 0.0) throw DomainError("exp_tail_cutoff: decay rate must be positive");
    double x = std::max(2.0, 45.0 / s);
    for (int it = 0; it < 4; ++it)
        x = (45.0 + std::max(0.0, poly_degree) * std::log(std::max(x, 1.0))) / s;
    return std::max(2.0, x);
}

} // namespace bsscov::quad
