#include "bsscov/kernel.hpp"
#include "bsscov/errors.hpp"
#include "bsscov/special_functions.hpp"
#include "bsscov/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bsscov {

GammaKernel::GammaKernel(double d, double l) : delta(d), lambda(l) {
    if (!(l > 0.0) || !std::isfinite(l))
        throw DomainError("GammaKernel: lambda must be positive and finite");
    if (!(d > -0.5) || !std::isfinite(d))
        throw DomainError("GammaKernel: delta must exceed -1/2 (square-integrability)");
}

double GammaKernel::operator()(double t) const {
    if (t <= 0.0) return 0.0;
    return std::pow(t, delta) * std::exp(-lambda * t);
}

double gamma_eval(const GammaKernel& k, double t) { return k(t); }

KernelSpec::KernelSpec(int p_, std::vector<std::optional<GammaKernel>> cells_)
    : p(p_), cells(std::move(cells_)) {
    if (p < 1) throw DomainError("KernelSpec: p must be positive");
    if (cells.size() != static_cast<std::size_t>(p) * static_cast<std::size_t>(p))
        throw DimensionMismatch("KernelSpec: grid must be exactly p x p");
    bool any = false;
    for (const auto& c : cells) any = any || c.has_value();
    if (!any) throw DomainError("KernelSpec: all cells are zero kernels");
}

KernelSpec KernelSpec::single(double delta, double lambda) {
    return KernelSpec(1, {GammaKernel(delta, lambda)});
}

KernelSpec KernelSpec::identical_diagonal(int p, double delta, double lambda) {
    std::vector<std::optional<GammaKernel>> cells(
        static_cast<std::size_t>(p) * static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i)
        cells[static_cast<std::size_t>(i) * p + i] = GammaKernel(delta, lambda);
    return KernelSpec(p, std::move(cells));
}

KernelSpec KernelSpec::identical_full(int p, double delta, double lambda) {
    std::vector<std::optional<GammaKernel>> cells(
        static_cast<std::size_t>(p) * static_cast<std::size_t>(p),
        GammaKernel(delta, lambda));
    return KernelSpec(p, std::move(cells));
}

const std::optional<GammaKernel>& KernelSpec::at(int i, int j) const {
    if (i < 1 || i > p || j < 1 || j > p)
        throw OutOfRange("KernelSpec::at: index outside 1..p");
    return cells[static_cast<std::size_t>(i - 1) * p + (j - 1)];
}

bool KernelSpec::is_diagonal() const {
    for (int i = 1; i <= p; ++i)
        for (int j = 1; j <= p; ++j)
            if (i != j && at(i, j).has_value()) return false;
    return true;
}

// ---------------------------------------------------------------------------

double cross_moment(const GammaKernel& ki, const GammaKernel& kj, double h,
                    const quad::Options& opt) {
    if (h < 0.0) return cross_moment(kj, ki, -h, opt);
    const double s = ki.lambda + kj.lambda;
    auto f = [&](double x) { return ki(x + h) * kj(x); };
    const double cut = quad::exp_tail_cutoff(
        s, std::max(ki.delta, 0.0) + std::max(kj.delta, 0.0));
    // singular exponent of the integrand at x = 0
    const double alpha = kj.delta + (h == 0.0 ? ki.delta : 0.0);
    double total = 0.0;
    const double split = std::min(1.0, cut);
    if (alpha < 0.0)
        total += quad::integrate_singular_left(f, 0.0, split, alpha, opt).value;
    else
        total += quad::integrate(f, 0.0, split, opt).value;
    if (cut > split) total += quad::integrate(f, split, cut, opt).value;
    return total;
}

double cross_moment_series(const GammaKernel& ki, const GammaKernel& kj, double h,
                           const SeriesControl& ctl) {
    if (h < 0.0) return cross_moment_series(kj, ki, -h, ctl);
    const double di = ki.delta, dj = kj.delta;
    const double s = ki.lambda + kj.lambda;
    const double xg = di + dj + 1.0; // growth exponent, > 0 for valid kernels
    if (di == 0.0 && dj == 0.0) return std::exp(-ki.lambda * h) / s; // exponential kernels
    if (h == 0.0) return sf::gamma_fn(xg) * std::pow(s, -xg);
    const double z = s * h;
    if (z > ctl.max_z)
        throw SeriesDiverged("cross_moment_series: s*h too large for stable series");
    const bool pole_num = sf::near_gamma_pole(-xg, ctl.pole_tol);
    const bool pole_den = sf::near_gamma_pole(-di, ctl.pole_tol);
    double term1 = 0.0;
    if (pole_num)
        // Gamma(-x) pole not cancelled analytically here; matched delta = 0
        // and half-integer sums land in this branch.
        throw SeriesDiverged("cross_moment_series: Gamma pole at -" +
                             std::to_string(xg));
    // downstream three-point differencing amplifies roundoff by the
    // cancellation ratio, so the per-value tails run well under rel_tol
    const double ktol = std::min(ctl.rel_tol, 1e-13);
    if (!pole_den) {
        const auto g1 = sf::log_gamma_signed(dj + 1.0);
        const auto g2 = sf::log_gamma_signed(-xg);
        const auto g3 = sf::log_gamma_signed(-di);
        const double a_log = g1.log_abs + g2.log_abs - g3.log_abs;
        const int a_sign = g1.sign * g2.sign * g3.sign;
        const double m1 = sf::kummer_m(dj + 1.0, xg + 1.0, z, ktol, ctl.max_terms);
        term1 = a_sign * std::exp(a_log + xg * std::log(h)) * m1;
    }
    const double m2 = sf::kummer_m(-di, 1.0 - xg, z, ktol, ctl.max_terms);
    const double term2 = sf::gamma_fn(xg) * std::pow(s, -xg) * m2;
    return std::exp(-ki.lambda * h) * (term1 + term2);
}

double core_autocovariance(const KernelSpec& spec, int i, int j, double h,
                           const quad::Options& opt) {
    if (h < 0.0) return core_autocovariance(spec, j, i, -h, opt);
    double sum = 0.0;
    for (int l = 1; l <= spec.p; ++l) {
        const auto& gi = spec.at(i, l);
        const auto& gj = spec.at(j, l);
        if (gi && gj) sum += cross_moment(*gi, *gj, h, opt);
    }
    return sum;
}

// ---------------------------------------------------------------------------

double increment_cov_quad(const GammaKernel& ga, const GammaKernel& gb, long n,
                          long k, const quad::Options& opt) {
    if (n < 1) throw DomainError("increment_cov_quad: n must be >= 1");
    if (k < 0) return increment_cov_quad(gb, ga, n, -k, opt);
    const double dn = 1.0 / static_cast<double>(n);
    auto f = [&](double w) {
        const double a = ga(w) - ga(w - dn);
        const double b = gb(w + static_cast<double>(k) * dn) -
                         gb(w + static_cast<double>(k - 1) * dn);
        return a * b;
    };
    // integrable singularities: at w = 0 from ga(w) (and gb(w) when the lag
    // window reaches it), and at w = dn where ga(w - dn) enters its support
    double alpha0 = ga.delta;
    if (k <= 1 && gb.delta < 0.0) alpha0 += gb.delta;
    if (k == 0 && gb.delta > 0.0) alpha0 += gb.delta;
    double alpha1 = std::min(ga.delta, 0.0);
    if (k == 0) alpha1 += std::min(gb.delta, 0.0);
    const double s = ga.lambda + gb.lambda;
    const double cut = quad::exp_tail_cutoff(
        s, std::max(ga.delta, 0.0) + std::max(gb.delta, 0.0));
    quad::Options o = opt;
    o.rel_tol = std::min(opt.rel_tol, 1e-11);
    double total = 0.0;
    // (0, dn]: singularity at w = 0
    if (alpha0 < 0.0)
        total += quad::integrate_singular_left(f, 0.0, std::min(dn, cut), alpha0, o).value;
    else
        total += quad::integrate(f, 0.0, std::min(dn, cut), o).value;
    if (cut <= dn) return total;
    // [dn, 2dn]: singularity at w = dn; integrate in the offset t = w - dn,
    // keeping the distance to the singular point exact (w rounded against dn
    // would otherwise snap the kernel onto its support edge)
    {
        const double hi = std::min(dn, cut - dn);
        auto ft = [&](double tt) {
            const double a = ga(dn + tt) - ga(tt);
            const double b = gb(tt + static_cast<double>(k + 1) * dn) -
                             gb(tt + static_cast<double>(k) * dn);
            return a * b;
        };
        if (alpha1 < 0.0)
            total += quad::integrate_singular_left(ft, 0.0, hi, alpha1, o).value;
        else
            total += quad::integrate(ft, 0.0, hi, o).value;
    }
    // smooth remainder
    double lo = 2.0 * dn;
    for (double edge : {std::min(1.0, cut), cut}) {
        if (edge <= lo) continue;
        total += quad::integrate(f, lo, edge, o).value;
        lo = edge;
    }
    return total;
}

double increment_cov_series(const GammaKernel& ga, const GammaKernel& gb, long n,
                            long k, const SeriesControl& ctl) {
    if (k < 0) return increment_cov_series(gb, ga, n, -k, ctl);
    const double dn = 1.0 / static_cast<double>(n);
    // E[D1 Ga * D(1+k) Gb] = 2 C_ba(k dn) - C_ba((k-1) dn) - C_ba((k+1) dn),
    // C_ba(h) = int gb(x+h) ga(x) dx, negative h through the swap.
    auto C = [&](double h) {
        if (h >= 0.0) return cross_moment_series(gb, ga, h, ctl);
        return cross_moment_series(ga, gb, -h, ctl);
    };
    return 2.0 * C(k * dn) - C((k - 1) * dn) - C((k + 1) * dn);
}

double increment_cov(const GammaKernel& ga, const GammaKernel& gb, long n, long k) {
    try {
        return increment_cov_series(ga, gb, n, k);
    } catch (const SeriesDiverged&) {
        return increment_cov_quad(ga, gb, n, k);
    }
}

namespace {

double component_increment_cov(const KernelSpec& spec, long n, int i, int j, long k) {
    double sum = 0.0;
    for (int l = 1; l <= spec.p; ++l) {
        const auto& gi = spec.at(i, l);
        const auto& gj = spec.at(j, l);
        if (gi && gj) sum += increment_cov(*gi, *gj, n, k);
    }
    return sum;
}

} // namespace

double increment_correlation(const KernelSpec& spec, long n, int i, int j, long k) {
    if (n < 1 || k < 0) throw DomainError("increment_correlation: need n >= 1, k >= 0");
    if (i == j && k == 0) return 1.0;
    const double vi = component_increment_cov(spec, n, i, i, 0);
    const double vj = component_increment_cov(spec, n, j, j, 0);
    if (!(vi > 0.0) || !(vj > 0.0))
        throw DegenerateVariance("increment_correlation: nonpositive increment variance");
    return component_increment_cov(spec, n, i, j, k) / std::sqrt(vi * vj);
}

double limiting_correlation(double delta, long k) {
    if (!(delta > -0.5 && delta < 0.5))
        throw DomainError("limiting_correlation: delta outside (-1/2, 1/2)");
    if (k < 1) throw OutOfRange("limiting_correlation: lag must be >= 1");
    const double x = 2.0 * delta + 1.0;
    const double kd = static_cast<double>(k);
    const double km = (k == 1) ? 0.0 : std::pow(kd - 1.0, x);
    return (std::pow(kd + 1.0, x) + km - 2.0 * std::pow(kd, x)) / 2.0;
}

double series_numerator(const KernelSpec& spec, long n, int i, int j, long k,
                        const SeriesControl& ctl) {
    if (n < 1 || k < 0) throw DomainError("series_numerator: need n >= 1, k >= 0");
    double sum = 0.0;
    for (int l = 1; l <= spec.p; ++l) {
        const auto& gi = spec.at(i, l);
        const auto& gj = spec.at(j, l);
        if (gi && gj) sum += increment_cov_series(*gi, *gj, n, k, ctl);
    }
    return sum;
}

// ---------------------------------------------------------------------------

std::string to_string(CorrRegime r) {
    switch (r) {
        case CorrRegime::CaseI: return "CaseI";
        case CorrRegime::CaseIIBar: return "CaseII-bar";
        case CorrRegime::CaseIITilde: return "CaseII-tilde";
    }
    return "?";
}

double CorrelationTable::at(int i, int j, long k) const {
    if (i < 1 || i > p || j < 1 || j > p || k < 0 || k > max_lag)
        throw OutOfRange("CorrelationTable::at");
    return entries[static_cast<std::size_t>(i - 1) * p + (j - 1)]
                  [static_cast<std::size_t>(k)];
}

// build_correlation_table lives in gaussian_family.cpp (needs the derived
// component machinery for the bar/tilde normalizations).

A2Diagnostic check_assumption_squared_correlations(const CorrelationTable& table,
                                                   long K) {
    if (K < 10) throw InsufficientLags("check_assumption_squared_correlations: K < 10");
    K = std::min(K, table.max_lag);
    A2Diagnostic d{};
    double worst_exponent = -std::numeric_limits<double>::infinity();
    double sum_half = 0.0, sum_full = 0.0, max_tail = 0.0;
    for (int i = 1; i <= table.p; ++i) {
        for (int j = 1; j <= table.p; ++j) {
            double sh = 0.0, sfull = 0.0;
            std::vector<double> lx, ly;
            for (long k = 1; k <= K; ++k) {
                const double r2 = table.at(i, j, k) * table.at(i, j, k);
                sfull += r2;
                if (k <= K / 2) sh += r2;
                if (k >= K / 4 && r2 > 1e-280) {
                    lx.push_back(std::log(static_cast<double>(k)));
                    ly.push_back(std::log(r2));
                }
            }
            sum_half = std::max(sum_half, sh);
            sum_full = std::max(sum_full, sfull);
            max_tail = std::max(max_tail, sfull - sh);
            if (lx.size() >= 8)
                worst_exponent = std::max(worst_exponent, stats::ols_slope(lx, ly));
        }
    }
    d.partial_sum_half = sum_half;
    d.partial_sum_full = sum_full;
    d.summand_exponent = std::isfinite(worst_exponent) ? worst_exponent : -1e9;
    // summability evidence: power-law tail below -1, or a tail mass already
    // negligible (exponential decay plateaus the log-log fit at small lags)
    const bool tiny_tail = max_tail < 1e-5;
    d.strict_pass = d.summand_exponent < -1.0 || tiny_tail;
    d.note = d.strict_pass ? "square-summability supported at this (n,K)"
                           : "tail exponent >= -1: partial sums not Cauchy at this K";
    // Closed-form section-7 reference bound sum_k (2k^x-(k-1)^x-(k+1)^x)^2/(16 k^2x),
    // summand ~ k^-4, so the K-term truncation is already converged.
    const double x = 2.0 * table.delta_hint + 1.0;
    double bound = 0.0;
    for (long k = 1; k <= K; ++k) {
        const double kd = static_cast<double>(k);
        const double km = (k == 1) ? 0.0 : std::pow(kd - 1.0, x);
        const double num = 2.0 * std::pow(kd, x) - km - std::pow(kd + 1.0, x);
        bound += num * num / (16.0 * std::pow(kd, 2.0 * x));
    }
    d.paper_bound = bound;
    return d;
}

PiDecayDiagnostic check_assumption_pi_decay(const GammaKernel& k,
                                            const std::vector<long>& n_grid,
                                            const std::vector<double>& kappa_grid) {
    if (n_grid.size() < 2) throw InsufficientData("check_assumption_pi_decay: n grid");
    for (double kap : kappa_grid)
        if (!(kap > 0.0 && kap < 1.0))
            throw DomainError("check_assumption_pi_decay: kappa must lie in (0,1)");
    PiDecayDiagnostic d;
    d.n_grid = n_grid;
    d.kappa_grid = kappa_grid;
    double worst = -std::numeric_limits<double>::infinity();
    for (double kap : kappa_grid) {
        std::vector<double> row, lx, ly;
        for (long n : n_grid) {
            const double eps = std::pow(static_cast<double>(n), -kap);
            const double v = pi_n_tail_mass(k, n, eps);
            row.push_back(v);
            lx.push_back(std::log(static_cast<double>(n)));
            ly.push_back(std::log(std::max(v, 1e-300)));
        }
        d.pi_values.push_back(row);
        const double slope = stats::ols_slope(lx, ly);
        worst = std::max(worst, slope / (1.0 - kap));
    }
    d.fitted_lambda = worst;
    d.strict_pass = worst < -1.0;
    return d;
}

double pi_n_tail_mass(const GammaKernel& k, long n, double eps) {
    if (n < 1) throw DomainError("pi_n_tail_mass: n >= 1");
    if (eps < 0.0) throw DomainError("pi_n_tail_mass: eps >= 0");
    const double dn = 1.0 / static_cast<double>(n);
    auto f = [&](double s) {
        const double d = k(s + dn) - k(s);
        return d * d;
    };
    const double cut = quad::exp_tail_cutoff(2.0 * k.lambda, 2.0 * std::max(k.delta, 0.0));
    quad::Options opt;
    opt.rel_tol = 1e-9;
    auto piece = [&](double a, double b) {
        if (b <= a) return 0.0;
        if (a == 0.0 && k.delta < 0.0)
            return quad::integrate_singular_left(f, a, b, 2.0 * k.delta, opt).value;
        return quad::integrate(f, a, b, opt).value;
    };
    double denom = 0.0;
    double lo = 0.0;
    for (double edge : {std::min(dn, cut), std::min(1.0, cut), cut}) {
        if (edge <= lo) continue;
        denom += piece(lo, edge);
        lo = edge;
    }
    if (!(denom > 0.0)) throw DegenerateVariance("pi_n_tail_mass: zero denominator");
    if (eps >= cut) return 0.0;
    double num = 0.0;
    lo = eps;
    for (double edge : {std::min(dn, cut), std::min(1.0, cut), cut}) {
        if (edge <= lo) continue;
        num += (lo == 0.0 && k.delta < 0.0)
                   ? quad::integrate_singular_left(f, lo, edge, 2.0 * k.delta, opt).value
                   : quad::integrate(f, lo, edge, opt).value;
        lo = edge;
    }
    return num / denom;
}

} // namespace bsscov
