#include "bsscov/stats.hpp"
#include "bsscov/errors.hpp"
#include "bsscov/rng.hpp"

#include <algorithm>
#include <cmath>

namespace bsscov::stats {

double mean(std::span<const double> x) {
    if (x.empty()) throw InsufficientData("mean: empty sample");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

namespace {
// central moments m2..m4 in one pass over deviations
struct Moments {
    double m2, m3, m4;
    std::size_t n;
};
Moments central_moments(std::span<const double> x) {
    const double mu = mean(x);
    double m2 = 0, m3 = 0, m4 = 0;
    for (double v : x) {
        const double d = v - mu;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    const double n = static_cast<double>(x.size());
    return {m2 / n, m3 / n, m4 / n, x.size()};
}
} // namespace

double variance(std::span<const double> x) {
    if (x.size() < 2) throw InsufficientData("variance: need at least 2 samples");
    const Moments m = central_moments(x);
    return m.m2 * static_cast<double>(m.n) / static_cast<double>(m.n - 1);
}

double standard_error_of_mean(std::span<const double> x) {
    return std::sqrt(variance(x) / static_cast<double>(x.size()));
}

double variance_se(std::span<const double> x) {
    if (x.size() < 4) throw InsufficientData("variance_se: need at least 4 samples");
    const Moments m = central_moments(x);
    const double v = std::max(0.0, m.m4 - m.m2 * m.m2);
    return std::sqrt(v / static_cast<double>(m.n));
}

double covariance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw InsufficientData("covariance: mismatched or tiny samples");
    const double mx = mean(x), my = mean(y);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - mx) * (y[i] - my);
    return s / static_cast<double>(x.size() - 1);
}

double covariance_se(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 4)
        throw InsufficientData("covariance_se: mismatched or tiny samples");
    const double mx = mean(x), my = mean(y);
    const double n = static_cast<double>(x.size());
    double c = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) c += (x[i] - mx) * (y[i] - my);
    c /= n;
    double m22 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        m22 += dx * dx * dy * dy;
    }
    m22 /= n;
    return std::sqrt(std::max(0.0, m22 - c * c) / n);
}

double bootstrap_variance_se(std::span<const double> x, int resamples,
                             std::uint64_t seed) {
    if (x.size() < 4) throw InsufficientData("bootstrap_variance_se: tiny sample");
    Philox4x32 gen(substream_key(seed, 0, 0xB007));
    const std::size_t n = x.size();
    std::vector<double> vars(static_cast<std::size_t>(resamples));
    std::vector<double> resample(n);
    for (int b = 0; b < resamples; ++b) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = static_cast<std::size_t>(gen.next_u01() * static_cast<double>(n));
            resample[i] = x[std::min(j, n - 1)];
        }
        vars[static_cast<std::size_t>(b)] = variance(resample);
    }
    return std::sqrt(variance(vars) * (static_cast<double>(resamples) - 1.0) /
                     static_cast<double>(resamples));
}

JarqueBera jarque_bera(std::span<const double> x) {
    if (x.size() < 8) throw InsufficientData("jarque_bera: tiny sample");
    const Moments m = central_moments(x);
    const double s = m.m3 / std::pow(m.m2, 1.5);
    const double k = m.m4 / (m.m2 * m.m2) - 3.0;
    const double n = static_cast<double>(m.n);
    const double jb = n * (s * s / 6.0 + k * k / 24.0);
    return {jb, s, k, std::exp(-jb / 2.0)};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.size() < 8 || b.size() < 8) throw InsufficientData("ks_two_sample: tiny sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double en = std::sqrt(na * nb / (na + nb));
    const double lambda = (en + 0.12 + 0.11 / en) * d;
    double p = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        p += sign * term;
        sign = -sign;
        if (term < 1e-12) break;
    }
    return {d, std::clamp(2.0 * p, 0.0, 1.0)};
}

double ols_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw InsufficientData("ols_slope: mismatched or tiny samples");
    const double mx = mean(x), my = mean(y);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw DegenerateDenominator("ols_slope: zero x-variance");
    return sxy / sxx;
}

} // namespace bsscov::stats
