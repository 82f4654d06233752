#ifndef BSSCOV_STATS_HPP
#define BSSCOV_STATS_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace bsscov::stats {

double mean(std::span<const double> x);
double variance(std::span<const double> x); // unbiased
double standard_error_of_mean(std::span<const double> x);

/// SE of the sample variance from the asymptotic fourth-moment formula
/// sqrt((m4 - m2^2) / M).
double variance_se(std::span<const double> x);

/// Sample covariance of paired samples and its SE sqrt((m22 - c^2)/M).
double covariance(std::span<const double> x, std::span<const double> y);
double covariance_se(std::span<const double> x, std::span<const double> y);

/// Bootstrap SE of the sample variance (fallback when kurtosis estimates
/// are unstable); deterministic given the seed.
double bootstrap_variance_se(std::span<const double> x, int resamples,
                             std::uint64_t seed);

struct JarqueBera {
    double statistic;
    double skewness;
    double excess_kurtosis;
    double p_value; // exact chi^2_2 tail: exp(-JB/2)
};
JarqueBera jarque_bera(std::span<const double> x);

struct KsResult {
    double statistic;
    double p_value; // asymptotic Kolmogorov law
};
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// OLS slope of y against x.
double ols_slope(std::span<const double> x, std::span<const double> y);

} // namespace bsscov::stats

#endif
