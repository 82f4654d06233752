#ifndef BSSCOV_QUADRATURE_HPP
#define BSSCOV_QUADRATURE_HPP

#include <functional>

namespace bsscov::quad {

struct Options {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;     // pure relative by default
    int max_intervals = 4000;
};

struct Result {
    double value = 0.0;
    double error_estimate = 0.0;
    int intervals = 0;
};

/// Adaptive Gauss-Kronrod 7-15 on a finite interval. Throws NonConvergent
/// when the interval budget is exhausted before the tolerance is met.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opt = {});

/// Same, but the integrand has an x^alpha endpoint singularity at a
/// (alpha in (-1,0)); removed by the substitution x = a + u^(1/(1+alpha)).
Result integrate_singular_left(const std::function<double(double)>& f, double a,
                               double b, double alpha, const Options& opt = {});

/// Cutoff X with s*X - poly_degree*log(X) >= 45, so exp tails past X are
/// below ~3e-20 relative to the integrand scale at X.
double exp_tail_cutoff(double s, double poly_degree);

} // namespace bsscov::quad

#endif
