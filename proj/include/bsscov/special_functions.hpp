#ifndef BSSCOV_SPECIAL_FUNCTIONS_HPP
#define BSSCOV_SPECIAL_FUNCTIONS_HPP

#include <cstdint>
#include <utility>

namespace bsscov::sf {

/// log|Gamma(x)| together with the sign of Gamma(x).
/// Thread-safe (does not touch the signgam global).
struct LogGamma {
    double log_abs;
    int sign; // +1 or -1; undefined quantities throw instead
};
LogGamma log_gamma_signed(double x);

/// Gamma(x) via log form; overflows to +-inf rather than throwing.
double gamma_fn(double x);

/// true when x is within tol of a pole of Gamma (0, -1, -2, ...)
bool near_gamma_pole(double x, double tol = 1e-8);

/// Kummer's confluent hypergeometric M(a,b,z) = sum (a)_r/(b)_r z^r/r!.
/// Truncates when the geometric tail bound drops below rel_tol of the
/// running sum; throws SeriesDiverged past max_terms.
double kummer_m(double a, double b, double z, double rel_tol = 1e-12,
                int max_terms = 600);

/// Integer square root (floor), exact for all uint64 inputs.
std::uint64_t isqrt(std::uint64_t n);

} // namespace bsscov::sf

#endif
