#include "bsscov/special_functions.hpp"
#include "bsscov/errors.hpp"

#include <cmath>

namespace bsscov::sf {

LogGamma log_gamma_signed(double x) {
    if (x > 0.0) return {std::lgamma(x), +1};
    if (x == std::floor(x))
        throw DomainError("log_gamma_signed: pole at nonpositive integer " +
                          std::to_string(x));
    // Gamma alternates sign between consecutive nonpositive integers:
    // negative on (-1,0), positive on (-2,-1), ...
    const double k = std::ceil(-x);
    const int sign = (static_cast<long long>(k) % 2 == 1) ? -1 : +1;
    return {std::lgamma(x), sign};
}

double gamma_fn(double x) {
    const LogGamma lg = log_gamma_signed(x);
    return lg.sign * std::exp(lg.log_abs);
}

bool near_gamma_pole(double x, double tol) {
    if (x > 0.5) return false;
    return std::abs(x - std::round(x)) < tol;
}

double kummer_m(double a, double b, double z, double rel_tol, int max_terms) {
    if (near_gamma_pole(b))
        throw SeriesDiverged("kummer_m: b at or near a nonpositive integer");
    double term = 1.0;
    double sum = 1.0;
    for (int r = 0; r < max_terms; ++r) {
        const double ratio = (a + r) * z / ((b + r) * (r + 1.0));
        term *= ratio;
        sum += term;
        const double q = std::abs((a + r + 1) * z / ((b + r + 1) * (r + 2.0)));
        if (q < 1.0) {
            const double tail = std::abs(term) * q / (1.0 - q);
            if (tail <= rel_tol * std::abs(sum) && std::abs(term) <= rel_tol * std::abs(sum))
                return sum;
        }
    }
    throw SeriesDiverged("kummer_m: term budget exhausted (z=" + std::to_string(z) + ")");
}

std::uint64_t isqrt(std::uint64_t n) {
    if (n == 0) return 0;
    std::uint64_t x = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    while (x > 0 && x * x > n) --x;
    while ((x + 1) * (x + 1) <= n) ++x;
    return x;
}

} // namespace bsscov::sf
