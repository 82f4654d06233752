#ifndef BSSCOV_ERRORS_HPP
#define BSSCOV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bsscov {

// Typed failures. Callers either recover (series -> quadrature fallback)
// or let them surface with the offending quantity in the message.

struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct OutOfRange : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct NonConvergent : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SeriesDiverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateVariance : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientLags : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InsufficientData : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidPartition : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidModel : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SizeCap : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotPSD : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotConverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RegimeMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct MissingVolatility : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DegenerateDenominator : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateR : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonUniformGrid : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace bsscov

#endif
