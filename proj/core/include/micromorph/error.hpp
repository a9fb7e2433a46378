#pragma once

#include <stdexcept>
#include <string>

namespace micromorph {

/// Operand shapes do not conform (matrix products, field shapes, ...).
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A documented precondition of an operation was violated by the caller.
class PreconditionError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An iterative method (CG, Newton, power iteration) failed to converge.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define MICROMORPH_REQUIRE(cond, ExceptionType, message)                      \
    do {                                                                       \
        if (!(cond)) {                                                         \
            throw ExceptionType(std::string(message));                         \
        }                                                                      \
    } while (false)

}  // namespace micromorph
