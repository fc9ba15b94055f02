#ifndef FDLAB_ERRORS_HPP
#define FDLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fdlab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : Error { using Error::Error; };

// A documented precondition was violated by the caller.
struct PreconditionError : Error { using Error::Error; };

// A series has no convergent evaluation path for the given inputs.
struct DivergenceError : Error { using Error::Error; };

// The requested tolerance is unreachable within the term budget.
struct ToleranceError : Error { using Error::Error; };

// Declared growth bound of a sequence fails a spot check.
struct GrowthViolationError : Error { using Error::Error; };

struct NotHermitianError : Error { using Error::Error; };
struct NotCoerciveError : Error { using Error::Error; };
struct NotContractError : Error { using Error::Error; };
struct DepthError : Error { using Error::Error; };
struct InconsistencyError : Error { using Error::Error; };
struct SpectralRadiusError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

} // namespace fdlab

#endif
