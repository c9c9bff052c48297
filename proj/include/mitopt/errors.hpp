#pragma once

#include <stdexcept>
#include <string>

namespace mitopt {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Argument outside the mathematical domain (mean outside the family's
// mean domain, invalid parameter signs, and the like).
struct DomainError : Error {
    using Error::Error;
};

// Value outside an admissible numeric range (negative counts, bad bounds).
struct RangeError : Error {
    using Error::Error;
};

// Stimuli not strictly increasing where they must be.
struct OrderError : Error {
    using Error::Error;
};

// A formula was evaluated too close to a removable singularity.
struct PrecisionError : Error {
    using Error::Error;
};

// The requested problem has no admissible solution (degenerate stimulus
// window, intercept requirements violated, mean domain violated).
struct InfeasibleError : Error {
    using Error::Error;
};

// Root bracketing or iteration failed; usually means a placement
// condition was violated somewhere the endpoint checks did not look.
struct ConvergenceError : Error {
    using Error::Error;
};

// A grid search would exceed the configured cell budget.
struct BudgetError : Error {
    using Error::Error;
};

// Invalid run configuration (nonpositive dispersion, zero replicates...).
struct ConfigError : Error {
    using Error::Error;
};

// Maximum-likelihood iteration did not converge within the iteration cap.
struct NonConvergenceError : Error {
    using Error::Error;
};

// Fisher information is numerically singular at the current iterate.
struct SingularInformationError : Error {
    using Error::Error;
};

// Requested combination is outside what the method supports.
struct UnsupportedError : Error {
    using Error::Error;
};

}  // namespace mitopt
