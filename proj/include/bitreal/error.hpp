#pragma once

#include <stdexcept>
#include <string>

namespace bitreal {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input text that is not a dyadic rational (or malformed).
struct ParseError : Error {
    using Error::Error;
};

// Argument certifiably outside an operation's domain.
struct DomainError : Error {
    using Error::Error;
};

// A divisor (or other quantity) could not be separated from zero
// within the configured probe budget.
struct SeparationError : Error {
    using Error::Error;
};

// A certified tolerance could not be reached within a configured
// sample/level/iteration budget.
struct BudgetError : Error {
    using Error::Error;
};

} // namespace bitreal
