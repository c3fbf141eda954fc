#ifndef PHASEQ_ERRORS_HPP
#define PHASEQ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace phaseq {

/// Base class for all phaseq errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Violated precondition or incompatible arguments (wrong dims, mixed hbar, ...).
struct ContractError : Error {
    using Error::Error;
};

/// Evaluation requested outside a map's or grid's domain of validity.
struct DomainError : Error {
    using Error::Error;
};

/// Non-finite input or loss of numerical meaning.
struct NumericError : Error {
    using Error::Error;
};

/// Iterative scheme failed to converge.
struct IntegrationError : Error {
    using Error::Error;
};

/// Text could not be parsed; carries a character position.
struct ParseError : Error {
    std::size_t position;
    ParseError(const std::string& msg, std::size_t pos)
        : Error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};

} // namespace phaseq

#endif
