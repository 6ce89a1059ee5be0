#pragma once

#include <stdexcept>
#include <string>

namespace tslab {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Expression syntax error; `offset` is the byte position in the input text.
struct ParseError : Error {
    ParseError(const std::string& msg, std::size_t offset)
        : Error(msg + " (at offset " + std::to_string(offset) + ")"), offset(offset) {}
    std::size_t offset;
};

/// Runtime evaluation failure (division by zero, non-finite result).
struct EvalError : Error {
    using Error::Error;
};

/// Argument outside the time scale / covered window.
struct DomainError : Error {
    using Error::Error;
};

/// 1 + mu*p hit zero (or I + mu*A singular) where invertibility is required.
struct RegressivityError : Error {
    using Error::Error;
};

/// Iteration failed to converge (non-contraction, missing bracket, ...).
struct ConvergenceError : Error {
    using Error::Error;
};

/// Malformed model configuration.
struct ConfigError : Error {
    using Error::Error;
};

} // namespace tslab
