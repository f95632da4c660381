#pragma once

#include <stdexcept>
#include <string>

namespace nilcmc {

/// Base for all library failures that map to CLI exit codes.
struct Error : std::runtime_error {
    int exit_code;
    Error(std::string msg, int code) : std::runtime_error(std::move(msg)), exit_code(code) {}
};

/// Profile data cannot seed a solution (negative radicand, sinh too close to zero, ...).
struct InadmissibleError : Error {
    explicit InadmissibleError(std::string msg) : Error(std::move(msg), 2) {}
};

/// A transported or integrated quantity exceeded the runaway-norm guard.
struct NormGuardError : Error {
    explicit NormGuardError(std::string msg) : Error(std::move(msg), 3) {}
};

/// Malformed input: config JSON, field file, or CLI arguments.
struct ParseError : Error {
    explicit ParseError(std::string msg) : Error(std::move(msg), 4) {}
};

/// A verification gate exceeded its tolerance.
struct ToleranceError : Error {
    explicit ToleranceError(std::string msg) : Error(std::move(msg), 5) {}
};

} // namespace nilcmc
