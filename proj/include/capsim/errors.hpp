#pragma once

#include <stdexcept>
#include <string>

namespace capsim {

/// Invalid argument or configuration (bad sizes, out-of-range counts, violated preconditions).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of a special function.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A computed quantity failed its own consistency check (residual, normalization, series tail).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Intensity vector is outside the regime an operation is defined for.
class RegimeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace capsim

namespace capsim {

/// Malformed or inconsistent experiment configuration; the CLI exits with code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace capsim
