#pragma once

#include <stdexcept>
#include <string>

namespace apsel {

/// Bad or inconsistent configuration; reported before any simulation work.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numeric argument outside the domain of a model function.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Caller broke a documented precondition (e.g. reward outside [0, 1]).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace apsel
