// errors.hpp - exception types shared by all exitwise modules.
#pragma once

#include <stdexcept>
#include <string>

namespace exitwise {

/// Invalid input: bad region, violated precondition, malformed config.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain of a closed-form expression.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Numerical failure (singular system and the like).
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace exitwise
