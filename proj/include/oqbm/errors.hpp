#pragma once

#include <stdexcept>
#include <string>

namespace oqbm {

// Malformed or inconsistent user input (config files, CLI values).
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Runtime numerical failure: CFL violation, divergent quadrature, unstable
// integration, non-finite field values.
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace oqbm
