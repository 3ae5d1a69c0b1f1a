#pragma once

#include <stdexcept>
#include <string>

namespace becnet {

/// Malformed configuration, spec file, or pattern file.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Integrator blow-up, NaN detection, or size-guard violation.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace becnet
