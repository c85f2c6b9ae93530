#pragma once

#include <stdexcept>
#include <string>

namespace fracheat {

// Exit-code contract: 0 success, 1 tolerance failure, 2 configuration error,
// 3 numerical error.  The CLI maps exception types onto these codes.

// Invalid parameters, malformed configs, out-of-domain arguments.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Mismatched grids / array shapes.
struct shape_error : config_error {
    explicit shape_error(const std::string& msg) : config_error(msg) {}
};

// Quadrature or solver failed to reach its target; carries the achieved value.
struct numerical_error : std::runtime_error {
    double achieved;
    explicit numerical_error(const std::string& msg, double achieved_ = 0.0)
        : std::runtime_error(msg), achieved(achieved_) {}
};

enum exit_code {
    exit_ok = 0,
    exit_tolerance = 1,
    exit_config = 2,
    exit_numerical = 3,
};

} // namespace fracheat
