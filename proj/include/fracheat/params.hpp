#pragma once

#include "fracheat/errors.hpp"

namespace fracheat {

// Fractional order s in (0,1) and the derived extension weight exponent
// a = 1-2s in (-1,1).  a is never set independently.
struct FracParams {
    double s;
    double a;
};

inline FracParams make_params(double s) {
    if (!(s > 0.0 && s < 1.0))
        throw config_error("make_params: s must lie in the open interval (0, 1), got s=" +
                           std::to_string(s));
    FracParams p;
    p.s = s;
    p.a = 1.0 - 2.0 * s;
    return p;
}

} // namespace fracheat
