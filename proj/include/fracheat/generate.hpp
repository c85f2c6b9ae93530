#pragma once

#include <map>
#include <string>

#include "fracheat/grid.hpp"

namespace fracheat {

// C-infinity compactly supported profile exp(-1/(1-z^2)) on |z| < 1, 0 outside.
double bump_profile(double z);
double bump_profile_deriv(double z);

// Deterministic builtin test fields.
//   constant:       c
//   mode:           amp * cos(2 pi (kx x/L [+ ky y/L] + kt t/T))
//   gaussian-bump:  amp * phi(rho), rho^2 = |x-x0|^2/wx^2 + (t-t0)^2/wt^2
//                   (radial in the scaled displacement, periodically wrapped)
//   separable-bump: amp * phi((x-x0)/wx) [* phi((y-y0)/wx)] * phi((t-t0)/wt)
// Unknown parameter keys are rejected.  Centers default to the domain middle,
// widths to a quarter period (support inside the central half of the torus).
Field generate_builtin(const std::string& name,
                       const std::map<std::string, double>& params,
                       const SpaceTimeGrid& g);

// Analytic space-time mass of a builtin (by 1-D quadrature of the profile);
// used as the generator's integral oracle.
double builtin_mass(const std::string& name, const std::map<std::string, double>& params,
                    const SpaceTimeGrid& g);

} // namespace fracheat
