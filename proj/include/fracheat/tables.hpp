#pragma once

#include <functional>
#include <vector>

#include "fracheat/grid.hpp"

namespace fracheat {

// Builds a per-mode factor table over the grid's discrete frequencies from a
// generator evaluated only at omega >= 0.  Negative time frequencies receive
// the conjugate value (so real fields stay real bit-exactly) and the even-Nt
// time-Nyquist row stores the real part (the symmetric average of the +/-
// Nyquist values).  Spatial dependence must be through |xi|^2, which is even.
std::vector<cplx> build_mode_table(const SpaceTimeGrid& g,
                                   const std::function<cplx(double xi2, double omega)>& gen);

// Pointwise multiply coefficients by a table built as above.
std::vector<cplx> apply_table(const std::vector<cplx>& coeffs,
                              const std::vector<cplx>& table);

} // namespace fracheat
