#pragma once

#include <map>
#include <string>
#include <vector>

#include "fracheat/grid.hpp"
#include "fracheat/params.hpp"

namespace fracheat {

// Spectral multiplier m(xi, omega) = (|xi|^2 + i omega)^s on the discrete
// frequencies (principal branch, m(0,0) = 0, conjugate symmetric).  s = 1 is
// admitted as an internal test mode where m reduces to |xi|^2 + i omega,
// i.e. the symbol of d/dt - Laplacian.
struct Multiplier {
    double s = 0.0;
    SpaceTimeGrid grid;
    std::vector<cplx> table;
};

Multiplier make_multiplier(const SpaceTimeGrid& g, double s);
Field apply_multiplier(const Field& f, const Multiplier& m);

Field apply_spectral(const Field& f, const FracParams& p);
// Internal test mode (allows s in (0,1]).
Field apply_spectral_raw(const Field& f, double s);

// Quadrature rule for the time-lag integral of the hypersingular route:
// graded composite Gauss nodes on [0, T_cut] plus the analytic remainder
// beyond T_cut (handled inside apply_singular).
struct SingularQuadRule {
    double T_cut = 0.0;
    double gamma = 0.0;
    std::vector<double> nodes;
    std::vector<double> weights;
    double R_cut = 0.0;
};

SingularQuadRule make_singular_rule(const FracParams& p, const SpaceTimeGrid& g,
                                    int refine = 1);

// Per-mode factor int_0^inf (1 - e^{-A sigma}) sigma^{-1-s} dsigma evaluated
// as graded rule on [0,X] + X^{-s}/s - upper_tail(A,X); equals -Gamma(-s) A^s.
cplx singular_mode_factor(cplx A, double s, const SingularQuadRule& rule);

// Hypersingular route: (s/Gamma(1-s)) int_0^inf [f(x,t) - (e^{sigma Lap} f)(x, t-sigma)]
// sigma^{-1-s} dsigma, the spatial smoothing applied spectrally.  If
// verify_tol > 0, recompute on a refined rule and require relative agreement.
Field apply_singular(const Field& f, const FracParams& p, const SingularQuadRule& rule,
                     double verify_tol = 0.0);

// Default dyadic probe heights for the extension route trace.
std::vector<double> default_probe_heights(const SpaceTimeGrid& g);

// Exponent set and least-squares weights for extrapolating the trace
// quotient D(y) = -C (u(.,y,.) - f)/y^{2s} to y = 0.  The small-y expansion
// runs over powers {0, 2-2s, 2, 4-2s, 4}.
std::vector<double> trace_fit_weights(const std::vector<double>& probes, double s);

// Neumann calibration constant fitted on the fixed single mode (kx=1, kt=1).
double calibrate_extension_constant(const SpaceTimeGrid& g, const FracParams& p,
                                    const std::vector<double>& probes);
// Least-squares calibration against apply_spectral on an arbitrary field.
double calibrate_extension_on(const Field& f, const FracParams& p,
                              const std::vector<double>& probes);
// Closed-form constant 4^s Gamma(1+s)/Gamma(1-s) (C(1/2) = 1); used as a
// secondary oracle for the fitted constant.
double extension_constant_theory(double s);

// Extension route: Poisson-extend to the probe heights, form the trace
// quotients, extrapolate to y = 0, scale by the calibrated constant.
Field apply_extension_route(const Field& f, const FracParams& p,
                            const std::vector<double>& y_probe);

// Brute-force single-point evaluation of the hypersingular integral by
// nested quadrature (graded in the time lag, tensor Gauss in x'); slow,
// ground truth only.
cplx oracle_singular(const Field& f, const FracParams& p,
                     const std::vector<double>& x, double t);

struct RouteReport {
    struct PairError {
        double sup_rel = 0.0;
        double l2_rel = 0.0;
    };
    std::vector<std::string> route_names;
    std::map<std::string, Field> outputs;
    std::map<std::string, PairError> pairwise; // key "a|b" with a < b
    std::map<std::string, double> calibration;
};

RouteReport consistency_report(const Field& f, const FracParams& p);

} // namespace fracheat
