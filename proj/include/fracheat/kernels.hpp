#pragma once

#include <vector>

#include "fracheat/grid.hpp"
#include "fracheat/params.hpp"

namespace fracheat {

// Gauss-Weierstrass kernel W(x,t) = (4 pi t)^{-n/2} exp(-|x|^2/(4t)) for t>0,
// extended by 0 for t <= 0.
double eval_W(int n, const std::vector<double>& x, double t);

struct HeatKernelEval {
    int n = 1;
    double operator()(const std::vector<double>& x, double t) const { return eval_W(n, x, t); }
};

// Extension Poisson kernel
//   Gamma_y(x,t) = c(s) y^{1-a} t^{-1-s} W(x,t) exp(-y^2/(4t)),  t > 0,
// with c(s) = 1/(4^s Gamma(s)) normalized to unit space-time mass
// (this also keeps the kernel positive).
double extension_normalization(const FracParams& p);
double eval_Gamma(double y, const std::vector<double>& x, double t,
                  const FracParams& p, int n = 1);

struct ExtensionKernelEval {
    FracParams params;
    int n = 1;
    double normalization_constant = 0.0;
    double operator()(double y, const std::vector<double>& x, double t) const {
        return eval_Gamma(y, x, t, params, n);
    }
};

inline ExtensionKernelEval make_extension_kernel(const FracParams& p, int n = 1) {
    return ExtensionKernelEval{p, n, extension_normalization(p)};
}

// Total mass of Gamma_y: reduces (independently of y) to the 1-D integral
// int_0^inf t^{-1-s} e^{-1/(4t)} dt = 4^s int_0^inf u^{s-1} e^{-u} du, which
// is evaluated by an alternating series on (0,1] plus 64-point Gauss-Laguerre
// on the smooth remainder, then multiplied by the normalization constant.
double kernel_mass(double y, const FracParams& p);

// Space-time symbol of Gamma_y at A = |xi|^2 + i*omega:
//   G(y;A) = c(s) y^{2s} int_0^inf sigma^{-1-s} e^{-y^2/(4 sigma)} e^{-A sigma} dsigma,
// computed on the ray rotated by -arg(A)/2 with a log-variable trapezoid rule.
// G(y;0) = 1 exactly and G(0;A) = 1 by convention (trace row).
cplx ext_symbol(double y, cplx A, double s);

// Per-mode symbol table of Gamma_y over the grid frequencies.
std::vector<cplx> ext_symbol_table(const SpaceTimeGrid& g, const FracParams& p, double y);

// Convolution Gamma_y * f on the torus via the symbol table.
Field convolve_gamma(const Field& f, const FracParams& p, double y);

// sup-norm of (Gamma_y * f) - f for each probe height; decreasing toward 0
// for smooth f (delta-family diagnostic).
std::vector<double> delta_limit_check(const Field& f, const std::vector<double>& y_sequence,
                                      const FracParams& p);

} // namespace fracheat
