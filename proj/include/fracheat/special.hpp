#pragma once

#include <complex>
#include <vector>

#include "fracheat/errors.hpp"

namespace fracheat {

// Gamma function at positive arguments (all this toolkit needs after the
// kernel normalization).  Wraps the standard-library implementation.
double gammafn(double x);

struct Quad1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule on [-1,1] (Newton on the Legendre recurrence).
Quad1D gauss_legendre(int npts);
// Gauss-Legendre mapped to [a,b].
Quad1D gauss_legendre(int npts, double a, double b);

// Gauss-Laguerre rule for the weight e^{-x} on [0,inf) (Golub-Welsch on the
// symmetric Jacobi matrix).
Quad1D gauss_laguerre(int npts);

// Gauss-Hermite rule for the weight e^{-x^2} on (-inf,inf).
Quad1D gauss_hermite(int npts);

// Stable 1 - e^{-z}: series for small |z| where the naive expression loses
// every significant digit.
std::complex<double> one_m_exp(std::complex<double> z);

// Composite 2-point Gauss rule on [0, X] over the graded cells
// [X (k/K)^g, X ((k+1)/K)^g], k = 0..K-1.
Quad1D graded_rule(double X, int K, double g);

// int_X^inf e^{-A*sigma} sigma^{-1-s} dsigma for Re A >= 0, A != 0, X > 0,
// by Gauss-Laguerre on the ray rotated by -arg(A).
std::complex<double> upper_tail(std::complex<double> A, double X, double s);

// Linear least squares by Householder QR (rows >= cols); returns coefficients.
std::vector<double> lstsq(const std::vector<std::vector<double>>& A,
                          const std::vector<double>& b);

// Weight vector alpha such that alpha . d = c_0 where c solves the least
// squares fit V c = d (used to extrapolate whole fields with one fit).
std::vector<double> lstsq_component_weights(const std::vector<std::vector<double>>& V,
                                            int component);

} // namespace fracheat
