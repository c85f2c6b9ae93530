#pragma once

#include <string>
#include <vector>

#include "fracheat/grid.hpp"
#include "fracheat/params.hpp"

namespace fracheat {

// Graded vertical mesh for the upper-half-space extension: y_j = Y (j/J)^g
// with g = max(2, 2/(1 - max(a,0))), so cells concentrate at the weight's
// degeneracy for a > 0.
struct ExtensionGrid {
    SpaceTimeGrid base;
    std::vector<double> y_nodes; // y_0 = 0 ... y_J = Y_max, strictly increasing
    double Y_max = 0.0;

    int J() const { return static_cast<int>(y_nodes.size()) - 1; }
};

ExtensionGrid make_extension_grid(const SpaceTimeGrid& base, const FracParams& p, int J,
                                  double Y_max);

// Samples u(x, y_j, t); y-major-within-space layout, time fastest.
struct ExtensionField {
    ExtensionGrid grid;
    std::vector<cplx> values;
    bool real_flag = false;

    ExtensionField() = default;
    explicit ExtensionField(const ExtensionGrid& g, bool real = false)
        : grid(g),
          values(g.base.total() / g.base.Nt * g.y_nodes.size() *
                     static_cast<std::size_t>(g.base.Nt),
                 cplx(0.0, 0.0)),
          real_flag(real) {}

    int ny() const { return static_cast<int>(grid.y_nodes.size()); }
    std::size_t idx(int ix, int j, int it) const {
        return (static_cast<std::size_t>(ix) * ny() + j) * grid.base.Nt + it;
    }
    std::size_t idx(int ix, int iy, int j, int it) const {
        return ((static_cast<std::size_t>(ix) * grid.base.Nx + iy) * ny() + j) *
                   grid.base.Nt +
               it;
    }
    cplx& at(int ix, int j, int it) { return values[idx(ix, j, it)]; }
    const cplx& at(int ix, int j, int it) const { return values[idx(ix, j, it)]; }
    cplx& at(int ix, int iy, int j, int it) { return values[idx(ix, iy, j, it)]; }
    const cplx& at(int ix, int iy, int j, int it) const {
        return values[idx(ix, iy, j, it)];
    }
};

// u(., y_j, .) = Gamma_{y_j} * f for j >= 1; row 0 carries f itself.
ExtensionField poisson_extend(const Field& f, const FracParams& p, const ExtensionGrid& eg);

struct PdeOptions {
    std::string scheme = "tr-bdf2"; // or "be"
    std::string top = "poisson";    // Dirichlet from the Poisson symbol, or "neumann"
    int nsub = 1;                   // substeps per grid time step
    int min_periods = 2;
    int max_periods = 400;          // transient periods before giving up
    double period_tol = 1e-8;       // relative periodicity residual
    bool fixed_periods = false;     // run exactly max_periods (determinism studies)
};

// Implicit finite-volume solve of y^a du/dt = div(y^a grad u) on the half
// slab, Dirichlet data f at y = 0, periodic in x and t.  Time-periodic state
// reached by transient iteration; the x-direction is diagonalized by FFT, so
// each spatial mode reduces to a tridiagonal solve per substep (algebraically
// identical to the real-space sweep, but direct).
ExtensionField solve_extension_pde(const Field& f, const FracParams& p,
                                   const ExtensionGrid& eg, const PdeOptions& opt = {});

// Constant-coefficient reference on the same mesh: weight forced to 1
// (standard heat equation in (x, y, t)); used by the a = 0 degeneracy check.
ExtensionField solve_heat_reference(const Field& f, const ExtensionGrid& eg,
                                    const PdeOptions& opt = {});

// Calibrated Neumann trace -C (u(., y, .) - u(., 0, .)) / y^{2s} extrapolated
// to y = 0 from stored rows in the window [Y/256, Y/24].
Field neumann_trace(const ExtensionField& u, const FracParams& p);

// Mirror across y = 0: u~(x, -y, t) = u(x, y, t).
ExtensionField even_reflect(const ExtensionField& u);

// Smooth compactly supported space-y-time test bump for the weak form:
// theta = phi((x-x0)/rx) [phi((x1-x01)/rx)] phi((y-y0)/ry) phi((t-t0)/rt)
// with phi(z) = exp(-1/(1-z^2)) on |z| < 1.
struct TestBump {
    std::vector<double> x0;
    double y0 = 0.0;
    double t0 = 0.0;
    double rx = 0.0;
    double ry = 0.0;
    double rt = 0.0;
};

// Residual of the weak identity for lambda = |y|^a against theta:
// |  [int lambda u theta]_{t1}^{t2} - int lambda u dtheta/dt + int lambda grad u . grad theta |
// with nodal (midpoint) quadrature, exact cell averages of lambda, discrete
// centered gradients of u, analytic derivatives of theta.
double weak_residual(const ExtensionField& u, const TestBump& theta, const FracParams& p);

// y^a-weighted slab mean at each time sample (conservation diagnostic for the
// Neumann-top solve).
std::vector<double> weighted_slab_mean(const ExtensionField& u, const FracParams& p);

} // namespace fracheat
