#pragma once

#include <array>
#include <functional>
#include <vector>

#include "fracheat/params.hpp"

namespace fracheat {

// Piecewise-linear boundary graph on [0, Lx], stored as breakpoints.
struct PhiSpec {
    std::vector<double> xs;   // strictly increasing; xs.front() = 0 defines x-range
    std::vector<double> vals; // graph values at the breakpoints
    double operator()(double x) const; // clamped linear interpolation
    double slope(double x) const;      // slope of the containing segment
    double lipschitz() const;          // max segment |slope|
};

PhiSpec flat_phi(double Lx);
PhiSpec wedge_phi(double Lx, double M); // M |x - Lx/2|, vertex on the wall

// Space-time cylinder over a Lipschitz slab domain
//   Omega = { (x, y) : 0 < x < Lx, wall(x) < y < top(x) },  t in (0, T)
// with wall(x) = y_lo + phi(x) and top(x) = y_hi (+ phi(x) if tube).
// Discretized on a uniform staircase mesh over the bounding box; nodes on or
// outside the boundary are Dirichlet nodes.
struct LipschitzCylinder {
    PhiSpec phi;
    double Lx = 0.0, y_lo = 0.0, y_hi = 0.0, T = 0.0;
    double M = 0.0;  // measured Lipschitz constant of phi
    double r0 = 0.0; // localization scale
    bool tube = false;

    int nx = 0, ny = 0; // cell counts; nodes (nx+1) x (ny+1)
    double hx = 0.0, hy = 0.0;
    double ybox_lo = 0.0, ybox_hi = 0.0;
    std::vector<int> node_of;  // (nx+1)*(ny+1) flat node -> active index or -1
    std::vector<int> flat_of;  // active index -> flat node
    int nactive = 0;

    double wall(double x) const { return y_lo + phi(x); }
    double top(double x) const { return tube ? y_hi + phi(x) : y_hi; }
    bool inside(double x, double y) const;
    double node_x(int active_id) const;
    double node_y(int active_id) const;
};

LipschitzCylinder build_domain(const PhiSpec& phi, double y_lo, double y_hi, double T,
                               int nx, int ny, double r0 = 0.25, bool tube = false);

// Interior corkscrew point above the wall point (xhat, wall(xhat)) at scale r.
struct CorkscrewPoint {
    std::array<double, 2> xhat{};
    std::array<double, 2> A{};
    double r = 0.0;
    double Mc = 0.0; // corkscrew constant: 1/Mc r < dist(xhat, A) < r, dist(A, bdry) >= r/Mc
};

CorkscrewPoint corkscrew(const LipschitzCylinder& dom, double xhat_x, double r);

// Exact distance from a point to the spatial boundary of the domain.
double boundary_distance(const LipschitzCylinder& dom, double x, double y);

// Discrete evolution history of lambda du/dt = div(lambda grad u) with zero
// lateral Dirichlet data; values stored per time level over active nodes.
struct HarnackSolution {
    LipschitzCylinder dom;
    int nt = 0;
    double dt = 0.0;
    std::vector<double> values; // (nt+1) * nactive, time-major

    double at(int it, int active_id) const {
        return values[static_cast<std::size_t>(it) * dom.nactive + active_id];
    }
    // Bilinear sample on the box mesh (Dirichlet zero outside Omega).
    double sample(double x, double y, int it) const;
};

HarnackSolution solve_weighted(const LipschitzCylinder& dom, const FracParams& p,
                               const std::function<double(double, double)>& g0, int nt);

// Graph-flattening change of variables rho(x, yhat) = (x, yhat + phi(x)) and
// the induced coefficient matrix a_hat = lambda_hat [[1, -phi'], [-phi', 1 + phi'^2]].
struct FlattenMap {
    PhiSpec phi;
    double M = 0.0;
    double beta_hat = 1.0; // eigenvalue bound (1 + M)^2 of a_hat / lambda_hat

    std::array<double, 2> rho(double x, double yhat) const { return {x, yhat + phi(x)}; }
    std::array<double, 2> rho_inv(double x, double y) const { return {x, y - phi(x)}; }
    // geometry factor (a11, a12, a22) at abscissa x, excluding the weight
    std::array<double, 3> geometry(double x) const;
    double lambda_hat(double x, double yhat, double a) const;
};

FlattenMap make_flatten(const LipschitzCylinder& dom);

// Solve the flattened tensor-coefficient problem on the exact rectangle with
// Q1 finite elements and pull the solution back to the staircase mesh of dom.
// Requires dom.tube so that the flattened image is a rectangle.
HarnackSolution solve_via_flatten(const LipschitzCylinder& dom, const FracParams& p,
                                  const std::function<double(double, double)>& g0, int nt,
                                  FlattenMap* map_out = nullptr);

// Parabolic barrier at a spatial boundary point X0: psi_space solves the
// weighted elliptic problem -div(lambda grad psi) = lambda with Dirichlet data
// |X - X0|, and psi(X, t) = psi_space(X) + (t0 - t).
struct Barrier {
    LipschitzCylinder dom;
    std::array<double, 2> X0{};
    double t0 = 0.0;
    std::vector<double> psi_space; // active nodes
    double at(int active_id, double t) const { return psi_space[active_id] + (t0 - t); }
};

Barrier build_barrier(const LipschitzCylinder& dom, double x0, double y0, double t0,
                      const FracParams& p);

// Elliptic solve -div(lambda grad psi) = rhs_scale * lambda with given Dirichlet
// boundary values; shared by build_barrier and its comparison tests.
std::vector<double> solve_weighted_elliptic(
    const LipschitzCylinder& dom, const FracParams& p, double rhs_scale,
    const std::function<double(double, double)>& dirichlet);

// Dyadic oscillation profile of the quotient u/v in parabolic cylinders
// Q_{r 2^-k}(X0, t0) with X0 = (xhat, wall(xhat)), normalized by the quotient
// at the corkscrew point A_r.
struct QuotientProfile {
    std::vector<double> r_k, osc_k;
    std::vector<double> qmin_k, qmax_k; // raw quotient range per scale
    double alpha = 0.0;     // certified exponent min(1, alpha_fit); 0 if no fit
    double alpha_fit = 0.0; // raw least-squares slope
    double c = 0.0;         // fitted constant
    double r2 = 0.0;        // fit quality
    bool exact = false;     // all oscillations at the noise floor
    double corkscrew_quotient = 0.0;
    int used_scales = 0;
};

QuotientProfile quotient_profile(const HarnackSolution& u, const HarnackSolution& v,
                                 double xhat, double t0, double r, int depth,
                                 double tol = 1e-9);

// One desk-scale boundary Harnack experiment: two nonnegative solutions from
// smooth initial bumps, both vanishing on the lateral boundary.
struct ExperimentSpec {
    PhiSpec phi;
    double y_lo = -1.0, y_hi = 1.0, T = 1.0;
    double s = 0.5;
    int nx = 64, ny = 64, nt = 256;
    double xhat = 0.0; // boundary abscissa (0 -> domain midpoint)
    double t0 = 0.6, r = 0.6;
    int depth = 4;
    double delta = 0.0; // waiting time; 0 -> 0.25 sqrt(T)
    struct BumpSpec {
        double cx = 0.0, cy = 0.0, w = 0.0, amp = 1.0;
    };
    BumpSpec data_u, data_v;
    double quotient_tol = 1e-9;
};

struct ExperimentResult {
    QuotientProfile prof;
    CorkscrewPoint A;
    double u_at_A = 0.0, v_at_A = 0.0;
    double interior_sup = 0.0, interior_inf = 0.0; // u over a centered interior cylinder
};

ExperimentResult run_experiment(const ExperimentSpec& spec);

} // namespace fracheat
