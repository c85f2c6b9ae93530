#include "fracheat/harnack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracheat/generate.hpp"
#include "fracheat/linalg.hpp"

namespace fracheat {

double PhiSpec::operator()(double x) const {
    const double xc = std::clamp(x, xs.front(), xs.back());
    auto it = std::upper_bound(xs.begin(), xs.end(), xc);
    std::size_t k = it == xs.begin() ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
    if (k + 1 >= xs.size()) k = xs.size() - 2;
    const double t = (xc - xs[k]) / (xs[k + 1] - xs[k]);
    return vals[k] + t * (vals[k + 1] - vals[k]);
}

double PhiSpec::slope(double x) const {
    const double xc = std::clamp(x, xs.front(), xs.back());
    auto it = std::upper_bound(xs.begin(), xs.end(), xc);
    std::size_t k = it == xs.begin() ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
    if (k + 1 >= xs.size()) k = xs.size() - 2;
    return (vals[k + 1] - vals[k]) / (xs[k + 1] - xs[k]);
}

double PhiSpec::lipschitz() const {
    double m = 0.0;
    for (std::size_t k = 0; k + 1 < xs.size(); ++k)
        m = std::max(m, std::abs((vals[k + 1] - vals[k]) / (xs[k + 1] - xs[k])));
    return m;
}

PhiSpec flat_phi(double Lx) { return PhiSpec{{0.0, Lx}, {0.0, 0.0}}; }

PhiSpec wedge_phi(double Lx, double M) {
    return PhiSpec{{0.0, 0.5 * Lx, Lx}, {0.5 * M * Lx, 0.0, 0.5 * M * Lx}};
}

bool LipschitzCylinder::inside(double x, double y) const {
    return x > 0.0 && x < Lx && y > wall(x) && y < top(x);
}

double LipschitzCylinder::node_x(int id) const {
    return (flat_of[id] / (ny + 1)) * hx;
}

double LipschitzCylinder::node_y(int id) const {
    return ybox_lo + (flat_of[id] % (ny + 1)) * hy;
}

LipschitzCylinder build_domain(const PhiSpec& phi, double y_lo, double y_hi, double T,
                               int nx, int ny, double r0, bool tube) {
    if (phi.xs.size() < 2 || phi.xs.size() != phi.vals.size())
        throw config_error("build_domain: graph needs at least two breakpoints");
    for (std::size_t k = 0; k + 1 < phi.xs.size(); ++k)
        if (!(phi.xs[k + 1] > phi.xs[k]))
            throw config_error("build_domain: graph breakpoints must increase");
    if (phi.xs.front() != 0.0)
        throw config_error("build_domain: graph must start at x = 0");
    if (!(y_lo < y_hi)) throw config_error("build_domain: degenerate slab (y_lo >= y_hi)");
    if (!(T > 0.0)) throw config_error("build_domain: T must be positive");
    if (nx < 8 || ny < 8) throw config_error("build_domain: mesh must be at least 8x8");

    LipschitzCylinder d;
    d.phi = phi;
    d.Lx = phi.xs.back();
    d.y_lo = y_lo;
    d.y_hi = y_hi;
    d.T = T;
    d.M = phi.lipschitz();
    d.r0 = r0;
    d.tube = tube;
    d.nx = nx;
    d.ny = ny;

    double pmin = phi.vals[0], pmax = phi.vals[0];
    for (double v : phi.vals) {
        pmin = std::min(pmin, v);
        pmax = std::max(pmax, v);
    }
    d.ybox_lo = y_lo + pmin;
    d.ybox_hi = y_hi + (tube ? pmax : 0.0);
    if (!tube && !(y_lo + pmax < y_hi))
        throw config_error("build_domain: graph reaches the top of the slab");
    d.hx = d.Lx / nx;
    d.hy = (d.ybox_hi - d.ybox_lo) / ny;

    d.node_of.assign(static_cast<std::size_t>(nx + 1) * (ny + 1), -1);
    for (int i = 0; i <= nx; ++i) {
        const double x = i * d.hx;
        for (int j = 0; j <= ny; ++j) {
            const double y = d.ybox_lo + j * d.hy;
            if (d.inside(x, y)) {
                const int flat = i * (ny + 1) + j;
                d.node_of[flat] = d.nactive++;
                d.flat_of.push_back(flat);
            }
        }
    }
    if (d.nactive == 0) throw config_error("build_domain: no interior mesh nodes");
    return d;
}

namespace {

double seg_dist(double px, double py, double ax, double ay, double bx, double by) {
    const double vx = bx - ax, vy = by - ay;
    const double L2 = vx * vx + vy * vy;
    double t = L2 > 0.0 ? ((px - ax) * vx + (py - ay) * vy) / L2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(px - (ax + t * vx), py - (ay + t * vy));
}

} // namespace

double boundary_distance(const LipschitzCylinder& d, double x, double y) {
    double best = std::numeric_limits<double>::infinity();
    const std::size_t K = d.phi.xs.size();
    for (std::size_t k = 0; k + 1 < K; ++k) {
        best = std::min(best, seg_dist(x, y, d.phi.xs[k], d.y_lo + d.phi.vals[k],
                                       d.phi.xs[k + 1], d.y_lo + d.phi.vals[k + 1]));
        if (d.tube)
            best = std::min(best, seg_dist(x, y, d.phi.xs[k], d.y_hi + d.phi.vals[k],
                                           d.phi.xs[k + 1], d.y_hi + d.phi.vals[k + 1]));
    }
    if (!d.tube) best = std::min(best, seg_dist(x, y, 0.0, d.y_hi, d.Lx, d.y_hi));
    best = std::min(best, seg_dist(x, y, 0.0, d.wall(0.0), 0.0, d.top(0.0)));
    best = std::min(best, seg_dist(x, y, d.Lx, d.wall(d.Lx), d.Lx, d.top(d.Lx)));
    return best;
}

CorkscrewPoint corkscrew(const LipschitzCylinder& d, double xhat_x, double r) {
    if (!(r > 0.0)) throw config_error("corkscrew: scale must be positive");
    if (!(xhat_x > 0.0 && xhat_x < d.Lx))
        throw config_error("corkscrew: boundary abscissa must be interior to (0, Lx)");
    CorkscrewPoint c;
    c.xhat = {xhat_x, d.wall(xhat_x)};
    c.r = r;
    c.A = {xhat_x, c.xhat[1] + 0.8 * r};
    c.Mc = std::max(2.0, 1.3 * std::hypot(1.0, d.M));
    const double dist_x = 0.8 * r;
    const double dist_b = boundary_distance(d, c.A[0], c.A[1]);
    if (!d.inside(c.A[0], c.A[1]) || !(dist_x > r / c.Mc) || !(dist_x < r) ||
        !(dist_b >= r / c.Mc * (1.0 - 1e-12)))
        throw config_error("corkscrew: scale too large for the domain");
    return c;
}

namespace {

// Signed antiderivatives of |y|^a and |y|^-a (a in (-1,1), both integrable).
double anti_pow(double v, double expnt) {
    const double e1 = 1.0 + expnt;
    return (v >= 0.0 ? 1.0 : -1.0) * std::pow(std::abs(v), e1) / e1;
}

// Finite-volume system on the staircase mesh: exact row masses of the weight
// and resistor-exact interface transmissibilities.
struct StairSystem {
    std::vector<double> mass; // per active node
    BandMatrix K;
};

StairSystem assemble_stair(const LipschitzCylinder& d, double a,
                           const std::function<double(double, double)>* dirichlet,
                           std::vector<double>* rhs_bc) {
    const int ny = d.ny;
    std::vector<double> Tx(ny + 1), massrow(ny + 1), Ty(ny);
    for (int j = 0; j <= ny; ++j) {
        const double y = d.ybox_lo + j * d.hy;
        const double dL = anti_pow(y + 0.5 * d.hy, a) - anti_pow(y - 0.5 * d.hy, a);
        Tx[j] = dL / d.hx;
        massrow[j] = dL * d.hx;
    }
    for (int j = 0; j < ny; ++j) {
        const double y0 = d.ybox_lo + j * d.hy, y1 = y0 + d.hy;
        Ty[j] = d.hx / (anti_pow(y1, -a) - anti_pow(y0, -a));
    }

    int bw = 1;
    for (int k = 0; k < d.nactive; ++k) {
        const int flat = d.flat_of[k];
        const int up = flat + 1, right = flat + (ny + 1);
        if ((flat % (ny + 1)) + 1 <= ny && d.node_of[up] >= 0)
            bw = std::max(bw, d.node_of[up] - k);
        if (flat / (ny + 1) + 1 <= d.nx && d.node_of[right] >= 0)
            bw = std::max(bw, d.node_of[right] - k);
    }

    StairSystem sys;
    sys.mass.resize(d.nactive);
    sys.K = BandMatrix(d.nactive, bw);
    if (rhs_bc) rhs_bc->assign(d.nactive, 0.0);
    for (int k = 0; k < d.nactive; ++k) {
        const int flat = d.flat_of[k];
        const int i = flat / (ny + 1), j = flat % (ny + 1);
        sys.mass[k] = massrow[j];
        double diag = 0.0;
        const int nbr_flat[4] = {flat - (ny + 1), flat + (ny + 1), flat - 1, flat + 1};
        const double nbr_T[4] = {Tx[j], Tx[j], j > 0 ? Ty[j - 1] : 0.0,
                                 j < ny ? Ty[j] : 0.0};
        const int nbr_i[4] = {i - 1, i + 1, i, i};
        const int nbr_j[4] = {j, j, j - 1, j + 1};
        for (int q = 0; q < 4; ++q) {
            if (nbr_i[q] < 0 || nbr_i[q] > d.nx || nbr_j[q] < 0 || nbr_j[q] > ny) continue;
            const double T = nbr_T[q];
            diag += T;
            const int nid = d.node_of[nbr_flat[q]];
            if (nid >= 0) {
                if (nid < k) sys.K.at(k, nid) = -T;
            } else if (dirichlet && rhs_bc) {
                (*rhs_bc)[k] +=
                    T * (*dirichlet)(nbr_i[q] * d.hx, d.ybox_lo + nbr_j[q] * d.hy);
            }
        }
        sys.K.at(k, k) = diag;
    }
    return sys;
}

} // namespace

HarnackSolution solve_weighted(const LipschitzCylinder& d, const FracParams& p,
                               const std::function<double(double, double)>& g0, int nt) {
    if (nt < 1) throw config_error("solve_weighted: nt must be >= 1");
    const StairSystem sys = assemble_stair(d, p.a, nullptr, nullptr);
    const double dt = d.T / nt;

    BandMatrix S(d.nactive, sys.K.bandwidth());
    for (int j = 0; j < d.nactive; ++j)
        for (int i = j; i <= std::min(j + sys.K.bandwidth(), d.nactive - 1); ++i)
            S.at(i, j) = dt * sys.K.at(i, j);
    for (int i = 0; i < d.nactive; ++i) S.at(i, i) += sys.mass[i];
    const BandMatrix L = cholesky_factor(S);

    HarnackSolution sol;
    sol.dom = d;
    sol.nt = nt;
    sol.dt = dt;
    sol.values.resize(static_cast<std::size_t>(nt + 1) * d.nactive);
    std::vector<double> u(d.nactive);
    for (int k = 0; k < d.nactive; ++k) {
        u[k] = g0(d.node_x(k), d.node_y(k));
        if (u[k] < 0.0)
            throw config_error("solve_weighted: initial data must be nonnegative");
        sol.values[k] = u[k];
    }
    std::vector<double> rhs(d.nactive);
    for (int m = 1; m <= nt; ++m) {
        for (int k = 0; k < d.nactive; ++k) rhs[k] = sys.mass[k] * u[k];
        u = cholesky_solve(L, rhs);
        std::copy(u.begin(), u.end(),
                  sol.values.begin() + static_cast<std::size_t>(m) * d.nactive);
    }
    return sol;
}

double HarnackSolution::sample(double x, double y, int it) const {
    const double gx = x / dom.hx, gy = (y - dom.ybox_lo) / dom.hy;
    if (gx < 0.0 || gx > dom.nx || gy < 0.0 || gy > dom.ny) return 0.0;
    int i0 = std::min(static_cast<int>(gx), dom.nx - 1);
    int j0 = std::min(static_cast<int>(gy), dom.ny - 1);
    const double fx = gx - i0, fy = gy - j0;
    auto nodal = [&](int i, int j) {
        const int id = dom.node_of[i * (dom.ny + 1) + j];
        return id >= 0 ? at(it, id) : 0.0;
    };
    return (1 - fx) * (1 - fy) * nodal(i0, j0) + fx * (1 - fy) * nodal(i0 + 1, j0) +
           (1 - fx) * fy * nodal(i0, j0 + 1) + fx * fy * nodal(i0 + 1, j0 + 1);
}

std::array<double, 3> FlattenMap::geometry(double x) const {
    const double p = phi.slope(x);
    return {1.0, -p, 1.0 + p * p};
}

double FlattenMap::lambda_hat(double x, double yhat, double a) const {
    const double v = yhat + phi(x);
    return std::pow(std::max(std::abs(v), 1e-300), a);
}

FlattenMap make_flatten(const LipschitzCylinder& d) {
    FlattenMap m;
    m.phi = d.phi;
    m.M = d.M;
    m.beta_hat = (1.0 + d.M) * (1.0 + d.M);
    return m;
}

HarnackSolution solve_via_flatten(const LipschitzCylinder& d, const FracParams& p,
                                  const std::function<double(double, double)>& g0, int nt,
                                  FlattenMap* map_out) {
    if (!d.tube)
        throw config_error("solve_via_flatten: requires a tube domain (top follows the graph)");
    if (nt < 1) throw config_error("solve_via_flatten: nt must be >= 1");
    const FlattenMap map = make_flatten(d);
    if (map_out) *map_out = map;

    // Q1 finite elements on the exact flattened rectangle [0,Lx] x [y_lo,y_hi].
    const int nx = d.nx, ny = d.ny;
    const double hx = d.Lx / nx, hy = (d.y_hi - d.y_lo) / ny;
    const int nyi = ny - 1;
    auto idx = [&](int i, int j) {
        return (i >= 1 && i <= nx - 1 && j >= 1 && j <= ny - 1) ? (i - 1) * nyi + (j - 1)
                                                                : -1;
    };
    const int nunk = (nx - 1) * nyi;
    const int bw = ny;
    BandMatrix K(nunk, bw);
    std::vector<double> lump(nunk, 0.0);

    const double gq = 1.0 / std::sqrt(3.0);
    const int di[4] = {0, 1, 1, 0}, dj[4] = {0, 0, 1, 1};
    const double detJ = hx * hy / 4.0;
    for (int ci = 0; ci < nx; ++ci) {
        const double xe = ci * hx;
        for (int cj = 0; cj < ny; ++cj) {
            const double ye = d.y_lo + cj * hy;
            double kloc[4][4] = {};
            double mloc[4] = {};
            for (int gx = 0; gx < 2; ++gx)
                for (int gy = 0; gy < 2; ++gy) {
                    const double xi = gx ? gq : -gq, eta = gy ? gq : -gq;
                    const double xg = xe + hx * (1.0 + xi) / 2.0;
                    const double yg = ye + hy * (1.0 + eta) / 2.0;
                    const std::array<double, 3> geo = map.geometry(xg);
                    const double lam = map.lambda_hat(xg, yg, p.a);
                    double N[4], Gx[4], Gy[4];
                    const double sx[4] = {-1, 1, 1, -1}, sy[4] = {-1, -1, 1, 1};
                    for (int a = 0; a < 4; ++a) {
                        N[a] = 0.25 * (1.0 + sx[a] * xi) * (1.0 + sy[a] * eta);
                        Gx[a] = 0.25 * sx[a] * (1.0 + sy[a] * eta) * 2.0 / hx;
                        Gy[a] = 0.25 * sy[a] * (1.0 + sx[a] * xi) * 2.0 / hy;
                    }
                    for (int a = 0; a < 4; ++a) {
                        mloc[a] += lam * N[a] * detJ;
                        for (int b = 0; b < 4; ++b)
                            kloc[a][b] += lam * detJ *
                                          (Gx[a] * (geo[0] * Gx[b] + geo[1] * Gy[b]) +
                                           Gy[a] * (geo[1] * Gx[b] + geo[2] * Gy[b]));
                    }
                }
            int ids[4];
            for (int a = 0; a < 4; ++a) ids[a] = idx(ci + di[a], cj + dj[a]);
            for (int a = 0; a < 4; ++a) {
                if (ids[a] < 0) continue;
                lump[ids[a]] += mloc[a];
                for (int b = 0; b < 4; ++b)
                    if (ids[b] >= 0 && ids[a] >= ids[b]) K.at(ids[a], ids[b]) += kloc[a][b];
            }
        }
    }

    const double dt = d.T / nt;
    BandMatrix S(nunk, bw);
    for (int j = 0; j < nunk; ++j)
        for (int i = j; i <= std::min(j + bw, nunk - 1); ++i) S.at(i, j) = dt * K.at(i, j);
    for (int i = 0; i < nunk; ++i) S.at(i, i) += lump[i];
    const BandMatrix L = cholesky_factor(S);

    std::vector<double> U(nunk);
    for (int i = 1; i <= nx - 1; ++i)
        for (int j = 1; j <= ny - 1; ++j) {
            const double x = i * hx, yh = d.y_lo + j * hy;
            U[idx(i, j)] = g0(x, yh + d.phi(x));
        }

    HarnackSolution sol;
    sol.dom = d;
    sol.nt = nt;
    sol.dt = dt;
    sol.values.resize(static_cast<std::size_t>(nt + 1) * d.nactive);

    std::vector<double> full(static_cast<std::size_t>(nx + 1) * (ny + 1), 0.0);
    auto pull_back = [&](int level) {
        for (int i = 1; i <= nx - 1; ++i)
            for (int j = 1; j <= ny - 1; ++j)
                full[static_cast<std::size_t>(i) * (ny + 1) + j] = U[idx(i, j)];
        for (int k = 0; k < d.nactive; ++k) {
            const double x = d.node_x(k);
            const double yh = d.node_y(k) - d.phi(x);
            double val = 0.0;
            const double gxr = x / hx, gyr = (yh - d.y_lo) / hy;
            if (gxr >= 0.0 && gxr <= nx && gyr >= 0.0 && gyr <= ny) {
                const int i0 = std::min(static_cast<int>(gxr), nx - 1);
                const int j0 = std::min(static_cast<int>(gyr), ny - 1);
                const double fx = gxr - i0, fy = gyr - j0;
                auto nodal = [&](int i, int j) {
                    return full[static_cast<std::size_t>(i) * (ny + 1) + j];
                };
                val = (1 - fx) * (1 - fy) * nodal(i0, j0) +
                      fx * (1 - fy) * nodal(i0 + 1, j0) +
                      (1 - fx) * fy * nodal(i0, j0 + 1) + fx * fy * nodal(i0 + 1, j0 + 1);
            }
            sol.values[static_cast<std::size_t>(level) * d.nactive + k] = val;
        }
    };

    pull_back(0);
    std::vector<double> rhs(nunk);
    for (int m = 1; m <= nt; ++m) {
        for (int k = 0; k < nunk; ++k) rhs[k] = lump[k] * U[k];
        U = cholesky_solve(L, rhs);
        pull_back(m);
    }
    return sol;
}

std::vector<double> solve_weighted_elliptic(
    const LipschitzCylinder& d, const FracParams& p, double rhs_scale,
    const std::function<double(double, double)>& dirichlet) {
    std::vector<double> rhs_bc;
    const StairSystem sys = assemble_stair(d, p.a, &dirichlet, &rhs_bc);
    std::vector<double> rhs(d.nactive);
    for (int k = 0; k < d.nactive; ++k) rhs[k] = rhs_scale * sys.mass[k] + rhs_bc[k];
    const BandMatrix L = cholesky_factor(sys.K);
    return cholesky_solve(L, rhs);
}

Barrier build_barrier(const LipschitzCylinder& d, double x0, double y0, double t0,
                      const FracParams& p) {
    const double diam = std::hypot(d.Lx, d.ybox_hi - d.ybox_lo);
    if (boundary_distance(d, x0, y0) > 1e-9 * diam)
        throw config_error("build_barrier: X0 must lie on the spatial boundary");
    Barrier b;
    b.dom = d;
    b.X0 = {x0, y0};
    b.t0 = t0;
    b.psi_space = solve_weighted_elliptic(
        d, p, 1.0, [&](double x, double y) { return std::hypot(x - x0, y - y0); });
    return b;
}

QuotientProfile quotient_profile(const HarnackSolution& u, const HarnackSolution& v,
                                 double xhat, double t0, double r, int depth,
                                 double tol) {
    const LipschitzCylinder& d = u.dom;
    if (v.dom.nactive != d.nactive || v.dom.nx != d.nx || v.dom.ny != d.ny ||
        v.nt != u.nt)
        throw shape_error("quotient_profile: solutions live on different meshes");
    if (depth < 1) throw config_error("quotient_profile: depth must be >= 1");
    if (!(r > 0.0)) throw config_error("quotient_profile: r must be positive");
    if (!(t0 > 0.0 && t0 <= d.T))
        throw config_error("quotient_profile: t0 must lie in (0, T]");

    const double x0 = xhat, y0 = d.wall(xhat);
    double vmax = 0.0;
    for (double w : v.values) vmax = std::max(vmax, std::abs(w));
    if (vmax == 0.0)
        throw numerical_error("quotient_profile: denominator solution vanishes identically");

    const CorkscrewPoint A = corkscrew(d, xhat, r);
    const int itA = std::clamp(static_cast<int>(std::lround(t0 / u.dt)), 0, u.nt);
    const double uA = u.sample(A.A[0], A.A[1], itA);
    const double vA = v.sample(A.A[0], A.A[1], itA);
    if (std::abs(vA) < 1e-10 * vmax || vA <= 0.0)
        throw numerical_error("quotient_profile: quotient degenerate at the corkscrew point",
                              vA);

    QuotientProfile prof;
    prof.corkscrew_quotient = uA / vA;

    for (int k = 0; k < depth; ++k) {
        const double rk = r * std::pow(2.0, -k);
        const int it_lo = std::max(0, static_cast<int>(std::ceil((t0 - rk * rk) / u.dt)));
        const int it_hi = std::min(u.nt, static_cast<int>(std::floor(t0 / u.dt)));
        double qmin = std::numeric_limits<double>::infinity(), qmax = -qmin;
        std::size_t npts = 0;
        for (int id = 0; id < d.nactive; ++id) {
            const double dx = d.node_x(id) - x0, dy = d.node_y(id) - y0;
            if (dx * dx + dy * dy >= rk * rk) continue;
            for (int it = it_lo; it <= it_hi; ++it) {
                const double vv = v.at(it, id);
                if (std::abs(vv) < 1e-10 * vmax) continue; // both vanish at the wall
                if (vv <= 0.0)
                    throw numerical_error(
                        "quotient_profile: quotient degenerate (v <= 0 at an interior "
                        "evaluation point)",
                        vv);
                const double q = u.at(it, id) / vv;
                qmin = std::min(qmin, q);
                qmax = std::max(qmax, q);
                ++npts;
            }
        }
        if (npts == 0 || it_lo > it_hi) break; // cylinder no longer resolved
        prof.r_k.push_back(rk);
        prof.osc_k.push_back(qmax - qmin);
        prof.qmin_k.push_back(qmin);
        prof.qmax_k.push_back(qmax);
    }
    if (prof.r_k.empty())
        throw config_error("quotient_profile: no mesh points in the largest cylinder");

    const double qa = std::abs(prof.corkscrew_quotient);
    const double floor_abs = 10.0 * tol * std::max(qa, 1e-300);
    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < prof.r_k.size(); ++k)
        if (prof.osc_k[k] > floor_abs) {
            lx.push_back(std::log(prof.r_k[k]));
            ly.push_back(std::log(prof.osc_k[k] / qa));
        }
    prof.used_scales = static_cast<int>(lx.size());
    if (lx.empty()) {
        prof.exact = true;
        return prof;
    }
    if (lx.size() < 2) return prof; // cannot fit; alpha stays 0
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        mx += lx[k];
        my += ly[k];
    }
    mx /= lx.size();
    my /= ly.size();
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        sxx += (lx[k] - mx) * (lx[k] - mx);
        sxy += (lx[k] - mx) * (ly[k] - my);
        syy += (ly[k] - my) * (ly[k] - my);
    }
    prof.alpha_fit = sxy / sxx;
    prof.c = std::exp(my - prof.alpha_fit * mx);
    double ssres = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        const double e = ly[k] - (my + prof.alpha_fit * (lx[k] - mx));
        ssres += e * e;
    }
    prof.r2 = syy > 0.0 ? 1.0 - ssres / syy : 1.0;
    prof.alpha = std::min(1.0, prof.alpha_fit);
    return prof;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    LipschitzCylinder dom = build_domain(spec.phi, spec.y_lo, spec.y_hi, spec.T, spec.nx,
                                         spec.ny, 0.25, false);
    const FracParams p = make_params(spec.s);
    const double delta = spec.delta > 0.0 ? spec.delta : 0.25 * std::sqrt(spec.T);
    if (!(spec.t0 >= delta * delta))
        throw config_error("run_experiment: t0 must satisfy t0 >= delta^2");
    if (!(spec.t0 <= spec.T)) throw config_error("run_experiment: t0 exceeds T");
    const double xhat = spec.xhat != 0.0 ? spec.xhat : 0.5 * dom.Lx;

    const double H = spec.y_hi - spec.y_lo;
    auto fill_bump = [&](ExperimentSpec::BumpSpec b, double frac) {
        if (b.w <= 0.0) {
            b.cx = frac * dom.Lx;
            b.cy = 0.5 * (dom.wall(b.cx) + dom.top(b.cx));
            b.w = 0.15 * std::min(dom.Lx, H);
            if (b.amp == 0.0) b.amp = 1.0;
        }
        return b;
    };
    const auto bu = fill_bump(spec.data_u, 0.35);
    const auto bv = fill_bump(spec.data_v, 0.65);
    auto bump_fn = [](const ExperimentSpec::BumpSpec& b) {
        return [b](double x, double y) {
            return b.amp * bump_profile(std::hypot(x - b.cx, y - b.cy) / b.w);
        };
    };

    ExperimentResult res;
    const HarnackSolution u = solve_weighted(dom, p, bump_fn(bu), spec.nt);
    const HarnackSolution v = solve_weighted(dom, p, bump_fn(bv), spec.nt);
    res.prof = quotient_profile(u, v, xhat, spec.t0, spec.r, spec.depth, spec.quotient_tol);
    res.A = corkscrew(dom, xhat, spec.r);
    const int itA = std::clamp(static_cast<int>(std::lround(spec.t0 / u.dt)), 0, u.nt);
    res.u_at_A = u.sample(res.A.A[0], res.A.A[1], itA);
    res.v_at_A = v.sample(res.A.A[0], res.A.A[1], itA);

    // qualitative interior Harnack data: u over a centered interior cylinder
    const double cx = 0.5 * dom.Lx;
    const double cy = 0.5 * (dom.wall(cx) + dom.top(cx));
    const double rad = 0.25 * std::min(dom.Lx, H);
    res.interior_sup = 0.0;
    res.interior_inf = std::numeric_limits<double>::infinity();
    for (int id = 0; id < dom.nactive; ++id) {
        const double dx = dom.node_x(id) - cx, dy = dom.node_y(id) - cy;
        if (dx * dx + dy * dy >= rad * rad) continue;
        for (int it = (spec.nt + 1) / 2; it <= spec.nt; ++it) {
            const double w = u.at(it, id);
            res.interior_sup = std::max(res.interior_sup, w);
            res.interior_inf = std::min(res.interior_inf, w);
        }
    }
    return res;
}

} // namespace fracheat
