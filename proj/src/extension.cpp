#include "fracheat/extension.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fracheat/fft.hpp"
#include "fracheat/fracop.hpp"
#include "fracheat/generate.hpp"
#include "fracheat/kernels.hpp"
#include "fracheat/linalg.hpp"
#include "fracheat/parallel.hpp"
#include "fracheat/tables.hpp"

namespace fracheat {

ExtensionGrid make_extension_grid(const SpaceTimeGrid& base, const FracParams& p, int J,
                                  double Y_max) {
    if (J < 16) throw config_error("make_extension_grid: J must be >= 16");
    if (!(Y_max > 0.0)) throw config_error("make_extension_grid: Y_max must be positive");
    const double gexp = std::max(2.0, 2.0 / (1.0 - std::max(p.a, 0.0)));
    ExtensionGrid eg;
    eg.base = base;
    eg.Y_max = Y_max;
    eg.y_nodes.resize(J + 1);
    for (int j = 0; j <= J; ++j)
        eg.y_nodes[j] = Y_max * std::pow(static_cast<double>(j) / J, gexp);
    return eg;
}

namespace {

std::size_t nspace_of(const SpaceTimeGrid& g) { return g.total() / g.Nt; }

void set_row(ExtensionField& u, int j, const Field& f) {
    const SpaceTimeGrid& g = u.grid.base;
    const std::size_t ns = nspace_of(g);
    for (std::size_t ks = 0; ks < ns; ++ks)
        for (int it = 0; it < g.Nt; ++it)
            u.values[(ks * u.ny() + j) * g.Nt + it] = f.values[ks * g.Nt + it];
}

// Finite-volume vertical mesh data: Voronoi cells around the nodes, exact
// cell masses of the weight, interface transmissibilities at midpoints.
struct YMesh {
    std::vector<double> ym;   // interface positions, size J
    std::vector<double> mass; // node cell masses, size J+1
    std::vector<double> mu;   // interface coefficient y_m^a / dy, size J
};

YMesh weighted_ymesh(const std::vector<double>& y, double a) {
    const int J = static_cast<int>(y.size()) - 1;
    YMesh m;
    m.ym.resize(J);
    m.mu.resize(J);
    m.mass.resize(J + 1);
    const double ap1 = 1.0 + a;
    auto F = [ap1](double v) { return std::pow(v, ap1) / ap1; };
    for (int j = 0; j < J; ++j) {
        m.ym[j] = 0.5 * (y[j] + y[j + 1]);
        m.mu[j] = std::pow(m.ym[j], a) / (y[j + 1] - y[j]);
    }
    m.mass[0] = F(m.ym[0]);
    for (int j = 1; j < J; ++j) m.mass[j] = F(m.ym[j]) - F(m.ym[j - 1]);
    m.mass[J] = F(y[J]) - F(m.ym[J - 1]);
    return m;
}

YMesh plain_ymesh(const std::vector<double>& y) {
    // Unweighted reference: mu = 1/dy, mass = cell width, no pow calls.
    const int J = static_cast<int>(y.size()) - 1;
    YMesh m;
    m.ym.resize(J);
    m.mu.resize(J);
    m.mass.resize(J + 1);
    for (int j = 0; j < J; ++j) {
        m.ym[j] = 0.5 * (y[j] + y[j + 1]);
        m.mu[j] = 1.0 / (y[j + 1] - y[j]);
    }
    m.mass[0] = m.ym[0];
    for (int j = 1; j < J; ++j) m.mass[j] = m.ym[j] - m.ym[j - 1];
    m.mass[J] = y[J] - m.ym[J - 1];
    return m;
}

void validate_options(const PdeOptions& opt) {
    if (opt.scheme != "be" && opt.scheme != "tr-bdf2")
        throw config_error("solve_extension_pde: scheme must be 'be' or 'tr-bdf2'");
    if (opt.top != "poisson" && opt.top != "neumann")
        throw config_error("solve_extension_pde: top closure must be 'poisson' or 'neumann'");
    if (opt.nsub < 1) throw config_error("solve_extension_pde: nsub must be >= 1");
    if (opt.min_periods < 1 || opt.max_periods < opt.min_periods)
        throw config_error("solve_extension_pde: invalid period bounds");
    if (!(opt.period_tol > 0.0))
        throw config_error("solve_extension_pde: period_tol must be positive");
}

// One spatial mode: implicit stepping of the tridiagonal vertical system
// until the state is time periodic.  Streams the end-of-step states of the
// final period into hist (Nt rows of n_unk unknowns each).
struct ModeWork {
    // mesh / operator
    const YMesh* mesh = nullptr;
    double lamx = 0.0; // discrete spatial symbol 4 sin^2(xi h/2)/h^2 summed over axes
    int J = 0;
    bool top_dirichlet = true;
    // boundary data: time-spectral rows (size Nt)
    std::vector<cplx> crow;     // Dirichlet value at y = 0
    std::vector<cplx> crow_top; // Dirichlet value at y = Y (empty if Neumann)
    std::vector<cplx> warm;     // initial state, size n_unk
};

struct ModeResult {
    std::vector<std::vector<cplx>> hist; // [Nt][n_unk]
    double residual = 0.0;
    int periods = 0;
};

cplx dot_row(const std::vector<cplx>& row, const std::vector<cplx>& basis) {
    cplx acc(0.0, 0.0);
    for (std::size_t k = 0; k < row.size(); ++k) acc += row[k] * basis[k];
    return acc;
}

ModeResult run_mode(const ModeWork& w, const SpaceTimeGrid& g, const PdeOptions& opt,
                    const std::vector<std::vector<cplx>>& basis_step,
                    const std::vector<std::vector<cplx>>& basis_gam) {
    const int J = w.J;
    const int n = w.top_dirichlet ? J - 1 : J; // unknown nodes 1..J-1 or 1..J
    const YMesh& mesh = *w.mesh;

    // Stiffness diagonal/off-diagonal and masses for the unknown nodes.
    std::vector<double> kd(n), ko(n > 1 ? n - 1 : 0), M(n);
    for (int i = 0; i < n; ++i) {
        const int j = i + 1;
        const double up = (j < J) ? mesh.mu[j] : 0.0; // no flux above the top node
        kd[i] = mesh.mu[j - 1] + up + mesh.mass[j] * w.lamx;
        if (!w.top_dirichlet && j == J) kd[i] = mesh.mu[j - 1] + mesh.mass[j] * w.lamx;
        M[i] = mesh.mass[j];
        if (i + 1 < n) ko[i] = mesh.mu[j];
    }

    const int nsteps = g.Nt * opt.nsub;
    const double dts = g.T / nsteps;
    const double gam = 2.0 - std::sqrt(2.0);
    const double c_tr = gam * dts / 2.0;
    const double c_bdf = (1.0 - gam) / (2.0 - gam) * dts;
    const double w1 = 1.0 / (gam * (2.0 - gam));
    const double w0 = (1.0 - gam) * (1.0 - gam) / (gam * (2.0 - gam));

    auto bl_at = [&](const std::vector<cplx>& basis) { return dot_row(w.crow, basis); };
    auto bt_at = [&](const std::vector<cplx>& basis) {
        return w.top_dirichlet ? dot_row(w.crow_top, basis) : cplx(0.0, 0.0);
    };

    auto apply_stiff = [&](const std::vector<cplx>& U, cplx blv, cplx btv,
                           std::vector<cplx>& r) {
        for (int i = 0; i < n; ++i) {
            cplx v = kd[i] * U[i];
            if (i > 0) v -= ko[i - 1] * U[i - 1];
            if (i + 1 < n) v -= ko[i] * U[i + 1];
            r[i] = v;
        }
        r[0] -= mesh.mu[0] * blv;
        if (w.top_dirichlet) r[n - 1] -= mesh.mu[J - 1] * btv;
    };

    auto shifted_solve = [&](double shift, const std::vector<cplx>& rhs) {
        std::vector<cplx> dg(n), lo(n > 1 ? n - 1 : 0), up(n > 1 ? n - 1 : 0);
        for (int i = 0; i < n; ++i) dg[i] = M[i] + shift * kd[i];
        for (int i = 0; i + 1 < n; ++i) lo[i] = up[i] = -shift * ko[i];
        return solve_tridiag(lo, dg, up, rhs);
    };

    std::vector<cplx> U = w.warm;
    ModeResult res;
    res.hist.assign(g.Nt, std::vector<cplx>(n));
    std::vector<cplx> rhs(n), kv(n);

    for (int period = 0; period < opt.max_periods; ++period) {
        const std::vector<cplx> U0 = U;
        for (int m = 0; m < g.Nt; ++m) {
            for (int sb = 0; sb < opt.nsub; ++sb) {
                const int step = m * opt.nsub + sb;
                const auto& bn = basis_step[step];
                const auto& bnp = basis_step[(step + 1) % nsteps];
                if (opt.scheme == "be") {
                    for (int i = 0; i < n; ++i) rhs[i] = M[i] * U[i];
                    rhs[0] += dts * mesh.mu[0] * bl_at(bnp);
                    if (w.top_dirichlet) rhs[n - 1] += dts * mesh.mu[J - 1] * bt_at(bnp);
                    U = shifted_solve(dts, rhs);
                } else {
                    const auto& bg = basis_gam[step];
                    // trapezoidal stage to t + gam dt
                    apply_stiff(U, bl_at(bn), bt_at(bn), kv);
                    for (int i = 0; i < n; ++i) rhs[i] = M[i] * U[i] - c_tr * kv[i];
                    rhs[0] += c_tr * mesh.mu[0] * bl_at(bg);
                    if (w.top_dirichlet)
                        rhs[n - 1] += c_tr * mesh.mu[J - 1] * bt_at(bg);
                    const std::vector<cplx> Ug = shifted_solve(c_tr, rhs);
                    // BDF2 stage to t + dt
                    for (int i = 0; i < n; ++i) rhs[i] = w1 * M[i] * Ug[i] - w0 * M[i] * U[i];
                    rhs[0] += c_bdf * mesh.mu[0] * bl_at(bnp);
                    if (w.top_dirichlet)
                        rhs[n - 1] += c_bdf * mesh.mu[J - 1] * bt_at(bnp);
                    U = shifted_solve(c_bdf, rhs);
                }
            }
            res.hist[(m + 1) % g.Nt] = U;
        }
        double dmax = 0.0, umax = 0.0;
        for (int i = 0; i < n; ++i) {
            dmax = std::max(dmax, std::abs(U[i] - U0[i]));
            umax = std::max(umax, std::abs(U[i]));
        }
        res.residual = dmax / std::max(umax, 1e-30);
        res.periods = period + 1;
        if (!std::isfinite(res.residual))
            throw numerical_error("solve_extension_pde: mode iteration diverged",
                                  res.residual);
        if (!opt.fixed_periods && res.periods >= opt.min_periods &&
            res.residual < opt.period_tol)
            return res;
    }
    if (!opt.fixed_periods && res.residual >= opt.period_tol)
        throw numerical_error("solve_extension_pde: periodicity residual " +
                                  std::to_string(res.residual) + " after " +
                                  std::to_string(opt.max_periods) + " periods",
                              res.residual);
    return res;
}

// Spectral-in-time symbol row of Gamma_y at fixed |xi|^2, mirroring the
// conjugate-symmetry and time-Nyquist conventions of build_mode_table.
std::vector<cplx> symbol_row(double y, double xi2, double s, const SpaceTimeGrid& g) {
    std::vector<cplx> row(g.Nt);
    for (int kt = 0; kt <= g.Nt / 2; ++kt) {
        const double om = omega_freq(kt, g.Nt, g.T);
        cplx v = ext_symbol(y, cplx(xi2, om), s);
        if (kt == g.Nt / 2) v = cplx(v.real(), 0.0);
        row[kt] = v;
        if (kt > 0 && kt < g.Nt / 2) row[g.Nt - kt] = std::conj(v);
    }
    return row;
}

ExtensionField solve_pde_impl(const Field& f, double s_symbol, const ExtensionGrid& eg,
                              const YMesh& mesh, const PdeOptions& opt,
                              const std::string& warm_mode) {
    if (!(f.grid == eg.base))
        throw shape_error("solve_extension_pde: field grid does not match extension grid");
    validate_options(opt);
    const SpaceTimeGrid& g = eg.base;
    const int J = eg.J();
    const std::size_t ns = nspace_of(g);
    const std::vector<cplx> coeffs = fft_forward(f);

    // Stage-time bases shared by all modes.
    const int nsteps = g.Nt * opt.nsub;
    const double dts = g.T / nsteps;
    const double gam = 2.0 - std::sqrt(2.0);
    std::vector<std::vector<cplx>> basis_step(nsteps), basis_gam;
    for (int m = 0; m < nsteps; ++m) basis_step[m] = axis_basis(g.Nt, g.T, m * dts);
    if (opt.scheme == "tr-bdf2") {
        basis_gam.resize(nsteps);
        for (int m = 0; m < nsteps; ++m)
            basis_gam[m] = axis_basis(g.Nt, g.T, (m + gam) * dts);
    }

    const bool top_dirichlet = opt.top == "poisson";
    const int n_unk = top_dirichlet ? J - 1 : J;

    // Per-mode spectral history buffer (x-spectral, t/y nodal).
    std::vector<cplx> buf(ns * (J + 1) * g.Nt, cplx(0.0, 0.0));

    parallel_for(ns, [&](std::size_t ks) {
        std::vector<cplx> crow(coeffs.begin() + ks * g.Nt,
                               coeffs.begin() + (ks + 1) * g.Nt);
        double rowmax = 0.0;
        for (const cplx& c : crow) rowmax = std::max(rowmax, std::abs(c));

        auto put = [&](int j, int it, cplx v) {
            buf[(ks * (J + 1) + j) * g.Nt + it] = v;
        };
        // Dirichlet trace row: nodal values of the data itself.
        for (int it = 0; it < g.Nt; ++it)
            put(0, it, dot_row(crow, basis_step[static_cast<std::size_t>(it) * opt.nsub]));
        if (rowmax == 0.0) return; // zero mode stays zero

        // Exact and discrete spatial symbols for this mode.
        double xi2 = 0.0, lamx = 0.0;
        const double hx = g.hx();
        auto add_axis = [&](int k) {
            const double xi = xi_freq(k, g.Nx, g.L);
            xi2 += xi * xi;
            const double sn = std::sin(0.5 * xi * hx);
            lamx += 4.0 * sn * sn / (hx * hx);
        };
        if (g.n == 1) {
            add_axis(static_cast<int>(ks));
        } else {
            add_axis(static_cast<int>(ks) / g.Nx);
            add_axis(static_cast<int>(ks) % g.Nx);
        }

        ModeWork w;
        w.mesh = &mesh;
        w.lamx = lamx;
        w.J = J;
        w.top_dirichlet = top_dirichlet;
        w.crow = crow;

        if (top_dirichlet) {
            const std::vector<cplx> grow = symbol_row(eg.y_nodes[J], xi2, s_symbol, g);
            w.crow_top.resize(g.Nt);
            for (int kt = 0; kt < g.Nt; ++kt) w.crow_top[kt] = grow[kt] * crow[kt];
            for (int it = 0; it < g.Nt; ++it)
                put(J, it,
                    dot_row(w.crow_top, basis_step[static_cast<std::size_t>(it) * opt.nsub]));
        }

        w.warm.assign(n_unk, cplx(0.0, 0.0));
        if (warm_mode == "poisson") {
            for (int i = 0; i < n_unk; ++i) {
                const std::vector<cplx> grow = symbol_row(eg.y_nodes[i + 1], xi2, s_symbol, g);
                cplx acc(0.0, 0.0);
                for (int kt = 0; kt < g.Nt; ++kt) acc += grow[kt] * crow[kt];
                w.warm[i] = acc; // poisson extension at t = 0
            }
        } else if (warm_mode == "data") {
            const cplx v0 = dot_row(crow, basis_step[0]);
            for (int i = 0; i < n_unk; ++i) w.warm[i] = v0;
        } // else zero

        const ModeResult mr = run_mode(w, g, opt, basis_step, basis_gam);
        for (int it = 0; it < g.Nt; ++it)
            for (int i = 0; i < n_unk; ++i) put(i + 1, it, mr.hist[it][i]);
    });

    // Assemble to real space: inverse DFT along each spatial axis.
    ExtensionField out(eg, f.real_flag);
    const int N = g.Nx;
    std::vector<cplx> tw(static_cast<std::size_t>(N) * N);
    for (int k = 0; k < N; ++k)
        for (int i = 0; i < N; ++i)
            tw[static_cast<std::size_t>(k) * N + i] =
                std::exp(cplx(0.0, 2.0 * std::numbers::pi * k * i / N));
    const std::size_t rows = static_cast<std::size_t>(J + 1) * g.Nt;
    if (g.n == 1) {
        parallel_for(rows, [&](std::size_t r) {
            for (int ix = 0; ix < N; ++ix) {
                cplx acc(0.0, 0.0);
                for (int kx = 0; kx < N; ++kx)
                    acc += buf[kx * rows + r] * tw[static_cast<std::size_t>(kx) * N + ix];
                out.values[ix * rows + r] = acc;
            }
        });
    } else {
        std::vector<cplx> half(ns * rows, cplx(0.0, 0.0));
        parallel_for(rows, [&](std::size_t r) {
            for (int kx = 0; kx < N; ++kx)
                for (int iy = 0; iy < N; ++iy) {
                    cplx acc(0.0, 0.0);
                    for (int ky = 0; ky < N; ++ky)
                        acc += buf[(static_cast<std::size_t>(kx) * N + ky) * rows + r] *
                               tw[static_cast<std::size_t>(ky) * N + iy];
                    half[(static_cast<std::size_t>(kx) * N + iy) * rows + r] = acc;
                }
            for (int iy = 0; iy < N; ++iy)
                for (int ix = 0; ix < N; ++ix) {
                    cplx acc(0.0, 0.0);
                    for (int kx = 0; kx < N; ++kx)
                        acc += half[(static_cast<std::size_t>(kx) * N + iy) * rows + r] *
                               tw[static_cast<std::size_t>(kx) * N + ix];
                    out.values[(static_cast<std::size_t>(ix) * N + iy) * rows + r] = acc;
                }
        });
    }
    // Trace row exactly equals the data.
    set_row(out, 0, f);
    return out;
}

} // namespace

ExtensionField poisson_extend(const Field& f, const FracParams& p, const ExtensionGrid& eg) {
    if (!(f.grid == eg.base))
        throw shape_error("poisson_extend: field grid does not match extension grid");
    ExtensionField out(eg, f.real_flag);
    const std::vector<cplx> coeffs = fft_forward(f);
    set_row(out, 0, f);
    for (int j = 1; j <= eg.J(); ++j) {
        const std::vector<cplx> table = ext_symbol_table(eg.base, p, eg.y_nodes[j]);
        Field uj = fft_backward(eg.base, apply_table(coeffs, table), f.real_flag);
        set_row(out, j, uj);
    }
    return out;
}

ExtensionField solve_extension_pde(const Field& f, const FracParams& p,
                                   const ExtensionGrid& eg, const PdeOptions& opt) {
    const YMesh mesh = weighted_ymesh(eg.y_nodes, p.a);
    const std::string warm = opt.top == "neumann" ? "data" : "poisson";
    return solve_pde_impl(f, p.s, eg, mesh, opt, warm);
}

ExtensionField solve_heat_reference(const Field& f, const ExtensionGrid& eg,
                                    const PdeOptions& opt) {
    const YMesh mesh = plain_ymesh(eg.y_nodes);
    const std::string warm = opt.top == "neumann" ? "data" : "poisson";
    return solve_pde_impl(f, 0.5, eg, mesh, opt, warm);
}

Field neumann_trace(const ExtensionField& u, const FracParams& p) {
    const SpaceTimeGrid& g = u.grid.base;
    const std::vector<double>& y = u.grid.y_nodes;
    const double Y = u.grid.Y_max;
    if (y.front() != 0.0)
        throw config_error("neumann_trace: extension grid must start at y = 0");

    // Probe rows: stored heights in [Y/256, Y/24] (small enough for the
    // 5-exponent expansion, large enough that solver error is not amplified
    // by the y^{-2s} quotient), thinned to at most 8.
    std::vector<int> cand;
    for (int j = 1; j < static_cast<int>(y.size()); ++j)
        if (y[j] >= Y / 256.0 && y[j] <= Y / 24.0) cand.push_back(j);
    if (cand.size() < 3) {
        cand.clear();
        for (int j = 1; j < static_cast<int>(y.size()) && cand.size() < 3; ++j)
            if (y[j] > 0.0 && y[j] <= Y / 4.0) cand.push_back(j);
    }
    if (cand.size() < 3)
        throw config_error("neumann_trace: need at least 3 heights below Y_max/4");
    if (cand.size() > 8) {
        std::vector<int> thin;
        const std::size_t m = cand.size();
        for (int q = 0; q < 8; ++q)
            thin.push_back(cand[(q * (m - 1)) / 7]);
        thin.erase(std::unique(thin.begin(), thin.end()), thin.end());
        cand = thin;
    }
    std::sort(cand.begin(), cand.end(), std::greater<int>()); // heights decreasing

    std::vector<double> probes;
    for (int j : cand) probes.push_back(y[j]);
    const std::vector<double> alpha = trace_fit_weights(probes, p.s);
    const double C = calibrate_extension_constant(g, p, probes);

    Field out(g, u.real_flag);
    const std::size_t ns = nspace_of(g);
    const int ny = u.ny();
    for (std::size_t ks = 0; ks < ns; ++ks)
        for (int it = 0; it < g.Nt; ++it) {
            const cplx u0 = u.values[(ks * ny + 0) * g.Nt + it];
            cplx acc(0.0, 0.0);
            for (std::size_t m = 0; m < cand.size(); ++m) {
                const cplx um = u.values[(ks * ny + cand[m]) * g.Nt + it];
                acc += alpha[m] * (-(um - u0) / std::pow(probes[m], 2.0 * p.s));
            }
            out.values[ks * g.Nt + it] = C * acc;
        }
    return out;
}

ExtensionField even_reflect(const ExtensionField& u) {
    const int J = static_cast<int>(u.grid.y_nodes.size()) - 1;
    if (u.grid.y_nodes.front() != 0.0) {
        // Already-mirrored grid: reflecting again is the pure mirror map
        // u~(x,-y,t) = u(x,y,t), so even fields come back unchanged.
        for (int j = 0; j <= J; ++j)
            if (u.grid.y_nodes[j] != -u.grid.y_nodes[J - j])
                throw shape_error("even_reflect: grid neither starts at 0 nor symmetric");
        ExtensionField out(u.grid, u.real_flag);
        const SpaceTimeGrid& gb = u.grid.base;
        const std::size_t nsp = u.values.size() / (static_cast<std::size_t>(J + 1) * gb.Nt);
        for (std::size_t ks = 0; ks < nsp; ++ks)
            for (int jr = 0; jr <= J; ++jr)
                for (int it = 0; it < gb.Nt; ++it)
                    out.values[(ks * (J + 1) + jr) * gb.Nt + it] =
                        u.values[(ks * (J + 1) + (J - jr)) * gb.Nt + it];
        return out;
    }
    ExtensionGrid rg;
    rg.base = u.grid.base;
    rg.Y_max = u.grid.Y_max;
    rg.y_nodes.resize(2 * J + 1);
    for (int j = 0; j <= J; ++j) {
        rg.y_nodes[J + j] = u.grid.y_nodes[j];
        rg.y_nodes[J - j] = -u.grid.y_nodes[j];
    }
    ExtensionField out(rg, u.real_flag);
    const SpaceTimeGrid& g = u.grid.base;
    const std::size_t ns = nspace_of(g);
    const int ny_in = u.ny(), ny_out = out.ny();
    for (std::size_t ks = 0; ks < ns; ++ks)
        for (int jr = 0; jr < ny_out; ++jr) {
            const int jsrc = std::abs(jr - J);
            for (int it = 0; it < g.Nt; ++it)
                out.values[(ks * ny_out + jr) * g.Nt + it] =
                    u.values[(ks * ny_in + jsrc) * g.Nt + it];
        }
    return out;
}

namespace {

// Exact cell average of |y|^a over [lo, hi] via the signed antiderivative
// sign(y) |y|^{1+a} / (1+a).
double lambda_cell_avg(double lo, double hi, double a) {
    const double ap1 = 1.0 + a;
    auto F = [ap1](double v) {
        return (v >= 0.0 ? 1.0 : -1.0) * std::pow(std::abs(v), ap1) / ap1;
    };
    return (F(hi) - F(lo)) / (hi - lo);
}

struct BumpVal {
    double val = 0.0;
    double dx0 = 0.0, dx1 = 0.0, dy = 0.0, dt = 0.0;
};

BumpVal eval_bump(const TestBump& th, int n, double L, double x0, double x1, double yv,
                  double tv) {
    auto wrapd = [L](double d) { return d - L * std::round(d / L); };
    const double zx0 = wrapd(x0 - th.x0[0]) / th.rx;
    const double zy = (yv - th.y0) / th.ry;
    const double zt = (tv - th.t0) / th.rt;
    BumpVal b;
    if (std::abs(zx0) >= 1.0 || std::abs(zy) >= 1.0 || std::abs(zt) >= 1.0) return b;
    double zx1 = 0.0;
    if (n == 2) {
        zx1 = wrapd(x1 - th.x0[1]) / th.rx;
        if (std::abs(zx1) >= 1.0) return b;
    }
    const double px0 = bump_profile(zx0), py = bump_profile(zy), pt = bump_profile(zt);
    const double px1 = n == 2 ? bump_profile(zx1) : 1.0;
    b.val = px0 * px1 * py * pt;
    b.dx0 = bump_profile_deriv(zx0) / th.rx * px1 * py * pt;
    if (n == 2) b.dx1 = px0 * bump_profile_deriv(zx1) / th.rx * py * pt;
    b.dy = px0 * px1 * bump_profile_deriv(zy) / th.ry * pt;
    b.dt = px0 * px1 * py * bump_profile_deriv(zt) / th.rt;
    return b;
}

} // namespace

double weak_residual(const ExtensionField& u, const TestBump& th, const FracParams& p) {
    const SpaceTimeGrid& g = u.grid.base;
    const std::vector<double>& y = u.grid.y_nodes;
    const int ny = u.ny();
    if (static_cast<int>(th.x0.size()) != g.n)
        throw shape_error("weak_residual: test bump dimension mismatch");
    if (!(th.rx > 0.0) || !(th.ry > 0.0) || !(th.rt > 0.0))
        throw config_error("weak_residual: bump radii must be positive");
    if (th.rx > 0.5 * g.L)
        throw config_error("weak_residual: bump support exceeds the spatial period");
    if (!(th.t0 - th.rt > 0.0) || !(th.t0 + th.rt < g.T))
        throw config_error("weak_residual: bump support exceeds the time window");
    if (!(th.y0 - th.ry > y.front()) || !(th.y0 + th.ry < y.back()))
        throw config_error("weak_residual: bump support exceeds the y range");

    // Node cell geometry in y.
    std::vector<double> wy(ny), lam(ny);
    for (int j = 0; j < ny; ++j) {
        const double lo = j == 0 ? y[0] : 0.5 * (y[j - 1] + y[j]);
        const double hi = j == ny - 1 ? y[ny - 1] : 0.5 * (y[j] + y[j + 1]);
        wy[j] = hi - lo;
        lam[j] = lambda_cell_avg(lo, hi, p.a);
    }

    const double hx = g.hx(), ht = g.ht();
    const double wxn = std::pow(hx, g.n);
    const std::size_t ns = nspace_of(g);
    const int N = g.Nx;

    auto uval = [&](std::size_t ks, int j, int it) {
        return u.values[(ks * ny + j) * g.Nt + it];
    };
    auto xcoord = [&](std::size_t ks, int axis) {
        const int i = g.n == 1 ? static_cast<int>(ks)
                               : (axis == 0 ? static_cast<int>(ks) / N
                                            : static_cast<int>(ks) % N);
        return i * hx;
    };
    auto xneighbor = [&](std::size_t ks, int axis, int shift) {
        if (g.n == 1) {
            const int i = (static_cast<int>(ks) + shift + N) % N;
            return static_cast<std::size_t>(i);
        }
        int i0 = static_cast<int>(ks) / N, i1 = static_cast<int>(ks) % N;
        if (axis == 0) i0 = (i0 + shift + N) % N;
        else i1 = (i1 + shift + N) % N;
        return static_cast<std::size_t>(i0) * N + i1;
    };

    cplx grad_term(0.0, 0.0), time_term(0.0, 0.0), bdry_term(0.0, 0.0);
    for (std::size_t ks = 0; ks < ns; ++ks) {
        const double xv0 = xcoord(ks, 0);
        const double xv1 = g.n == 2 ? xcoord(ks, 1) : 0.0;
        for (int j = 0; j < ny; ++j) {
            const double yv = y[j];
            if (std::abs(yv - th.y0) >= th.ry) continue;
            const double cellw = lam[j] * wxn * wy[j];
            for (int it = 0; it < g.Nt; ++it) {
                const double tv = it * ht;
                const BumpVal bn = eval_bump(th, g.n, g.L, xv0, xv1, yv, tv);
                const BumpVal bp =
                    eval_bump(th, g.n, g.L, xv0, xv1, yv, (it + 1) * ht);
                if (bn.val == 0.0 && bp.val == 0.0 && bn.dx0 == 0.0 && bn.dy == 0.0)
                    continue;
                const cplx uc = uval(ks, j, it);
                // time telescoping: u(t_m) (theta(t_{m+1}) - theta(t_m))
                time_term += cellw * uc * (bp.val - bn.val);
                if (bn.val != 0.0 || bn.dx0 != 0.0 || bn.dx1 != 0.0 || bn.dy != 0.0) {
                    // centered discrete gradient of u
                    cplx ux0 = (uval(xneighbor(ks, 0, 1), j, it) -
                                uval(xneighbor(ks, 0, -1), j, it)) /
                               (2.0 * hx);
                    cplx gdot = ux0 * bn.dx0;
                    if (g.n == 2) {
                        cplx ux1 = (uval(xneighbor(ks, 1, 1), j, it) -
                                    uval(xneighbor(ks, 1, -1), j, it)) /
                                   (2.0 * hx);
                        gdot += ux1 * bn.dx1;
                    }
                    cplx uy;
                    if (j == 0) {
                        uy = (uval(ks, 1, it) - uval(ks, 0, it)) / (y[1] - y[0]);
                    } else if (j == ny - 1) {
                        uy = (uval(ks, j, it) - uval(ks, j - 1, it)) / (y[j] - y[j - 1]);
                    } else {
                        const double hm = y[j] - y[j - 1], hp = y[j + 1] - y[j];
                        uy = (hm / hp * (uval(ks, j + 1, it) - uc) +
                              hp / hm * (uc - uval(ks, j - 1, it))) /
                             (hm + hp);
                    }
                    gdot += uy * bn.dy;
                    grad_term += cellw * ht * gdot;
                }
            }
            // time-boundary terms at t1 = 0, t2 = T (u periodic, theta not)
            const BumpVal b0 = eval_bump(th, g.n, g.L, xv0, xv1, yv, 0.0);
            const BumpVal bT = eval_bump(th, g.n, g.L, xv0, xv1, yv, g.T);
            if (b0.val != 0.0 || bT.val != 0.0)
                bdry_term += cellw * uval(ks, j, 0) * (bT.val - b0.val);
        }
    }
    return std::abs(grad_term - time_term + bdry_term);
}

std::vector<double> weighted_slab_mean(const ExtensionField& u, const FracParams& p) {
    const SpaceTimeGrid& g = u.grid.base;
    const std::vector<double>& y = u.grid.y_nodes;
    const std::size_t ns = nspace_of(g);
    const int ny = u.ny();
    std::vector<double> mass(ny);
    double total_mass = 0.0;
    for (int j = 0; j < ny; ++j) {
        const double lo = j == 0 ? y[0] : 0.5 * (y[j - 1] + y[j]);
        const double hi = j == ny - 1 ? y[ny - 1] : 0.5 * (y[j] + y[j + 1]);
        mass[j] = lambda_cell_avg(lo, hi, p.a) * (hi - lo);
        total_mass += mass[j];
    }
    std::vector<double> out(g.Nt, 0.0);
    for (int it = 0; it < g.Nt; ++it) {
        double acc = 0.0;
        for (std::size_t ks = 0; ks < ns; ++ks)
            for (int j = 0; j < ny; ++j)
                acc += mass[j] * u.values[(ks * ny + j) * g.Nt + it].real();
        out[it] = acc / (static_cast<double>(ns) * total_mass);
    }
    return out;
}

} // namespace fracheat
