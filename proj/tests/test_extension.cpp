#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "fracheat/extension.hpp"
#include "fracheat/fracop.hpp"
#include "fracheat/generate.hpp"
#include "fracheat/grid.hpp"
#include "fracheat/kernels.hpp"
#include "fracheat/params.hpp"

using namespace fracheat;

namespace {

Field mode11(const SpaceTimeGrid& g) {
    return generate_builtin("mode", {{"kx", 1.0}, {"kt", 1.0}}, g);
}

// relative sup distance between two extension fields on shared mesh
double ext_sup_rel(const ExtensionField& u, const ExtensionField& v) {
    double d = 0.0, m = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        d = std::max(d, std::abs(u.values[i] - v.values[i]));
        m = std::max(m, std::abs(v.values[i]));
    }
    return d / std::max(m, 1e-300);
}

// relative l2 over the rows with y in [ylo, yhi]
double ext_l2_window(const ExtensionField& u, const ExtensionField& v, double ylo,
                     double yhi) {
    const auto& yn = u.grid.y_nodes;
    double d2 = 0.0, m2 = 0.0;
    int ny = u.ny();
    std::size_t ns = u.values.size() / (std::size_t(ny) * u.grid.base.Nt);
    for (std::size_t ks = 0; ks < ns; ++ks)
        for (int j = 0; j < ny; ++j) {
            if (yn[j] < ylo || yn[j] > yhi) continue;
            for (int it = 0; it < u.grid.base.Nt; ++it) {
                std::size_t i = (ks * ny + j) * u.grid.base.Nt + it;
                d2 += std::norm(u.values[i] - v.values[i]);
                m2 += std::norm(v.values[i]);
            }
        }
    return std::sqrt(d2) / std::max(std::sqrt(m2), 1e-300);
}

} // namespace

TEST_SUITE("extension") {

TEST_CASE("extension grid: grading and validation") {
    SpaceTimeGrid g = make_grid(1, 16, 8, 2 * std::numbers::pi, 1.0);
    for (double s : {0.25, 0.5, 0.75}) {
        FracParams p = make_params(s);
        ExtensionGrid eg = make_extension_grid(g, p, 32, 6.0);
        REQUIRE(eg.J() == 32);
        CHECK(eg.y_nodes.front() == 0.0);
        CHECK(eg.y_nodes.back() == doctest::Approx(6.0).epsilon(1e-15));
        for (int j = 1; j <= 32; ++j) CHECK(eg.y_nodes[j] > eg.y_nodes[j - 1]);
        // cells concentrate toward y = 0 at least quadratically
        CHECK(eg.y_nodes[1] <= 6.0 / (32.0 * 32.0) * 1.0000001);
    }
    CHECK_THROWS_AS(make_extension_grid(g, make_params(0.5), 8, 6.0), config_error);
    CHECK_THROWS_AS(make_extension_grid(g, make_params(0.5), 32, 0.0), config_error);
}

TEST_CASE("poisson_extend: constants, trace row, decay in y") {
    SpaceTimeGrid g = make_grid(1, 32, 16, 2 * std::numbers::pi, 1.0);
    FracParams p = make_params(0.4);
    ExtensionGrid eg = make_extension_grid(g, p, 24, 6.0);

    Field c = generate_builtin("constant", {{"c", 2.5}}, g);
    ExtensionField uc = poisson_extend(c, p, eg);
    double worst = 0.0;
    for (auto& v : uc.values) worst = std::max(worst, std::abs(v - cplx(2.5, 0.0)));
    CHECK(worst < 1e-12);

    Field f = mode11(g);
    ExtensionField u = poisson_extend(f, p, eg);
    // row 0 carries f itself
    for (int ix = 0; ix < g.Nx; ++ix)
        for (int it = 0; it < g.Nt; ++it)
            CHECK(std::abs(u.at(ix, 0, it) - f.at(ix, it)) < 1e-14);
    // mode amplitude decays strictly with height
    auto rowamp = [&](int j) {
        double m = 0.0;
        for (int ix = 0; ix < g.Nx; ++ix)
            for (int it = 0; it < g.Nt; ++it) m = std::max(m, std::abs(u.at(ix, j, it)));
        return m;
    };
    double prev = rowamp(0);
    for (int j = 4; j <= 24; j += 4) {
        double cur = rowamp(j);
        CHECK(cur < prev);
        prev = cur;
    }

    // time-independent data extends time-independently
    Field gx(g, true);
    for (int ix = 0; ix < g.Nx; ++ix)
        for (int it = 0; it < g.Nt; ++it) gx.at(ix, it) = std::cos(ix * g.hx());
    ExtensionField ug = poisson_extend(gx, p, eg);
    double tvar = 0.0;
    for (int ix = 0; ix < g.Nx; ++ix)
        for (int j = 0; j <= 24; ++j)
            for (int it = 1; it < g.Nt; ++it)
                tvar = std::max(tvar, std::abs(ug.at(ix, j, it) - ug.at(ix, j, 0)));
    CHECK(tvar < 1e-12);
}

TEST_CASE("solve_extension_pde: constants are exact fixed points") {
    SpaceTimeGrid g = make_grid(1, 16, 8, 2 * std::numbers::pi, 1.0);
    FracParams p = make_params(0.3);
    ExtensionGrid eg = make_extension_grid(g, p, 24, 4.0);
    Field c = generate_builtin("constant", {{"c", -1.25}}, g);
    for (const char* scheme : {"be", "tr-bdf2"}) {
        for (const char* top : {"poisson", "neumann"}) {
            PdeOptions opt;
            opt.scheme = scheme;
            opt.top = top;
            ExtensionField u = solve_extension_pde(c, p, eg, opt);
            double worst = 0.0;
            for (auto& v : u.values) worst = std::max(worst, std::abs(v - cplx(-1.25, 0.0)));
            CHECK(worst < 1e-13);
        }
    }
}

TEST_CASE("solve_extension_pde: agrees with the Poisson formula, improving with mesh") {
    FracParams p = make_params(0.5);
    auto err_at = [&](int Nx, int Nt, int J) {
        SpaceTimeGrid g = make_grid(1, Nx, Nt, 2 * std::numbers::pi, 1.0);
        ExtensionGrid eg = make_extension_grid(g, p, J, 6.0);
        Field f = generate_builtin("gaussian-bump", {}, g);
        ExtensionField pde = solve_extension_pde(f, p, eg);
        ExtensionField ref = poisson_extend(f, p, eg);
        return ext_l2_window(pde, ref, 6.0 / 8.0, 3.0); // mid heights
    };
    double coarse = err_at(32, 16, 32);
    double fine = err_at(64, 32, 64);
    CHECK(fine <= 2e-2);
    CHECK(fine < coarse);
}

TEST_CASE("solve_extension_pde: discrete max principle") {
    SpaceTimeGrid g = make_grid(1, 16, 8, 2 * std::numbers::pi, 1.0);
    FracParams p = make_params(0.4);
    ExtensionGrid eg = make_extension_grid(g, p, 24, 4.0);
    Field f = generate_builtin("gaussian-bump", {{"amp", 2.0}}, g);
    double fmin = 1e300, fmax = -1e300;
    for (auto& v : f.values) {
        fmin = std::min(fmin, v.real());
        fmax = std::max(fmax, v.real());
    }
    PdeOptions be;
    be.scheme = "be";
    ExtensionField u = solve_extension_pde(f, p, eg, be);
    for (auto& v : u.values) {
        CHECK(v.real() >= fmin - 1e-12);
        CHECK(v.real() <= fmax + 1e-12);
    }
    // tr-bdf2 is not an M-matrix scheme: allow a small range-scaled overshoot
    ExtensionField u2 = solve_extension_pde(f, p, eg);
    const double slack = 1e-3 * (fmax - fmin);
    for (auto& v : u2.values) {
        CHECK(v.real() >= fmin - slack);
        CHECK(v.real() <= fmax + slack);
    }
}

TEST_CASE("solve_extension_pde: weighted slab mean conserved under Neumann top") {
    SpaceTimeGrid g = make_grid(1, 32, 16, 2 * std::numbers::pi, 1.0);
    FracParams p = make_params(0.35);
    ExtensionGrid eg = make_extension_grid(g, p, 32, 5.0);
    PdeOptions opt;
    opt.top = "neumann";

    // zero spatial mean at every time: the weighted mean stays 0
    Field f = mode11(g);
    ExtensionField u = solve_extension_pde(f, p, eg, opt);
    for (double m : weighted_slab_mean(u, p)) CHECK(std::abs(m) <= 1e-10);

    // constant data: mean pinned at the constant
    Field c = generate_builtin("constant", {{"c", 3.0}}, g);
    ExtensionField uc = solve_extension_pde(c, p, eg, opt);
    for (double m : weighted_slab_mean(uc, p)) CHECK(m == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("solve_extension_pde: ordered data yields ordered solutions") {
    SpaceTimeGrid g = make_grid(1, 8, 8, 2 * std::numbers::pi, 1.0);
    FracParams p = make_params(0.3);
    ExtensionGrid eg = make_extension_grid(g, p, 16, 3.0);
    PdeOptions opt;
    opt.scheme = "be";
    opt.top = "neumann";
    opt.fixed_periods = true;
    opt.max_periods = 3;
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        Field f1(g, true), f2(g, true);
        double cx = uni(rng) * g.L, ct = uni(rng) * g.T, w = 0.2 + 0.5 * uni(rng);
        for (int ix = 0; ix < g.Nx; ++ix)
            for (int it = 0; it < g.Nt; ++it) {
                double x = ix * g.hx(), t = it * g.ht();
                f1.at(ix, it) = std::sin(x + 2 * std::numbers::pi * t / g.T) * uni(rng);
                double dx = x - cx;
                dx -= g.L * std::round(dx / g.L);
                double dt = t - ct;
                dt -= g.T * std::round(dt / g.T);
                double z2 = (dx * dx + dt * dt) / (w * w);
                f2.at(ix, it) = f1.at(ix, it) + (z2 < 1.0 ? std::exp(-1.0 / (1.0 - z2)) : 0.0);
            }
        ExtensionField u1 = solve_extension_pde(f1, p, eg, opt);
        ExtensionField u2 = solve_extension_pde(f2, p, eg, opt);
        for (std::size_t i = 0; i < u1.values.size(); ++i)
            CHECK(u1.values[i].real() <= u2.values[i].real() + 1e-12);
    }
}

TEST_CASE("solve_heat_reference: recovers the a = 0 solve") {
    SpaceTimeGrid g = make_grid(1, 16, 8, 2 * std::numbers::pi, 1.0);
    FracParams p = make_params(0.5); // a = 0
    ExtensionGrid eg = make_extension_grid(g, p, 32, 4.0);
    Field f = generate_builtin("gaussian-bump", {}, g);
    ExtensionField uw = solve_extension_pde(f, p, eg);
    ExtensionField uh = solve_heat_reference(f, eg);
    CHECK(ext_sup_rel(uw, uh) <= 1e-8);
}

TEST_CASE("neumann_trace: constants vanish, poisson mode matches the symbol") {
    SpaceTimeGrid g = make_grid(1, 32, 16, 2 * std::numbers::pi, 1.0);
    FracParams p = make_params(0.5);
    ExtensionGrid eg = make_extension_grid(g, p, 96, 6.0);

    Field c = generate_builtin("constant", {{"c", 4.2}}, g);
    CHECK(neumann_trace(poisson_extend(c, p, eg), p).max_abs() < 1e-10);

    Field f = mode11(g);
    Field tr = neumann_trace(poisson_extend(f, p, eg), p);
    Field spec = apply_spectral(f, p);
    auto [sup, l2] = norms(tr, spec);
    CHECK(l2 <= 1e-3);
    (void)sup;
}

TEST_CASE("neumann_trace: pde solve against the spectral route") {
    // the pde solve is 2nd order in x and in the substep size, so the trace
    // error is dominated by (xi hx)^2 at moderate meshes
    FracParams p = make_params(0.5);
    auto trace_l2 = [&](int Nx, int J, int nsub) {
        SpaceTimeGrid g = make_grid(1, Nx, 64, 2 * std::numbers::pi, 1.0);
        ExtensionGrid eg = make_extension_grid(g, p, J, 6.0);
        Field f = generate_builtin("gaussian-bump", {}, g);
        PdeOptions opt;
        opt.nsub = nsub;
        Field tr = neumann_trace(solve_extension_pde(f, p, eg, opt), p);
        return norms(tr, apply_spectral(f, p)).second;
    };
    double coarse = trace_l2(32, 64, 1);
    double fine = trace_l2(64, 64, 2);
    CHECK(coarse <= 5e-2);
    CHECK(fine <= 1.5e-2);
    CHECK(fine < coarse);
}

TEST_CASE("even_reflect: symmetric grid, even values, involution") {
    SpaceTimeGrid g = make_grid(1, 16, 8, 2 * std::numbers::pi, 1.0);
    FracParams p = make_params(0.4);
    ExtensionGrid eg = make_extension_grid(g, p, 16, 3.0);
    ExtensionField u = poisson_extend(mode11(g), p, eg);
    ExtensionField r = even_reflect(u);

    int J = eg.J();
    REQUIRE(r.ny() == 2 * J + 1);
    for (int j = 0; j <= 2 * J; ++j)
        CHECK(r.grid.y_nodes[j] == -r.grid.y_nodes[2 * J - j]);
    // evenness and trace preservation, bit exact
    for (int ix = 0; ix < g.Nx; ++ix)
        for (int it = 0; it < g.Nt; ++it) {
            CHECK(r.at(ix, J, it) == u.at(ix, 0, it));
            for (int j = 0; j <= J; ++j)
                CHECK(r.at(ix, J + j, it) == r.at(ix, J - j, it));
        }
    // reflecting the reflected field reproduces it exactly
    ExtensionField rr = even_reflect(r);
    REQUIRE(rr.values.size() == r.values.size());
    bool same = true;
    for (std::size_t i = 0; i < r.values.size(); ++i)
        if (rr.values[i] != r.values[i]) same = false;
    CHECK(same);
}

TEST_CASE("weak_residual: constants, support validation") {
    SpaceTimeGrid g = make_grid(1, 16, 8, 2 * std::numbers::pi, 1.0);
    FracParams p = make_params(0.5);
    ExtensionGrid eg = make_extension_grid(g, p, 24, 6.0);
    Field c = generate_builtin("constant", {{"c", 2.0}}, g);
    ExtensionField u = poisson_extend(c, p, eg);

    TestBump theta{{std::numbers::pi}, 1.5, 0.5, 1.5, 1.0, 0.3};
    CHECK(weak_residual(u, theta, p) <= 1e-10);

    // reflected constant across a straddling bump is also residual-free
    ExtensionField r = even_reflect(u);
    TestBump straddle{{std::numbers::pi}, 0.0, 0.5, 1.5, 0.8, 0.3};
    CHECK(weak_residual(r, straddle, p) <= 1e-10);

    TestBump bad_y{{std::numbers::pi}, 5.9, 0.5, 1.5, 1.0, 0.3}; // pokes above Y
    CHECK_THROWS_AS(weak_residual(u, bad_y, p), config_error);
    TestBump bad_t{{std::numbers::pi}, 1.5, 0.1, 1.5, 1.0, 0.3}; // pokes below t = 0
    CHECK_THROWS_AS(weak_residual(u, bad_t, p), config_error);
    TestBump bad_x{{std::numbers::pi}, 1.5, 0.5, 4.0, 1.0, 0.3}; // rx > L/2
    CHECK_THROWS_AS(weak_residual(u, bad_x, p), config_error);
    TestBump bad_y0{{std::numbers::pi}, 0.5, 0.5, 1.5, 1.0, 0.3}; // dips below y = 0
    CHECK_THROWS_AS(weak_residual(u, bad_y0, p), config_error);
}

TEST_CASE("weak_residual: first-order decay for the Poisson extension") {
    for (double s : {0.5, 0.3}) {
        FracParams p = make_params(s);
        auto resid = [&](int Nx, int Nt, int J) {
            SpaceTimeGrid g = make_grid(1, Nx, Nt, 2 * std::numbers::pi, 1.0);
            ExtensionGrid eg = make_extension_grid(g, p, J, 6.0);
            ExtensionField u = poisson_extend(mode11(g), p, eg);
            TestBump theta{{std::numbers::pi}, 1.5, 0.5, 1.5, 1.0, 0.35};
            return weak_residual(u, theta, p);
        };
        double r1 = resid(24, 12, 24);
        double r2 = resid(48, 24, 48);
        CHECK(r2 > 0.0);
        CHECK(r1 / r2 >= 1.7); // at least first order under doubling
    }
}

TEST_CASE("weighted_slab_mean: well defined on reflected grids") {
    SpaceTimeGrid g = make_grid(1, 16, 8, 2 * std::numbers::pi, 1.0);
    for (double s : {0.25, 0.75}) {
        FracParams p = make_params(s);
        ExtensionGrid eg = make_extension_grid(g, p, 16, 3.0);
        ExtensionField u = poisson_extend(generate_builtin("constant", {{"c", 1.5}}, g), p, eg);
        auto mean_half = weighted_slab_mean(u, p);
        auto mean_full = weighted_slab_mean(even_reflect(u), p);
        REQUIRE(mean_half.size() == std::size_t(g.Nt));
        REQUIRE(mean_full.size() == std::size_t(g.Nt));
        for (int it = 0; it < g.Nt; ++it) {
            CHECK(std::isfinite(mean_full[it]));
            CHECK(mean_half[it] == doctest::Approx(1.5).epsilon(1e-12));
            CHECK(mean_full[it] == doctest::Approx(1.5).epsilon(1e-12));
        }
    }
}

} // TEST_SUITE
