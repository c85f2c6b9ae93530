#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "fracheat/fft.hpp"
#include "fracheat/fracop.hpp"
#include "fracheat/generate.hpp"
#include "fracheat/grid.hpp"
#include "fracheat/params.hpp"
#include "fracheat/special.hpp"

using namespace fracheat;

namespace {

Field smooth_random(const SpaceTimeGrid& g, unsigned seed) {
    // random band-limited real field: decaying coefficients on |kx|,|kt| <= 3
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Field f(g, true);
    for (int kx = -3; kx <= 3; ++kx)
        for (int kt = -3; kt <= 3; ++kt) {
            if (kx < 0 || (kx == 0 && kt < 0)) continue; // one per conjugate pair
            double amp = u(rng) / (1.0 + kx * kx + kt * kt);
            double pha = std::numbers::pi * u(rng);
            for (int ix = 0; ix < g.Nx; ++ix)
                for (int it = 0; it < g.Nt; ++it) {
                    double arg = 2 * std::numbers::pi *
                                     (double(kx * ix) / g.Nx + double(kt * it) / g.Nt) +
                                 pha;
                    f.at(ix, it) += amp * std::cos(arg);
                }
        }
    return f;
}

double rel_l2(const Field& f, const Field& g) { return norms(f, g).second; }

} // namespace

TEST_SUITE("fracop") {

TEST_CASE("multiplier: branch, zero mode, conjugate symmetry") {
    SpaceTimeGrid g = make_grid(1, 16, 8, 2 * std::numbers::pi, 1.0);
    for (double s : {0.25, 0.5, 0.9}) {
        Multiplier m = make_multiplier(g, s);
        CHECK(m.table[0] == cplx(0.0, 0.0));
        for (int kx = 0; kx < g.Nx; ++kx)
            for (int kt = 0; kt < g.Nt; ++kt) {
                double xi = xi_freq(kx, g.Nx, g.L);
                double om = omega_freq(kt, g.Nt, g.T);
                cplx v = m.table[std::size_t(kx) * g.Nt + kt];
                if (kx == 0 && kt == 0) continue;
                if (kt == g.Nt / 2) {
                    CHECK(v.imag() == 0.0); // symmetrized time-Nyquist row
                    continue;
                }
                cplx want = std::pow(cplx(xi * xi, om), s); // principal branch
                CHECK(std::abs(v - want) <= 1e-13 * std::abs(want));
                CHECK(std::abs(std::arg(v)) <= s * std::numbers::pi / 2 + 1e-12);
            }
        // conjugate symmetry across omega -> -omega
        for (int kx = 0; kx < g.Nx; ++kx)
            for (int kt = 1; kt < g.Nt / 2; ++kt) {
                cplx up = m.table[std::size_t(kx) * g.Nt + kt];
                cplx dn = m.table[std::size_t(kx) * g.Nt + (g.Nt - kt)];
                CHECK(dn == std::conj(up));
            }
    }
}

TEST_CASE("spectral route: constants, single mode, linearity, reality") {
    SpaceTimeGrid g = make_grid(1, 32, 16, 2 * std::numbers::pi, 1.0);
    FracParams p = make_params(0.6);

    Field c = generate_builtin("constant", {{"c", 4.0}}, g);
    CHECK(apply_spectral(c, p).max_abs() < 1e-13);

    // cos mode: output Re(m(xi,omega) e^{i(xi x + omega t)})
    Field f = generate_builtin("mode", {{"kx", 2.0}, {"kt", 1.0}}, g);
    Field out = apply_spectral(f, p);
    cplx m = std::pow(cplx(4.0, 2 * std::numbers::pi), p.s);
    double worst = 0.0;
    for (int ix = 0; ix < g.Nx; ++ix)
        for (int it = 0; it < g.Nt; ++it) {
            double arg = 2.0 * (ix * g.hx()) + 2 * std::numbers::pi * (it * g.ht());
            cplx want = m * std::exp(cplx(0.0, arg));
            worst = std::max(worst, std::abs(out.at(ix, it) - want.real()));
        }
    CHECK(worst < 1e-12);
    CHECK(out.max_imag() < 1e-12);
    CHECK(out.real_flag);

    // positive multiple of the data where cos peaks (sign sanity)
    CHECK(out.at(0, 0).real() > 0.0);

    Field a = smooth_random(g, 3), b = smooth_random(g, 4);
    Field sum(g, true);
    for (std::size_t i = 0; i < sum.values.size(); ++i)
        sum.values[i] = 2.0 * a.values[i] - 0.5 * b.values[i];
    Field la = apply_spectral(a, p), lb = apply_spectral(b, p), ls = apply_spectral(sum, p);
    double lin = 0.0;
    for (std::size_t i = 0; i < ls.values.size(); ++i)
        lin = std::max(lin,
                       std::abs(ls.values[i] - 2.0 * la.values[i] + 0.5 * lb.values[i]));
    CHECK(lin < 1e-12 * std::max(1.0, la.max_abs()));
}

TEST_CASE("spectral route: s = 1 degenerates to the heat operator") {
    SpaceTimeGrid g = make_grid(1, 32, 16, 2 * std::numbers::pi, 1.0);
    Field f = generate_builtin("mode", {{"kx", 3.0}, {"kt", 2.0}}, g);
    Field out = apply_spectral_raw(f, 1.0);
    // (d/dt - Lap) cos(3x + 4 pi t) = -4 pi sin(.) + 9 cos(.)
    double worst = 0.0;
    for (int ix = 0; ix < g.Nx; ++ix)
        for (int it = 0; it < g.Nt; ++it) {
            double arg = 3.0 * ix * g.hx() + 4 * std::numbers::pi * it * g.ht();
            double want = -4 * std::numbers::pi * std::sin(arg) + 9.0 * std::cos(arg);
            worst = std::max(worst, std::abs(out.at(ix, it) - want));
        }
    CHECK(worst < 1e-10);
}

TEST_CASE("spectral route: semigroup and time-independent reduction") {
    SpaceTimeGrid g = make_grid(1, 32, 16, 2 * std::numbers::pi, 1.0);
    Field f = smooth_random(g, 9);
    Field two = apply_spectral(apply_spectral(f, make_params(0.3)), make_params(0.45));
    Field one = apply_spectral(f, make_params(0.75));
    double diff = 0.0;
    for (std::size_t i = 0; i < one.values.size(); ++i)
        diff = std::max(diff, std::abs(two.values[i] - one.values[i]));
    CHECK(diff < 1e-10 * std::max(1.0, one.max_abs()));

    // f(x,t) = g(x): output time-independent, equal to |xi|^{2s} ghat
    Field gx(g, true);
    for (int ix = 0; ix < g.Nx; ++ix) {
        double val = std::cos(ix * g.hx()) + 0.3 * std::cos(2.0 * ix * g.hx());
        for (int it = 0; it < g.Nt; ++it) gx.at(ix, it) = val;
    }
    FracParams p = make_params(0.4);
    Field og = apply_spectral(gx, p);
    double tvar = 0.0, match = 0.0;
    for (int ix = 0; ix < g.Nx; ++ix) {
        double want = std::cos(ix * g.hx()) +
                      0.3 * std::pow(4.0, p.s) * std::cos(2.0 * ix * g.hx());
        for (int it = 0; it < g.Nt; ++it) {
            tvar = std::max(tvar, std::abs(og.at(ix, it) - og.at(ix, 0)));
            match = std::max(match, std::abs(og.at(ix, it).real() - want));
        }
    }
    CHECK(tvar < 1e-12);
    CHECK(match < 1e-12);
}

TEST_CASE("spectral route: parabolic scaling identity") {
    // Nt large enough that r = 4 keeps the mode below the time Nyquist
    SpaceTimeGrid g = make_grid(1, 64, 64, 2 * std::numbers::pi, 1.0);
    FracParams p = make_params(0.35);
    Field f = generate_builtin("mode", {{"kx", 1.0}, {"kt", 1.0}}, g);
    for (double r : {2.0, 4.0}) {
        Field lhs = apply_spectral(parabolic_rescale(f, r), p);
        Field rhs = parabolic_rescale(apply_spectral(f, p), r);
        for (auto& v : rhs.values) v *= std::pow(r, 2.0 * p.s);
        double diff = 0.0;
        for (std::size_t i = 0; i < lhs.values.size(); ++i)
            diff = std::max(diff, std::abs(lhs.values[i] - rhs.values[i]));
        CHECK(diff < 1e-8 * std::max(1.0, rhs.max_abs()));
    }
}

TEST_CASE("singular rule: structure and mode factor accuracy") {
    SpaceTimeGrid g = make_grid(1, 32, 16, 2 * std::numbers::pi, 1.0);
    for (double s : {0.25, 0.5, 0.75, 0.9}) {
        FracParams p = make_params(s);
        SingularQuadRule rule = make_singular_rule(p, g);
        REQUIRE(!rule.nodes.empty());
        CHECK(rule.T_cut > 0.0);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            CHECK(rule.nodes[i] > 0.0);
            CHECK(rule.weights[i] > 0.0);
            if (i) CHECK(rule.nodes[i] > rule.nodes[i - 1]);
        }
        // closed form: integral = Gamma(1-s)/s * A^s
        cplx A(1.0, 2.0);
        cplx got = singular_mode_factor(A, s, rule);
        cplx want = gammafn(1.0 - s) / s * std::pow(A, s);
        double tol = s > 0.8 ? 1e-4 : 1e-5;
        CHECK(std::abs(got - want) <= tol * std::abs(want));
    }
}

TEST_CASE("singular route: constants, mode accuracy, positivity") {
    SpaceTimeGrid g = make_grid(1, 32, 16, 2 * std::numbers::pi, 1.0);
    FracParams p = make_params(0.5);
    SingularQuadRule rule = make_singular_rule(p, g);

    Field c = generate_builtin("constant", {{"c", -7.0}}, g);
    CHECK(apply_singular(c, p, rule).max_abs() < 1e-12);

    Field f = generate_builtin("mode", {{"kx", 1.0}, {"kt", 1.0}}, g);
    Field sing = apply_singular(f, p, rule);
    Field spec = apply_spectral(f, p);
    auto [sup, l2] = norms(sing, spec);
    CHECK(sup <= 1e-4);
    CHECK(l2 <= 1e-4);

    // verified refinement path accepts a smooth field
    CHECK_NOTHROW(apply_singular(f, p, rule, 1e-3));

    // purely spatial cosine: factor |xi|^{2s} is positive
    Field gx(g, true);
    for (int ix = 0; ix < g.Nx; ++ix)
        for (int it = 0; it < g.Nt; ++it) gx.at(ix, it) = std::cos(2.0 * ix * g.hx());
    Field og = apply_singular(gx, p, rule);
    for (int ix = 0; ix < g.Nx; ++ix)
        for (int it = 0; it < g.Nt; ++it) {
            double ref = std::cos(2.0 * ix * g.hx());
            if (std::abs(ref) > 0.1) CHECK(og.at(ix, it).real() * ref > 0.0);
        }
}

TEST_CASE("singular route: time-independent data stays time-independent") {
    SpaceTimeGrid g = make_grid(1, 32, 16, 2 * std::numbers::pi, 1.0);
    FracParams p = make_params(0.3);
    SingularQuadRule rule = make_singular_rule(p, g);
    Field gx(g, true);
    for (int ix = 0; ix < g.Nx; ++ix)
        for (int it = 0; it < g.Nt; ++it)
            gx.at(ix, it) = std::cos(ix * g.hx()) - 0.2 * std::cos(3.0 * ix * g.hx());
    Field out = apply_singular(gx, p, rule);
    double tvar = 0.0;
    for (int ix = 0; ix < g.Nx; ++ix)
        for (int it = 1; it < g.Nt; ++it)
            tvar = std::max(tvar, std::abs(out.at(ix, it) - out.at(ix, 0)));
    CHECK(tvar < 1e-12);
    // and matches |xi|^{2s} per mode to the rule accuracy
    double worst = 0.0;
    for (int ix = 0; ix < g.Nx; ++ix) {
        double want = std::cos(ix * g.hx()) -
                      0.2 * std::pow(9.0, p.s) * std::cos(3.0 * ix * g.hx());
        worst = std::max(worst, std::abs(out.at(ix, 0).real() - want));
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("extension route: probes, trace fit, single mode accuracy") {
    SpaceTimeGrid g = make_grid(1, 32, 16, 2 * std::numbers::pi, 1.0);
    FracParams p = make_params(0.5);

    auto probes = default_probe_heights(g);
    REQUIRE(probes.size() >= 4);
    for (std::size_t i = 0; i + 1 < probes.size(); ++i)
        CHECK(probes[i] > probes[i + 1]); // descending dyadic heights
    CHECK(probes.back() > 0.0);

    // planted small-y expansion d(y) = c0 + c1 y^{2-2s} + c2 y^2 recovers c0
    auto alpha = trace_fit_weights(probes, p.s);
    REQUIRE(alpha.size() == probes.size());
    double c0 = 0.0;
    for (std::size_t i = 0; i < probes.size(); ++i) {
        double y = probes[i];
        double d = 1.7 - 0.4 * std::pow(y, 2.0 - 2.0 * p.s) + 0.9 * y * y;
        c0 += alpha[i] * d;
    }
    CHECK(c0 == doctest::Approx(1.7).epsilon(1e-10));

    Field c = generate_builtin("constant", {{"c", 2.0}}, g);
    CHECK(apply_extension_route(c, p, probes).max_abs() < 1e-10);

    // calibrated on mode (1,1); test an independent mode
    Field f = generate_builtin("mode", {{"kx", 2.0}, {"kt", 1.0}}, g);
    Field ext = apply_extension_route(f, p, probes);
    Field spec = apply_spectral(f, p);
    CHECK(rel_l2(ext, spec) <= 1e-3);
}

TEST_CASE("extension route: fitted constant near the closed form") {
    SpaceTimeGrid g = make_grid(1, 32, 16, 2 * std::numbers::pi, 1.0);
    CHECK(extension_constant_theory(0.5) == doctest::Approx(1.0).epsilon(1e-13));
    for (double s : {0.3, 0.5, 0.7}) {
        FracParams p = make_params(s);
        double cfit = calibrate_extension_constant(g, p, default_probe_heights(g));
        double cth = extension_constant_theory(s);
        CHECK(cfit == doctest::Approx(cth).epsilon(5e-2));
        CHECK(cfit > 0.0);
    }
}

TEST_CASE("point oracle: constants, single mode, random field spot checks") {
    SpaceTimeGrid g = make_grid(1, 32, 16, 2 * std::numbers::pi, 1.0);
    FracParams p = make_params(0.5);

    Field c = generate_builtin("constant", {{"c", 5.0}}, g);
    CHECK(std::abs(oracle_singular(c, p, {1.0}, 0.5)) < 1e-10);

    Field f = generate_builtin("mode", {{"kx", 1.0}, {"kt", 1.0}}, g);
    double x0 = 3 * g.hx(), t0 = 5 * g.ht();
    cplx m = std::pow(cplx(1.0, 2 * std::numbers::pi), p.s);
    cplx want = m * std::exp(cplx(0.0, x0 + 2 * std::numbers::pi * t0));
    cplx got = oracle_singular(f, p, {x0}, t0);
    CHECK(std::abs(got - want.real()) < 1e-5);

    Field r = smooth_random(g, 17);
    SingularQuadRule rule = make_singular_rule(p, g);
    Field sing = apply_singular(r, p, rule);
    double scale = sing.max_abs();
    for (auto [ix, it] : {std::pair{2, 3}, std::pair{11, 8}, std::pair{25, 14}}) {
        cplx o = oracle_singular(r, p, {ix * g.hx()}, it * g.ht());
        CHECK(std::abs(o - sing.at(ix, it)) < 1e-3 * scale);
    }
}

TEST_CASE("consistency report: structure, single mode, zero field") {
    SpaceTimeGrid g = make_grid(1, 32, 16, 2 * std::numbers::pi, 1.0);
    FracParams p = make_params(0.5);
    Field f = generate_builtin("mode", {{"kx", 1.0}, {"kt", 1.0}}, g);
    RouteReport rep = consistency_report(f, p);
    REQUIRE(rep.route_names == std::vector<std::string>{"spectral", "singular", "extension"});
    REQUIRE(rep.outputs.size() == 3);
    REQUIRE(rep.pairwise.size() == 3);
    CHECK(rep.calibration.at("extension") > 0.0);
    for (auto& [key, err] : rep.pairwise) {
        CHECK(err.l2_rel <= 1e-3);
        CHECK(err.sup_rel <= 5e-3);
    }

    Field z(g, true);
    RouteReport zr = consistency_report(z, p);
    for (auto& [key, out] : zr.outputs) CHECK(out.max_abs() == 0.0);
    for (auto& [key, err] : zr.pairwise) {
        CHECK(err.sup_rel == 0.0);
        CHECK(err.l2_rel == 0.0);
    }

    CHECK_THROWS_AS(calibrate_extension_on(z, p, default_probe_heights(g)),
                    numerical_error);
}

} // TEST_SUITE
