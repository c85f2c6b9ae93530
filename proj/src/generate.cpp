#include "fracheat/generate.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "fracheat/special.hpp"

namespace fracheat {

double bump_profile(double z) {
    if (std::abs(z) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - z * z));
}

double bump_profile_deriv(double z) {
    if (std::abs(z) >= 1.0) return 0.0;
    const double q = 1.0 - z * z;
    return bump_profile(z) * (-2.0 * z) / (q * q);
}

namespace {

double wrap(double d, double period) { return d - period * std::round(d / period); }

double get(const std::map<std::string, double>& params, const std::string& key,
           double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

void check_keys(const std::map<std::string, double>& params,
                const std::set<std::string>& allowed, const std::string& name) {
    for (const auto& kv : params)
        if (!allowed.count(kv.first))
            throw config_error("generate_builtin: unknown parameter '" + kv.first +
                               "' for generator '" + name + "'");
}

} // namespace

Field generate_builtin(const std::string& name,
                       const std::map<std::string, double>& params,
                       const SpaceTimeGrid& g) {
    Field f(g, true);
    const double hx = g.hx(), ht = g.ht();

    if (name == "constant") {
        check_keys(params, {"c"}, name);
        const cplx c(get(params, "c", 1.0), 0.0);
        for (auto& v : f.values) v = c;
        return f;
    }

    if (name == "mode") {
        check_keys(params, {"kx", "ky", "kt", "amp"}, name);
        const double amp = get(params, "amp", 1.0);
        const double kx = get(params, "kx", 1.0);
        const double ky = get(params, "ky", 0.0);
        const double kt = get(params, "kt", 0.0);
        if (kx != std::round(kx) || ky != std::round(ky) || kt != std::round(kt))
            throw config_error("generate_builtin: mode indices must be integers");
        if (g.n == 1 && ky != 0.0)
            throw config_error("generate_builtin: ky given on a 1-D grid");
        const double twoPi = 2.0 * std::numbers::pi;
        auto phase = [&](int ix, int iy, int it) {
            double ph = kx * ix * hx / g.L + kt * it * ht / g.T;
            if (g.n == 2) ph += ky * iy * hx / g.L;
            return twoPi * ph;
        };
        if (g.n == 1) {
            for (int ix = 0; ix < g.Nx; ++ix)
                for (int it = 0; it < g.Nt; ++it)
                    f.at(ix, it) = amp * std::cos(phase(ix, 0, it));
        } else {
            for (int ix = 0; ix < g.Nx; ++ix)
                for (int iy = 0; iy < g.Nx; ++iy)
                    for (int it = 0; it < g.Nt; ++it)
                        f.at(ix, iy, it) = amp * std::cos(phase(ix, iy, it));
        }
        return f;
    }

    const bool radial = name == "gaussian-bump";
    if (radial || name == "separable-bump") {
        check_keys(params, {"amp", "x0", "y0", "t0", "wx", "wt"}, name);
        const double amp = get(params, "amp", 1.0);
        const double x0 = get(params, "x0", 0.5 * g.L);
        const double y0 = get(params, "y0", 0.5 * g.L);
        const double t0 = get(params, "t0", 0.5 * g.T);
        const double wx = get(params, "wx", 0.25 * g.L);
        const double wt = get(params, "wt", 0.25 * g.T);
        if (!(wx > 0.0) || !(wt > 0.0))
            throw config_error("generate_builtin: bump widths must be positive");
        auto value = [&](int ix, int iy, int it) {
            const double dx = wrap(ix * hx - x0, g.L) / wx;
            const double dt = wrap(it * ht - t0, g.T) / wt;
            if (g.n == 1) {
                if (radial) return amp * bump_profile(std::sqrt(dx * dx + dt * dt));
                return amp * bump_profile(dx) * bump_profile(dt);
            }
            const double dy = wrap(iy * hx - y0, g.L) / wx;
            if (radial)
                return amp * bump_profile(std::sqrt(dx * dx + dy * dy + dt * dt));
            return amp * bump_profile(dx) * bump_profile(dy) * bump_profile(dt);
        };
        if (g.n == 1) {
            for (int ix = 0; ix < g.Nx; ++ix)
                for (int it = 0; it < g.Nt; ++it) f.at(ix, it) = value(ix, 0, it);
        } else {
            for (int ix = 0; ix < g.Nx; ++ix)
                for (int iy = 0; iy < g.Nx; ++iy)
                    for (int it = 0; it < g.Nt; ++it)
                        f.at(ix, iy, it) = value(ix, iy, it);
        }
        return f;
    }

    throw config_error("generate_builtin: unknown generator '" + name + "'");
}

double builtin_mass(const std::string& name, const std::map<std::string, double>& params,
                    const SpaceTimeGrid& g) {
    const double vol = std::pow(g.L, g.n) * g.T;
    if (name == "constant") return get(params, "c", 1.0) * vol;
    if (name == "mode") {
        const double kx = get(params, "kx", 1.0);
        const double ky = get(params, "ky", 0.0);
        const double kt = get(params, "kt", 0.0);
        return (kx == 0.0 && ky == 0.0 && kt == 0.0) ? get(params, "amp", 1.0) * vol : 0.0;
    }
    const double amp = get(params, "amp", 1.0);
    const double wx = get(params, "wx", 0.25 * g.L);
    const double wt = get(params, "wt", 0.25 * g.T);
    static const Quad1D q = gauss_legendre(64, 0.0, 1.0);
    if (name == "separable-bump") {
        double line = 0.0;
        for (std::size_t i = 0; i < q.nodes.size(); ++i)
            line += 2.0 * q.weights[i] * bump_profile(q.nodes[i]);
        return amp * std::pow(line * wx, g.n) * (line * wt);
    }
    if (name == "gaussian-bump") {
        // Radial in the scaled displacement: mass = amp wx^n wt |S^n| int r^n phi(r) dr
        // over the unit ball in n+1 scaled dimensions.
        const int d = g.n + 1;
        double radial = 0.0;
        for (std::size_t i = 0; i < q.nodes.size(); ++i)
            radial += q.weights[i] * std::pow(q.nodes[i], d - 1) * bump_profile(q.nodes[i]);
        const double sphere = d == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
        return amp * std::pow(wx, g.n) * wt * sphere * radial;
    }
    throw config_error("builtin_mass: unknown generator '" + name + "'");
}

} // namespace fracheat
