#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "fracheat/errors.hpp"

namespace fracheat {

using cplx = std::complex<double>;

// Periodic space-time lattice: n spatial axes (n = 1 or 2) with Nx points and
// period L each, plus Nt time points over period T.  Sample layout is
// time-fastest: values[(ix [*Nx + iy]) * Nt + it].
struct SpaceTimeGrid {
    int n = 1;
    int Nx = 0;
    int Nt = 0;
    double L = 0.0;
    double T = 0.0;
    bool periodic = true;

    double hx() const { return L / Nx; }
    double ht() const { return T / Nt; }
    std::size_t total() const {
        std::size_t s = 1;
        for (int d = 0; d < n; ++d) s *= static_cast<std::size_t>(Nx);
        return s * static_cast<std::size_t>(Nt);
    }
    bool operator==(const SpaceTimeGrid& o) const {
        return n == o.n && Nx == o.Nx && Nt == o.Nt && L == o.L && T == o.T;
    }
};

inline SpaceTimeGrid make_grid(int n, int Nx, int Nt, double L, double T) {
    if (n != 1 && n != 2)
        throw config_error("make_grid: spatial dimension must be 1 or 2");
    if (Nx < 4 || Nt < 4 || Nx % 2 != 0 || Nt % 2 != 0)
        throw config_error("make_grid: Nx and Nt must be even and >= 4");
    if (!(L > 0.0) || !(T > 0.0))
        throw config_error("make_grid: periods L and T must be positive");
    return SpaceTimeGrid{n, Nx, Nt, L, T, true};
}

// Signed frequency index for an N-point DFT: 0,1,...,N/2,-N/2+1,...,-1.
// The Nyquist slot k = N/2 keeps the positive sign; factor tables are
// symmetrized there separately.
inline int freq_index(int k, int N) { return k <= N / 2 ? k : k - N; }

inline double xi_freq(int k, int N, double L) {
    return 2.0 * std::numbers::pi / L * freq_index(k, N);
}
inline double omega_freq(int k, int N, double T) {
    return 2.0 * std::numbers::pi / T * freq_index(k, N);
}

// Complex sampled field over a SpaceTimeGrid.  real_flag marks fields that
// represent real data; transforms preserve it via conjugate symmetry.
struct Field {
    SpaceTimeGrid grid;
    std::vector<cplx> values;
    bool real_flag = false;

    Field() = default;
    explicit Field(const SpaceTimeGrid& g, bool real = false)
        : grid(g), values(g.total(), cplx(0.0, 0.0)), real_flag(real) {}

    std::size_t idx(int ix, int it) const {
        return static_cast<std::size_t>(ix) * grid.Nt + it;
    }
    std::size_t idx(int ix, int iy, int it) const {
        return (static_cast<std::size_t>(ix) * grid.Nx + iy) * grid.Nt + it;
    }
    cplx& at(int ix, int it) { return values[idx(ix, it)]; }
    const cplx& at(int ix, int it) const { return values[idx(ix, it)]; }
    cplx& at(int ix, int iy, int it) { return values[idx(ix, iy, it)]; }
    const cplx& at(int ix, int iy, int it) const { return values[idx(ix, iy, it)]; }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : values) m = std::max(m, std::abs(v));
        return m;
    }
    double max_imag() const {
        double m = 0.0;
        for (const auto& v : values) m = std::max(m, std::abs(v.imag()));
        return m;
    }
};

// Parabolic cylinder C_r(x,t) = B(x,r) x (t-r^2, t+r^2).
struct Cylinder {
    std::vector<double> x;
    double t = 0.0;
    double r = 0.0;

    // Membership with periodic wrapping of the displacement.
    bool contains(const std::vector<double>& px, double pt, double L, double T) const {
        double d2 = 0.0;
        for (std::size_t d = 0; d < x.size(); ++d) {
            double dx = px[d] - x[d];
            dx -= L * std::round(dx / L);
            d2 += dx * dx;
        }
        double dt = pt - t;
        dt -= T * std::round(dt / T);
        return d2 < r * r && std::abs(dt) < r * r;
    }
};

// Relative sup and L2 discrepancies of f against g (g is the reference).
inline std::pair<double, double> norms(const Field& f, const Field& g) {
    if (!(f.grid == g.grid) || f.values.size() != g.values.size())
        throw shape_error("norms: fields live on different grids");
    const double eps_floor = 1e-300;
    double dsup = 0.0, gsup = 0.0, dl2 = 0.0, gl2 = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        double d = std::abs(f.values[i] - g.values[i]);
        double m = std::abs(g.values[i]);
        dsup = std::max(dsup, d);
        gsup = std::max(gsup, m);
        dl2 += d * d;
        gl2 += m * m;
    }
    return {dsup / std::max(gsup, eps_floor),
            std::sqrt(dl2) / std::max(std::sqrt(gl2), eps_floor)};
}

// f_r(x,t) = f(rx, r^2 t) resampled onto the same periodic grid by
// trigonometric interpolation (exact mode remap when r and r^2 are integers).
Field parabolic_rescale(const Field& f, double r);

// Trigonometric-series evaluation of a band-limited field at an off-grid
// point (time-Nyquist coefficients split symmetrically; spatial likewise).
cplx eval_trig(const Field& f, const std::vector<cplx>& coeffs,
               const std::vector<double>& x, double t);

// Basis values e^{i 2 pi k~ u / length} for one axis (Nyquist slot -> cos).
std::vector<cplx> axis_basis(int N, double length, double u);

} // namespace fracheat
