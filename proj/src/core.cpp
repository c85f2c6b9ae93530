#include <cmath>

#include "fracheat/fft.hpp"
#include "fracheat/grid.hpp"

namespace fracheat {

std::vector<cplx> axis_basis(int N, double length, double u) {
    // Basis values e^{i freq u} for the N frequency slots of one axis; the
    // Nyquist slot uses the symmetric cos convention.
    std::vector<cplx> b(N);
    for (int k = 0; k < N; ++k) {
        double freq = 2.0 * std::numbers::pi * freq_index(k, N) / length;
        if (N % 2 == 0 && k == N / 2)
            b[k] = cplx(std::cos(freq * u), 0.0);
        else
            b[k] = std::exp(cplx(0.0, freq * u));
    }
    return b;
}

cplx eval_trig(const Field& f, const std::vector<cplx>& coeffs,
               const std::vector<double>& x, double t) {
    const SpaceTimeGrid& g = f.grid;
    std::vector<cplx> bx = axis_basis(g.Nx, g.L, x[0]);
    std::vector<cplx> by = g.n == 2 ? axis_basis(g.Nx, g.L, x[1]) : std::vector<cplx>();
    std::vector<cplx> bt = axis_basis(g.Nt, g.T, t);

    cplx acc(0.0, 0.0);
    if (g.n == 1) {
        for (int kx = 0; kx < g.Nx; ++kx)
            for (int kt = 0; kt < g.Nt; ++kt)
                acc += coeffs[f.idx(kx, kt)] * bx[kx] * bt[kt];
    } else {
        for (int kx = 0; kx < g.Nx; ++kx)
            for (int ky = 0; ky < g.Nx; ++ky)
                for (int kt = 0; kt < g.Nt; ++kt)
                    acc += coeffs[f.idx(kx, ky, kt)] * bx[kx] * by[ky] * bt[kt];
    }
    return acc;
}

namespace {

inline int wrap_slot(long k, int N) {
    long m = k % N;
    if (m < 0) m += N;
    return static_cast<int>(m);
}

bool is_integer(double v) { return std::abs(v - std::round(v)) < 1e-12; }

} // namespace

Field parabolic_rescale(const Field& f, double r) {
    if (!(r > 0.0)) throw config_error("parabolic_rescale: r must be positive");
    const SpaceTimeGrid& g = f.grid;
    if (r == 1.0) return f;

    std::vector<cplx> coeffs = fft_forward(f);
    if (is_integer(r) && is_integer(r * r)) {
        // Exact mode remap: sampling e^{i xi r x} on the same lattice lands on
        // the aliased slot (r k) mod N; likewise (r^2 k) mod Nt in time.
        const long ri = static_cast<long>(std::llround(r));
        const long ri2 = ri * ri;
        std::vector<cplx> out(coeffs.size(), cplx(0.0, 0.0));
        Field shape(g); // index helper only
        if (g.n == 1) {
            for (int kx = 0; kx < g.Nx; ++kx)
                for (int kt = 0; kt < g.Nt; ++kt) {
                    int sx = wrap_slot(ri * freq_index(kx, g.Nx), g.Nx);
                    int st = wrap_slot(ri2 * freq_index(kt, g.Nt), g.Nt);
                    out[shape.idx(sx, st)] += coeffs[shape.idx(kx, kt)];
                }
        } else {
            for (int kx = 0; kx < g.Nx; ++kx)
                for (int ky = 0; ky < g.Nx; ++ky)
                    for (int kt = 0; kt < g.Nt; ++kt) {
                        int sx = wrap_slot(ri * freq_index(kx, g.Nx), g.Nx);
                        int sy = wrap_slot(ri * freq_index(ky, g.Nx), g.Nx);
                        int st = wrap_slot(ri2 * freq_index(kt, g.Nt), g.Nt);
                        out[shape.idx(sx, sy, st)] += coeffs[shape.idx(kx, ky, kt)];
                    }
        }
        return fft_backward(g, out, f.real_flag);
    }

    // General r: trigonometric interpolation at (r x, r^2 t).
    Field out(g, f.real_flag);
    const double hx = g.hx(), ht = g.ht();
    if (g.n == 1) {
        for (int ix = 0; ix < g.Nx; ++ix)
            for (int it = 0; it < g.Nt; ++it)
                out.at(ix, it) = eval_trig(f, coeffs, {r * ix * hx}, r * r * it * ht);
    } else {
        for (int ix = 0; ix < g.Nx; ++ix)
            for (int iy = 0; iy < g.Nx; ++iy)
                for (int it = 0; it < g.Nt; ++it)
                    out.at(ix, iy, it) =
                        eval_trig(f, coeffs, {r * ix * hx, r * iy * hx}, r * r * it * ht);
    }
    return out;
}

} // namespace fracheat
