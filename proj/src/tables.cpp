#include "fracheat/tables.hpp"

#include "fracheat/parallel.hpp"

namespace fracheat {

std::vector<cplx> build_mode_table(const SpaceTimeGrid& g,
                                   const std::function<cplx(double xi2, double omega)>& gen) {
    std::vector<cplx> table(g.total());
    Field shape(g);
    const int nspatial = g.n == 1 ? g.Nx : g.Nx * g.Nx;
    parallel_for(static_cast<std::size_t>(nspatial), [&](std::size_t is) {
        int kx = static_cast<int>(is) / (g.n == 2 ? g.Nx : 1);
        int ky = g.n == 2 ? static_cast<int>(is) % g.Nx : 0;
        if (g.n == 1) kx = static_cast<int>(is);
        double xi = xi_freq(kx, g.Nx, g.L);
        double xi2 = xi * xi;
        if (g.n == 2) {
            double eta = xi_freq(ky, g.Nx, g.L);
            xi2 += eta * eta;
        }
        for (int kt = 0; kt <= g.Nt / 2; ++kt) {
            double om = omega_freq(kt, g.Nt, g.T);
            cplx v = gen(xi2, om);
            std::size_t i0 = g.n == 1 ? shape.idx(kx, kt) : shape.idx(kx, ky, kt);
            if (kt == g.Nt / 2) {
                table[i0] = cplx(v.real(), 0.0); // symmetric average at Nyquist
            } else {
                table[i0] = v;
                if (kt > 0) {
                    std::size_t i1 = g.n == 1 ? shape.idx(kx, g.Nt - kt)
                                              : shape.idx(kx, ky, g.Nt - kt);
                    table[i1] = std::conj(v);
                }
            }
        }
    });
    return table;
}

std::vector<cplx> apply_table(const std::vector<cplx>& coeffs,
                              const std::vector<cplx>& table) {
    if (coeffs.size() != table.size())
        throw shape_error("apply_table: size mismatch");
    std::vector<cplx> out(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) out[i] = coeffs[i] * table[i];
    return out;
}

} // namespace fracheat
