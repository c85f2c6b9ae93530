#include "fracheat/kernels.hpp"

#include <cmath>
#include <numbers>

#include "fracheat/fft.hpp"
#include "fracheat/special.hpp"
#include "fracheat/tables.hpp"

namespace fracheat {

double eval_W(int n, const std::vector<double>& x, double t) {
    if (t <= 0.0) return 0.0;
    double r2 = 0.0;
    for (int d = 0; d < n; ++d) r2 += x[d] * x[d];
    return std::pow(4.0 * std::numbers::pi * t, -0.5 * n) * std::exp(-r2 / (4.0 * t));
}

double extension_normalization(const FracParams& p) {
    return 1.0 / (std::pow(4.0, p.s) * gammafn(p.s));
}

double eval_Gamma(double y, const std::vector<double>& x, double t,
                  const FracParams& p, int n) {
    if (!(y > 0.0)) throw config_error("eval_Gamma: y must be positive");
    if (t <= 0.0) return 0.0;
    return extension_normalization(p) * std::pow(y, 1.0 - p.a) * std::pow(t, -1.0 - p.s) *
           eval_W(n, x, t) * std::exp(-y * y / (4.0 * t));
}

double kernel_mass(double y, const FracParams& p) {
    if (!(y > 0.0)) throw config_error("kernel_mass: y must be positive");
    const double s = p.s;
    // int_0^1 u^{s-1} e^{-u} du as an alternating series (machine precision;
    // plain Gauss-Laguerre cannot handle the u^{s-1} endpoint).
    double lower = 0.0, fact = 1.0;
    for (int k = 0; k < 48; ++k) {
        if (k > 0) fact *= -static_cast<double>(k);
        double term = 1.0 / (fact * (s + k));
        lower += term;
        if (std::abs(term) < 1e-18 * std::abs(lower)) break;
    }
    // int_1^inf u^{s-1} e^{-u} du = e^{-1} int_0^inf (1+t)^{s-1} e^{-t} dt.
    static const Quad1D glag = gauss_laguerre(64);
    double upper = 0.0;
    for (std::size_t i = 0; i < glag.nodes.size(); ++i)
        upper += glag.weights[i] * std::pow(1.0 + glag.nodes[i], s - 1.0);
    upper *= std::exp(-1.0);
    const double time_integral = std::pow(4.0, s) * (lower + upper);
    return extension_normalization(p) * time_integral;
}

cplx ext_symbol(double y, cplx A, double s) {
    if (y == 0.0) return cplx(1.0, 0.0);
    if (A == cplx(0.0, 0.0)) return cplx(1.0, 0.0);
    const double q = 0.25 * y * y;
    const double mag = std::abs(A);
    const double psi = 0.5 * std::arg(A); // |psi| <= pi/4
    const double c = std::cos(psi);
    // Window of the log-variable integrand exp(-s v - e^{i psi}(q e^{-v} + |A| e^v)).
    double v1 = std::log(43.0 / (c * mag));
    for (int it = 0; it < 6; ++it)
        v1 = std::log((43.0 + s * std::abs(v1)) / (c * mag));
    double v0 = -std::log(43.0 / (c * q));
    for (int it = 0; it < 6; ++it)
        v0 = -std::log((43.0 + s * std::abs(v0)) / (c * q));
    if (v1 <= v0) return cplx(0.0, 0.0); // doubly exponential underflow
    const double h = 0.05;
    const int nn = static_cast<int>(std::ceil((v1 - v0) / h)) + 1;
    const cplx eip(std::cos(psi), std::sin(psi));
    cplx acc(0.0, 0.0);
    for (int j = 0; j < nn; ++j) {
        double v = v0 + j * h;
        double ev = std::exp(v);
        acc += std::exp(-s * v) * std::exp(-eip * (q / ev + mag * ev));
    }
    acc *= h;
    // undo the ray rotation: sigma = e^{-i psi} r contributes e^{i psi s}
    const cplx rot(std::cos(psi * s), std::sin(psi * s));
    const double c0 = 1.0 / (std::pow(4.0, s) * gammafn(s));
    return c0 * std::pow(y, 2.0 * s) * rot * acc;
}

std::vector<cplx> ext_symbol_table(const SpaceTimeGrid& g, const FracParams& p, double y) {
    return build_mode_table(g, [&](double xi2, double om) {
        return ext_symbol(y, cplx(xi2, om), p.s);
    });
}

Field convolve_gamma(const Field& f, const FracParams& p, double y) {
    std::vector<cplx> coeffs = fft_forward(f);
    std::vector<cplx> table = ext_symbol_table(f.grid, p, y);
    return fft_backward(f.grid, apply_table(coeffs, table), f.real_flag);
}

std::vector<double> delta_limit_check(const Field& f, const std::vector<double>& y_sequence,
                                      const FracParams& p) {
    for (std::size_t i = 0; i + 1 < y_sequence.size(); ++i)
        if (!(y_sequence[i] > y_sequence[i + 1]) || !(y_sequence[i + 1] > 0.0))
            throw config_error("delta_limit_check: y_sequence must be strictly decreasing and positive");
    if (!y_sequence.empty() && !(y_sequence.front() > 0.0))
        throw config_error("delta_limit_check: y_sequence must be positive");
    std::vector<cplx> coeffs = fft_forward(f);
    std::vector<double> out;
    out.reserve(y_sequence.size());
    for (double y : y_sequence) {
        std::vector<cplx> table = ext_symbol_table(f.grid, p, y);
        for (auto& v : table) v -= 1.0;
        Field diff = fft_backward(f.grid, apply_table(coeffs, table), false);
        out.push_back(diff.max_abs());
    }
    return out;
}

} // namespace fracheat
