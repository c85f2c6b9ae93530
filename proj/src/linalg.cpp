#include "fracheat/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace fracheat {

std::vector<cplx> solve_tridiag(const std::vector<cplx>& lower,
                                const std::vector<cplx>& diag,
                                const std::vector<cplx>& upper,
                                const std::vector<cplx>& rhs) {
    const std::size_t n = diag.size();
    if (n == 0) return {};
    if (lower.size() + 1 != n || upper.size() + 1 != n || rhs.size() != n)
        throw shape_error("solve_tridiag: inconsistent band sizes");
    std::vector<cplx> cp(n > 1 ? n - 1 : 0), dp(n), x(n);
    if (std::abs(diag[0]) == 0.0)
        throw numerical_error("solve_tridiag: zero pivot at row 0");
    if (n > 1) cp[0] = upper[0] / diag[0];
    dp[0] = rhs[0] / diag[0];
    for (std::size_t i = 1; i < n; ++i) {
        const cplx denom = diag[i] - lower[i - 1] * cp[i - 1];
        if (std::abs(denom) == 0.0)
            throw numerical_error("solve_tridiag: zero pivot at row " + std::to_string(i));
        if (i < n - 1) cp[i] = upper[i] / denom;
        dp[i] = (rhs[i] - lower[i - 1] * dp[i - 1]) / denom;
    }
    x[n - 1] = dp[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = dp[i] - cp[i] * x[i + 1];
    return x;
}

BandMatrix cholesky_factor(BandMatrix A) {
    const int n = A.size(), bw = A.bandwidth();
    for (int j = 0; j < n; ++j) {
        double d = A.at(j, j);
        for (int k = std::max(0, j - bw); k < j; ++k) {
            const double ljk = A.at(j, k);
            d -= ljk * ljk;
        }
        if (!(d > 0.0))
            throw numerical_error("cholesky_factor: non-positive pivot at row " +
                                      std::to_string(j),
                                  d);
        const double ljj = std::sqrt(d);
        A.at(j, j) = ljj;
        const int iend = std::min(n - 1, j + bw);
        for (int i = j + 1; i <= iend; ++i) {
            double v = A.at(i, j);
            for (int k = std::max(0, i - bw); k < j; ++k) v -= A.at(i, k) * A.at(j, k);
            A.at(i, j) = v / ljj;
        }
    }
    return A;
}

std::vector<double> cholesky_solve(const BandMatrix& L, std::vector<double> b) {
    const int n = L.size(), bw = L.bandwidth();
    if (static_cast<int>(b.size()) != n)
        throw shape_error("cholesky_solve: rhs size mismatch");
    for (int i = 0; i < n; ++i) {
        double v = b[i];
        for (int k = std::max(0, i - bw); k < i; ++k) v -= L.at(i, k) * b[k];
        b[i] = v / L.at(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
        double v = b[i];
        const int kend = std::min(n - 1, i + bw);
        for (int k = i + 1; k <= kend; ++k) v -= L.at(k, i) * b[k];
        b[i] = v / L.at(i, i);
    }
    return b;
}

} // namespace fracheat
