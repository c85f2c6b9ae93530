#pragma once

#include <vector>

#include "fracheat/grid.hpp"

namespace fracheat {

// Tridiagonal solve (Thomas algorithm) for the per-mode extension systems.
// lower/upper have size n-1.  The assembled systems are strictly diagonally
// dominant, so no pivoting is required; a vanishing pivot still throws.
std::vector<cplx> solve_tridiag(const std::vector<cplx>& lower,
                                const std::vector<cplx>& diag,
                                const std::vector<cplx>& upper,
                                const std::vector<cplx>& rhs);

// Symmetric positive-definite band matrix, lower band stored column-wise:
// entry (i, j) with 0 <= i - j <= bw lives at a[j * (bw + 1) + (i - j)].
class BandMatrix {
public:
    BandMatrix() = default;
    BandMatrix(int n, int bw) : n_(n), bw_(bw), a_(static_cast<std::size_t>(n) * (bw + 1), 0.0) {}

    int size() const { return n_; }
    int bandwidth() const { return bw_; }
    double& at(int i, int j) { return a_[static_cast<std::size_t>(j) * (bw_ + 1) + (i - j)]; }
    double at(int i, int j) const {
        return a_[static_cast<std::size_t>(j) * (bw_ + 1) + (i - j)];
    }
    // Symmetric accessor (either triangle).
    double sym(int i, int j) const { return i >= j ? at(i, j) : at(j, i); }

private:
    int n_ = 0;
    int bw_ = 0;
    std::vector<double> a_;
};

// In-place banded Cholesky A = L L^T; throws numerical_error (with the pivot
// value) if A is not numerically positive definite.
BandMatrix cholesky_factor(BandMatrix A);

// Solve L L^T x = b given the factor from cholesky_factor.
std::vector<double> cholesky_solve(const BandMatrix& L, std::vector<double> b);

} // namespace fracheat
