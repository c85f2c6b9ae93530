#include "fracheat/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fracheat {

double gammafn(double x) {
    if (!(x > 0.0))
        throw config_error("gammafn: argument must be positive");
    return std::tgamma(x);
}

Quad1D gauss_legendre(int npts) {
    if (npts < 1) throw config_error("gauss_legendre: need npts >= 1");
    Quad1D q;
    q.nodes.resize(npts);
    q.weights.resize(npts);
    const int m = (npts + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev-based initial guess, then Newton on P_n.
        double z = std::cos(std::numbers::pi * (i + 0.75) / (npts + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < npts; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = npts * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        q.nodes[i] = -z;
        q.nodes[npts - 1 - i] = z;
        double w = 2.0 / ((1.0 - z * z) * pp * pp);
        q.weights[i] = w;
        q.weights[npts - 1 - i] = w;
    }
    return q;
}

Quad1D gauss_legendre(int npts, double a, double b) {
    Quad1D q = gauss_legendre(npts);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < npts; ++i) {
        q.nodes[i] = mid + half * q.nodes[i];
        q.weights[i] *= half;
    }
    return q;
}

namespace {

// Eigenvalues and eigenvectors of a symmetric tridiagonal matrix
// (QL with implicit shifts; EISPACK tql2).  d = diagonal, e = subdiagonal
// (e[0] unused on input).  On return d holds eigenvalues ascending and
// z (n x n, row-major) the orthonormal eigenvectors in columns.
void symtri_eig(std::vector<double>& d, std::vector<double>& e,
                std::vector<double>& z) {
    const int n = static_cast<int>(d.size());
    z.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i) * n + i] = 1.0;
    for (int i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 1e-300 + 2.3e-16 * dd) break;
            }
            if (m != l) {
                if (iter++ == 60)
                    throw numerical_error("symtri_eig: QL iteration failed to converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + (g >= 0 ? std::abs(r) : -std::abs(r)));
                double s = 1.0, c = 1.0, p = 0.0;
                bool underflow = false;
                for (int i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for (int k = 0; k < n; ++k) {
                        f = z[static_cast<std::size_t>(k) * n + i + 1];
                        z[static_cast<std::size_t>(k) * n + i + 1] =
                            s * z[static_cast<std::size_t>(k) * n + i] + c * f;
                        z[static_cast<std::size_t>(k) * n + i] =
                            c * z[static_cast<std::size_t>(k) * n + i] - s * f;
                    }
                }
                if (underflow) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
    // Sort ascending, carrying eigenvector columns.
    for (int i = 0; i < n - 1; ++i) {
        int k = i;
        for (int j = i + 1; j < n; ++j)
            if (d[j] < d[k]) k = j;
        if (k != i) {
            std::swap(d[i], d[k]);
            for (int r = 0; r < n; ++r)
                std::swap(z[static_cast<std::size_t>(r) * n + i],
                          z[static_cast<std::size_t>(r) * n + k]);
        }
    }
}

} // namespace

Quad1D gauss_laguerre(int npts) {
    if (npts < 1) throw config_error("gauss_laguerre: need npts >= 1");
    // Jacobi matrix for Laguerre polynomials: diag 2k+1, offdiag k.
    std::vector<double> d(npts), e(npts, 0.0), z;
    for (int k = 0; k < npts; ++k) {
        d[k] = 2.0 * k + 1.0;
        if (k > 0) e[k] = static_cast<double>(k);
    }
    symtri_eig(d, e, z);
    Quad1D q;
    q.nodes = d;
    q.weights.resize(npts);
    for (int i = 0; i < npts; ++i) {
        double v0 = z[static_cast<std::size_t>(0) * npts + i];
        q.weights[i] = v0 * v0; // mu_0 = int e^{-x} dx = 1
    }
    return q;
}

Quad1D gauss_hermite(int npts) {
    if (npts < 1) throw config_error("gauss_hermite: need npts >= 1");
    // Jacobi matrix for Hermite polynomials: diag 0, offdiag sqrt(k/2).
    std::vector<double> d(npts, 0.0), e(npts, 0.0), z;
    for (int k = 1; k < npts; ++k) e[k] = std::sqrt(0.5 * k);
    symtri_eig(d, e, z);
    Quad1D q;
    q.nodes = d;
    q.weights.resize(npts);
    const double mu0 = std::sqrt(std::numbers::pi); // int e^{-x^2} dx
    for (int i = 0; i < npts; ++i) {
        double v0 = z[static_cast<std::size_t>(0) * npts + i];
        q.weights[i] = mu0 * v0 * v0;
    }
    return q;
}

std::complex<double> one_m_exp(std::complex<double> zv) {
    if (std::abs(zv) < 1e-4) {
        // 1-e^{-z} = z(1 - z/2 (1 - z/3 (1 - z/4 (1 - z/5))))
        return zv * (1.0 - zv / 2.0 * (1.0 - zv / 3.0 * (1.0 - zv / 4.0 * (1.0 - zv / 5.0))));
    }
    return 1.0 - std::exp(-zv);
}

Quad1D graded_rule(double X, int K, double g) {
    if (!(X > 0.0) || K < 1 || !(g >= 1.0))
        throw config_error("graded_rule: need X>0, K>=1, g>=1");
    // 2-point Gauss per cell.
    static const double gl = 1.0 / std::sqrt(3.0);
    Quad1D q;
    q.nodes.reserve(2 * K);
    q.weights.reserve(2 * K);
    double prev = 0.0;
    for (int k = 1; k <= K; ++k) {
        double edge = X * std::pow(static_cast<double>(k) / K, g);
        double mid = 0.5 * (prev + edge), half = 0.5 * (edge - prev);
        q.nodes.push_back(mid - half * gl);
        q.nodes.push_back(mid + half * gl);
        q.weights.push_back(half);
        q.weights.push_back(half);
        prev = edge;
    }
    return q;
}

std::complex<double> upper_tail(std::complex<double> A, double X, double s) {
    static const Quad1D glag = gauss_laguerre(48);
    const double mag = std::abs(A);
    if (mag == 0.0) throw config_error("upper_tail: A must be nonzero");
    const double phi = std::arg(A); // |phi| <= pi/2 for Re A >= 0
    const std::complex<double> dir(std::cos(-phi), std::sin(-phi));
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t i = 0; i < glag.nodes.size(); ++i) {
        std::complex<double> sigma = X + (glag.nodes[i] / mag) * dir;
        acc += glag.weights[i] * std::pow(sigma, -1.0 - s);
    }
    return std::exp(-A * X) * (dir / mag) * acc;
}

namespace {

// Householder QR of A (m x n, m >= n); returns the factored matrix with
// reflectors below the diagonal and R on/above, plus the reflector norms.
struct QrFact {
    std::vector<std::vector<double>> a;
    std::vector<double> rdiag;
    int m, n;
};

QrFact qr_factor(const std::vector<std::vector<double>>& A) {
    QrFact f;
    f.a = A;
    f.m = static_cast<int>(A.size());
    f.n = f.m > 0 ? static_cast<int>(A[0].size()) : 0;
    if (f.m < f.n) throw shape_error("lstsq: need rows >= cols");
    f.rdiag.resize(f.n);
    for (int k = 0; k < f.n; ++k) {
        double nrm = 0.0;
        for (int i = k; i < f.m; ++i) nrm = std::hypot(nrm, f.a[i][k]);
        if (nrm == 0.0) throw numerical_error("lstsq: rank-deficient design matrix");
        if (f.a[k][k] < 0.0) nrm = -nrm;
        for (int i = k; i < f.m; ++i) f.a[i][k] /= nrm;
        f.a[k][k] += 1.0;
        for (int j = k + 1; j < f.n; ++j) {
            double sdot = 0.0;
            for (int i = k; i < f.m; ++i) sdot += f.a[i][k] * f.a[i][j];
            sdot = -sdot / f.a[k][k];
            for (int i = k; i < f.m; ++i) f.a[i][j] += sdot * f.a[i][k];
        }
        f.rdiag[k] = -nrm;
    }
    return f;
}

std::vector<double> qr_solve(const QrFact& f, std::vector<double> b) {
    for (int k = 0; k < f.n; ++k) {
        double sdot = 0.0;
        for (int i = k; i < f.m; ++i) sdot += f.a[i][k] * b[i];
        sdot = -sdot / f.a[k][k];
        for (int i = k; i < f.m; ++i) b[i] += sdot * f.a[i][k];
    }
    std::vector<double> x(f.n);
    for (int k = f.n - 1; k >= 0; --k) {
        double v = b[k];
        for (int j = k + 1; j < f.n; ++j) v -= f.a[k][j] * x[j];
        x[k] = v / f.rdiag[k];
    }
    return x;
}

} // namespace

std::vector<double> lstsq(const std::vector<std::vector<double>>& A,
                          const std::vector<double>& b) {
    QrFact f = qr_factor(A);
    return qr_solve(f, b);
}

std::vector<double> lstsq_component_weights(const std::vector<std::vector<double>>& V,
                                            int component) {
    QrFact f = qr_factor(V);
    std::vector<double> alpha(f.m);
    for (int j = 0; j < f.m; ++j) {
        std::vector<double> ej(f.m, 0.0);
        ej[j] = 1.0;
        alpha[j] = qr_solve(f, ej)[component];
    }
    return alpha;
}

} // namespace fracheat
