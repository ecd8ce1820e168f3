#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace glauber {

// Dense symmetric eigensolver: Householder reduction to tridiagonal form
// followed by the implicit-shift QL iteration. Self-contained so spectra do
// not depend on an external LAPACK build.

namespace detail {

inline double pythag(double a, double b) {
    const double absa = std::fabs(a), absb = std::fabs(b);
    if (absa > absb) {
        const double r = absb / absa;
        return absa * std::sqrt(1.0 + r * r);
    }
    if (absb == 0.0) return 0.0;
    const double r = absa / absb;
    return absb * std::sqrt(1.0 + r * r);
}

// Householder reduction of the row-major symmetric matrix a (n x n) to
// tridiagonal (d, e). When vectors is set, a is overwritten with the
// orthogonal transformation whose columns tqli rotates into eigenvectors.
inline void tred2(std::vector<double>& a, std::size_t n, std::vector<double>& d,
                  std::vector<double>& e, bool vectors) {
    auto z = [&a, n](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
    d.assign(n, 0.0);
    e.assign(n, 0.0);
    for (std::size_t i = n - 1; i >= 1; --i) {
        const std::size_t l = i - 1;
        double h = 0.0, scale = 0.0;
        if (l > 0) {
            for (std::size_t k = 0; k <= l; ++k) scale += std::fabs(z(i, k));
            if (scale == 0.0) {
                e[i] = z(i, l);
            } else {
                for (std::size_t k = 0; k <= l; ++k) {
                    z(i, k) /= scale;
                    h += z(i, k) * z(i, k);
                }
                double f = z(i, l);
                double g = (f >= 0.0 ? -std::sqrt(h) : std::sqrt(h));
                e[i] = scale * g;
                h -= f * g;
                z(i, l) = f - g;
                f = 0.0;
                for (std::size_t j = 0; j <= l; ++j) {
                    if (vectors) z(j, i) = z(i, j) / h;
                    g = 0.0;
                    for (std::size_t k = 0; k <= j; ++k) g += z(j, k) * z(i, k);
                    for (std::size_t k = j + 1; k <= l; ++k) g += z(k, j) * z(i, k);
                    e[j] = g / h;
                    f += e[j] * z(i, j);
                }
                const double hh = f / (h + h);
                for (std::size_t j = 0; j <= l; ++j) {
                    f = z(i, j);
                    e[j] = g = e[j] - hh * f;
                    for (std::size_t k = 0; k <= j; ++k) z(j, k) -= f * e[k] + g * z(i, k);
                }
            }
        } else {
            e[i] = z(i, l);
        }
        d[i] = h;
    }
    if (vectors) d[0] = 0.0;
    e[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (vectors) {
            if (d[i] != 0.0) {
                for (std::size_t j = 0; j < i; ++j) {
                    double g = 0.0;
                    for (std::size_t k = 0; k < i; ++k) g += z(i, k) * z(k, j);
                    for (std::size_t k = 0; k < i; ++k) z(k, j) -= g * z(k, i);
                }
            }
            d[i] = z(i, i);
            z(i, i) = 1.0;
            for (std::size_t j = 0; j < i; ++j) z(j, i) = z(i, j) = 0.0;
        } else {
            d[i] = z(i, i);
        }
    }
}

// Implicit-shift QL on a tridiagonal (d, e); e[0] is ignored. When z is
// non-null the rotations are accumulated into its columns.
inline void tqli(std::vector<double>& d, std::vector<double>& e, std::size_t n,
                 std::vector<double>* z_mat) {
    auto z = [z_mat, n](std::size_t i, std::size_t j) -> double& { return (*z_mat)[i * n + j]; };
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    const double eps = std::numeric_limits<double>::epsilon();
    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= eps * dd) break;
            }
            if (m != l) {
                if (iter++ == 60) throw std::runtime_error("tqli: too many QL iterations");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = pythag(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::fabs(r) : -std::fabs(r)));
                double s = 1.0, c = 1.0, p = 0.0;
                bool underflow = false;
                for (std::size_t ii = m; ii-- > l;) {
                    double f = s * e[ii];
                    const double b = c * e[ii];
                    e[ii + 1] = (r = pythag(f, g));
                    if (r == 0.0) {
                        d[ii + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[ii + 1] - p;
                    r = (d[ii] - g) * s + 2.0 * c * b;
                    d[ii + 1] = g + (p = s * r);
                    g = c * r - b;
                    if (z_mat) {
                        for (std::size_t k = 0; k < n; ++k) {
                            f = z(k, ii + 1);
                            z(k, ii + 1) = s * z(k, ii) + c * f;
                            z(k, ii) = c * z(k, ii) - s * f;
                        }
                    }
                }
                if (underflow) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

}  // namespace detail

struct SymmetricEigenResult {
    std::vector<double> eigenvalues;  // ascending
    std::vector<double> vectors;      // row-major n x n; column j = eigenvector j
    bool has_vectors = false;
};

// Full spectrum of the row-major symmetric matrix a.
inline SymmetricEigenResult symmetric_eigen(std::vector<double> a, std::size_t n,
                                            bool compute_vectors = false) {
    if (a.size() != n * n) throw std::invalid_argument("symmetric_eigen: bad matrix size");
    SymmetricEigenResult res;
    if (n == 0) return res;
    if (n == 1) {
        res.eigenvalues = {a[0]};
        if (compute_vectors) {
            res.vectors = {1.0};
            res.has_vectors = true;
        }
        return res;
    }
    std::vector<double> d, e;
    detail::tred2(a, n, d, e, compute_vectors);
    detail::tqli(d, e, n, compute_vectors ? &a : nullptr);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&d](std::size_t i, std::size_t j) { return d[i] < d[j]; });
    res.eigenvalues.resize(n);
    for (std::size_t j = 0; j < n; ++j) res.eigenvalues[j] = d[order[j]];
    if (compute_vectors) {
        res.vectors.resize(n * n);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) res.vectors[i * n + j] = a[i * n + order[j]];
        res.has_vectors = true;
    }
    return res;
}

// Eigenvalues of a symmetric tridiagonal matrix (diag, sub); sub[0] unused.
inline std::vector<double> tridiagonal_eigenvalues(std::vector<double> diag,
                                                   std::vector<double> sub) {
    const std::size_t n = diag.size();
    if (n == 0) return {};
    if (sub.size() != n) throw std::invalid_argument("tridiagonal_eigenvalues: size mismatch");
    if (n == 1) return diag;
    detail::tqli(diag, sub, n, nullptr);
    std::sort(diag.begin(), diag.end());
    return diag;
}

}  // namespace glauber
