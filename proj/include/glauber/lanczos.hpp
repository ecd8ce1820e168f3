#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "glauber/dense_eigen.hpp"
#include "glauber/rng.hpp"
#include "glauber/sparse_operator.hpp"

namespace glauber {

// Lanczos with full reorthogonalization against the stored basis. Meant for
// the low end of the spectrum of the symmetrized generators, where the ground
// state plus the lowest band is a handful of eigenvalues.

using ApplyFn = std::function<void(const double*, double*)>;

struct LanczosParams {
    int max_iter = 800;
    double tol = 1e-10;          // residual tolerance relative to |T| scale
    int check_interval = 10;
    std::uint64_t seed = 0x9e3779b97f4a7c15ull;
};

struct LanczosReport {
    std::vector<double> eigenvalues;  // ascending, converged Ritz values
    std::vector<double> residuals;    // |beta_m s_m| estimates, same order
    int iterations = 0;
    bool converged = false;
    std::vector<std::vector<double>> ritz_vectors;  // filled on request
};

namespace detail {

// Eigenvector of the tridiagonal (d, e) for the Ritz value theta by two
// rounds of inverse iteration with a partially pivoted Thomas solve.
inline std::vector<double> tridiag_inverse_iteration(const std::vector<double>& d,
                                                     const std::vector<double>& e, double theta) {
    const std::size_t m = d.size();
    std::vector<double> s(m, 1.0 / std::sqrt(static_cast<double>(m)));
    // scale-aware perturbation keeps the shifted matrix invertible
    double scale = 0.0;
    for (double v : d) scale = std::max(scale, std::fabs(v));
    for (double v : e) scale = std::max(scale, std::fabs(v));
    const double eps = std::max(scale, 1.0) * 1e-14;

    for (int sweep = 0; sweep < 3; ++sweep) {
        // solve (T - theta I) y = s with partial pivoting between adjacent rows
        std::vector<double> diag(m), upper(m, 0.0), upper2(m, 0.0), rhs = s;
        for (std::size_t i = 0; i < m; ++i) diag[i] = d[i] - theta;
        std::vector<double> sub(m, 0.0);
        for (std::size_t i = 1; i < m; ++i) {
            sub[i] = e[i];
            upper[i - 1] = e[i];
        }
        for (std::size_t i = 0; i + 1 < m; ++i) {
            if (std::fabs(sub[i + 1]) > std::fabs(diag[i])) {
                std::swap(diag[i], sub[i + 1]);
                std::swap(upper[i], diag[i + 1]);
                std::swap(upper2[i], upper[i + 1]);
                std::swap(rhs[i], rhs[i + 1]);
            }
            if (std::fabs(diag[i]) < eps) diag[i] = (diag[i] >= 0.0 ? eps : -eps);
            const double f = sub[i + 1] / diag[i];
            diag[i + 1] -= f * upper[i];
            upper[i + 1] -= f * upper2[i];
            rhs[i + 1] -= f * rhs[i];
        }
        if (std::fabs(diag[m - 1]) < eps) diag[m - 1] = (diag[m - 1] >= 0.0 ? eps : -eps);
        std::vector<double> y(m);
        for (std::size_t i = m; i-- > 0;) {
            double v = rhs[i];
            if (i + 1 < m) v -= upper[i] * y[i + 1];
            if (i + 2 < m) v -= upper2[i] * y[i + 2];
            y[i] = v / diag[i];
        }
        double nrm = 0.0;
        for (double v : y) nrm += v * v;
        nrm = std::sqrt(nrm);
        if (nrm == 0.0) break;
        for (std::size_t i = 0; i < m; ++i) s[i] = y[i] / nrm;
    }
    return s;
}

}  // namespace detail

// k algebraically smallest eigenvalues of the symmetric operator given by
// apply. Throws on non-convergence so callers cannot silently use junk.
inline LanczosReport lanczos_lowest(const ApplyFn& apply, std::size_t dim, int k,
                                    const LanczosParams& params = {},
                                    bool want_vectors = false) {
    if (k <= 0) throw std::invalid_argument("lanczos_lowest: k must be positive");
    if (static_cast<std::size_t>(k) >= dim)
        throw std::invalid_argument("lanczos_lowest: k must be below the dimension");

    const int m_max = static_cast<int>(std::min<std::size_t>(params.max_iter, dim));
    std::vector<std::vector<double>> basis;  // Lanczos vectors q_0..q_{j}
    basis.reserve(m_max + 1);

    rng::CounterStream stream(params.seed);
    std::vector<double> q(dim);
    {
        double nrm = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            q[i] = stream.next_normal();
            nrm += q[i] * q[i];
        }
        nrm = std::sqrt(nrm);
        for (double& v : q) v /= nrm;
    }
    basis.push_back(q);

    std::vector<double> alpha, beta;  // T diagonal / subdiagonal (beta[j] couples j-1,j)
    std::vector<double> w(dim);
    double t_scale = 0.0;

    LanczosReport report;
    for (int j = 0; j < m_max; ++j) {
        apply(basis[j].data(), w.data());
        double a = 0.0;
        for (std::size_t i = 0; i < dim; ++i) a += basis[j][i] * w[i];
        alpha.push_back(a);
        t_scale = std::max({t_scale, std::fabs(a), j > 0 ? std::fabs(beta.back()) : 0.0});

        // full reorthogonalization, two passes of classical Gram-Schmidt
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& qi : basis) {
                double c = 0.0;
                for (std::size_t i = 0; i < dim; ++i) c += qi[i] * w[i];
                for (std::size_t i = 0; i < dim; ++i) w[i] -= c * qi[i];
            }
        }
        double b = 0.0;
        for (double v : w) b += v * v;
        b = std::sqrt(b);

        const int m = j + 1;
        const bool invariant = b <= std::max(t_scale, 1.0) * 1e-13;
        const bool check_now =
            invariant || m == m_max || (m > k + 1 && m % params.check_interval == 0);
        if (check_now) {
            std::vector<double> sub(m, 0.0);
            for (int i = 1; i < m; ++i) sub[i] = beta[i - 1];
            std::vector<double> theta = tridiagonal_eigenvalues(alpha, sub);
            const int kk = std::min(k, m);
            std::vector<double> resid(kk, 0.0);
            bool all_ok = (kk == k);
            if (!invariant) {
                for (int t = 0; t < kk; ++t) {
                    const std::vector<double> s =
                        detail::tridiag_inverse_iteration(alpha, sub, theta[t]);
                    resid[t] = std::fabs(b * s[m - 1]);
                    if (resid[t] > params.tol * std::max(t_scale, 1.0)) all_ok = false;
                }
            }
            if (all_ok || invariant || m == m_max) {
                report.iterations = m;
                report.converged = all_ok || (invariant && kk == k);
                report.eigenvalues.assign(theta.begin(), theta.begin() + kk);
                report.residuals = resid;
                if (!report.converged)
                    throw std::runtime_error("lanczos_lowest: not converged after " +
                                             std::to_string(m) + " iterations");
                if (want_vectors) {
                    report.ritz_vectors.assign(kk, std::vector<double>(dim, 0.0));
                    for (int t = 0; t < kk; ++t) {
                        const std::vector<double> s =
                            detail::tridiag_inverse_iteration(alpha, sub, theta[t]);
                        for (int i = 0; i < m; ++i)
                            for (std::size_t x = 0; x < dim; ++x)
                                report.ritz_vectors[t][x] += s[i] * basis[i][x];
                    }
                }
                return report;
            }
        }
        if (invariant) {
            // invariant subspace smaller than k; should have returned above
            throw std::runtime_error("lanczos_lowest: invariant subspace too small");
        }
        beta.push_back(b);
        for (std::size_t i = 0; i < dim; ++i) w[i] /= b;
        basis.push_back(w);
    }
    throw std::runtime_error("lanczos_lowest: iteration limit reached");
}

inline LanczosReport lanczos_lowest(const SparseOperator& A, int k,
                                    const LanczosParams& params = {}, bool want_vectors = false) {
    return lanczos_lowest([&A](const double* x, double* y) { A.apply(x, y); }, A.dim(), k, params,
                          want_vectors);
}

// Interior eigenvalues inside [center - radius, center + radius], computed by
// running Lanczos on (A - center I)^2 and then Rayleigh-Ritz projecting A
// onto the converged subspace. The projection step matters: eigenvalues of A
// placed symmetrically about the center are degenerate for the squared
// operator, so the squared-operator Ritz vectors can mix them, while their
// span is still A-invariant and the small projected problem separates them.
inline std::vector<double> lanczos_window(const ApplyFn& apply, std::size_t dim, double center,
                                          double radius, int k_inside,
                                          const LanczosParams& params = {}) {
    if (radius <= 0.0) throw std::invalid_argument("lanczos_window: radius must be positive");
    std::vector<double> tmp(dim);
    ApplyFn shifted_sq = [&](const double* x, double* y) {
        apply(x, tmp.data());
        for (std::size_t i = 0; i < dim; ++i) tmp[i] -= center * x[i];
        apply(tmp.data(), y);
        for (std::size_t i = 0; i < dim; ++i) y[i] -= center * tmp[i];
    };
    LanczosReport rep = lanczos_lowest(shifted_sq, dim, k_inside, params, /*want_vectors=*/true);

    // orthonormalize the Ritz vectors (modified Gram-Schmidt, drop near-zero)
    std::vector<std::vector<double>> basis;
    for (auto& v : rep.ritz_vectors) {
        for (const auto& q : basis) {
            double c = 0.0;
            for (std::size_t i = 0; i < dim; ++i) c += q[i] * v[i];
            for (std::size_t i = 0; i < dim; ++i) v[i] -= c * q[i];
        }
        double nrm = 0.0;
        for (double x : v) nrm += x * x;
        nrm = std::sqrt(nrm);
        if (nrm < 1e-8) continue;
        for (double& x : v) x /= nrm;
        basis.push_back(std::move(v));
    }
    const std::size_t k = basis.size();
    if (k == 0) return {};

    std::vector<std::vector<double>> abasis(k, std::vector<double>(dim));
    for (std::size_t t = 0; t < k; ++t) apply(basis[t].data(), abasis[t].data());
    std::vector<double> proj(k * k, 0.0);
    for (std::size_t s = 0; s < k; ++s)
        for (std::size_t t = 0; t < k; ++t) {
            double c = 0.0;
            for (std::size_t i = 0; i < dim; ++i) c += basis[s][i] * abasis[t][i];
            proj[s * k + t] = c;
        }
    // enforce exact symmetry before solving
    for (std::size_t s = 0; s < k; ++s)
        for (std::size_t t = s + 1; t < k; ++t) {
            const double avg = 0.5 * (proj[s * k + t] + proj[t * k + s]);
            proj[s * k + t] = proj[t * k + s] = avg;
        }
    SymmetricEigenResult small = symmetric_eigen(proj, k, false);
    std::vector<double> out;
    for (double lam : small.eigenvalues)
        if (std::fabs(lam - center) <= radius) out.push_back(lam);
    return out;
}

inline std::vector<double> lanczos_window(const SparseOperator& A, double center, double radius,
                                          int k_inside, const LanczosParams& params = {}) {
    return lanczos_window([&A](const double* x, double* y) { A.apply(x, y); }, A.dim(), center,
                          radius, k_inside, params);
}

}  // namespace glauber
