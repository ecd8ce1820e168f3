#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "glauber/dense_eigen.hpp"
#include "glauber/disorder.hpp"
#include "glauber/hamiltonian.hpp"
#include "glauber/lattice.hpp"
#include "glauber/state_space.hpp"

namespace glauber {

// First-order description of the lowest excitation band: a |Lambda| x |Lambda|
// symmetric matrix whose spectrum, scaled by beta and shifted to 1, predicts
// the band to O(beta^2).
struct OneParticleMatrix {
    int dim = 0;
    std::vector<double> entries;  // row-major, symmetric, zero diagonal

    double operator()(int z, int y) const { return entries[std::size_t(z) * dim + y]; }

    double max_abs_row_sum() const {
        double worst = 0.0;
        for (int z = 0; z < dim; ++z) {
            double s = 0.0;
            for (int y = 0; y < dim; ++y) s += std::fabs(entries[std::size_t(z) * dim + y]);
            worst = std::max(worst, s);
        }
        return worst;
    }

    std::vector<double> spectrum() const {
        return symmetric_eigen(entries, dim, false).eigenvalues;
    }
};

// Entry (z, y) = -w_{zy} on nearest-neighbour bonds, 0 otherwise. The sign
// comes from conjugating the diagonal Hamiltonian with the Hadamard
// involution: each bond term -w_b (spin product) turns into -w_b times the
// two-site flip, so the one-particle hopping amplitude carries the coupling
// with a minus sign. (On bipartite lattices the spectrum is sign-blind, but
// on odd rings and odd tori the sign is observable and this one is the one
// the exact band follows; see the first-order tests.)
inline OneParticleMatrix first_order_matrix(const Lattice& lat, const DisorderField& omega) {
    const int n = lat.n_sites();
    OneParticleMatrix t;
    t.dim = n;
    t.entries.assign(std::size_t(n) * n, 0.0);
    for (std::size_t b = 0; b < lat.bonds.size(); ++b) {
        const int z = lat.bonds[b].a, y = lat.bonds[b].b;
        t.entries[std::size_t(z) * n + y] += -omega.couplings[b];
        t.entries[std::size_t(y) * n + z] += -omega.couplings[b];
    }
    return t;
}

// Independent oracle for first_order_matrix: evaluates
// (1/2) sum_x [[A, l_x], l_x] on one-particle basis vectors, with A the
// Hadamard-conjugated Hamiltonian, using only projector applications.
inline OneParticleMatrix double_commutator_oracle(const Lattice& lat,
                                                  const DisorderField& omega) {
    check_enumeration_cap(lat, 16);
    const int n = lat.n_sites();
    const HamiltonianOperator H = hamiltonian_operator(omega, lat);
    OneParticleMatrix t;
    t.dim = n;
    t.entries.assign(std::size_t(n) * n, 0.0);
    for (int y = 0; y < n; ++y) {
        const StateVector ey = StateVector::basis(n, 1u << y);
        StateVector acc = StateVector::zeros(n);
        for (int x = 0; x < n; ++x) {
            // [[A, l_x], l_x] v = A l v - 2 l A l v + l A v  (l idempotent)
            const StateVector lv = site_projector_apply(x, ey);
            const StateVector alv = H.offdiag.apply(lv);
            const StateVector av = H.offdiag.apply(ey);
            for (std::size_t i = 0; i < acc.dim(); ++i) {
                double lalv = 0.0, lav = 0.0;
                if ((i >> x) & 1u) {
                    lalv = alv.amp[i];
                    lav = av.amp[i];
                }
                acc.amp[i] += 0.5 * (alv.amp[i] - 2.0 * lalv + lav);
            }
        }
        for (int z = 0; z < n; ++z) t.entries[std::size_t(z) * n + y] = acc.amp[std::size_t(1) << z];
    }
    return t;
}

namespace detail {

// Golden-section maximization of a unimodal (or monotone) f on [a, b].
template <typename F>
inline double golden_section_max(F f, double a, double b, double tol = 1e-12) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        } else {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        }
    }
    return f(0.5 * (a + b));
}

}  // namespace detail

struct RelativeBoundConstants {
    double b = 0.0;        // max over x in [0, 2dJ beta] of (e^x - 1)/cosh x
    double b_prime = 0.0;  // max of (e^x - 1) cosh x + cosh x - 1
};

inline RelativeBoundConstants relative_bound_constants(double beta, int d, double coupling_j) {
    if (beta < 0.0 || d < 1 || coupling_j < 0.0)
        throw std::invalid_argument("relative_bound_constants: negative input");
    const double x_max = 2.0 * d * coupling_j * beta;
    if (x_max == 0.0) return {0.0, 0.0};
    RelativeBoundConstants out;
    out.b = detail::golden_section_max(
        [](double x) { return (std::exp(x) - 1.0) / std::cosh(x); }, 0.0, x_max);
    out.b_prime = detail::golden_section_max(
        [](double x) { return (std::exp(x) - 1.0) * std::cosh(x) + std::cosh(x) - 1.0; }, 0.0,
        x_max);
    return out;
}

struct BandBounds {
    double g_minus = 1.0;  // first-order lower edge 1 - 2 beta d J
    double g_plus = 1.0;   // first-order upper edge 1 + 2 beta d J
    RelativeBoundConstants constants;  // rigorous-envelope correction terms
};

inline BandBounds band_bounds(double beta, int d, double coupling_j) {
    if (beta < 0.0 || d < 1 || coupling_j < 0.0)
        throw std::invalid_argument("band_bounds: negative input");
    BandBounds out;
    out.g_minus = 1.0 - 2.0 * beta * d * coupling_j;
    out.g_plus = 1.0 + 2.0 * beta * d * coupling_j;
    out.constants = relative_bound_constants(beta, d, coupling_j);
    return out;
}

// {1 + beta * theta_i}, ascending.
inline std::vector<double> predicted_band(double beta, const OneParticleMatrix& t1) {
    if (beta < 0.0) throw std::invalid_argument("predicted_band: negative beta");
    std::vector<double> out = t1.spectrum();
    for (double& v : out) v = 1.0 + beta * v;
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace glauber
