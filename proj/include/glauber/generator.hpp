#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "glauber/hamiltonian.hpp"
#include "glauber/lattice.hpp"
#include "glauber/sparse_operator.hpp"
#include "glauber/state_space.hpp"

namespace glauber {

enum class RateKind { heat_bath, cosh_quarter, custom_monotone };

// Single-flip transition rates w = psi(beta * Delta_x H). heat_bath and
// cosh_quarter both satisfy the detailed-balance identity psi(u) = e^u psi(-u).
struct RateFamily {
    RateKind kind = RateKind::heat_bath;
    std::function<double(double)> psi;  // used by custom_monotone only
    bool monotone_verified = true;      // cleared when a custom psi fails the grid check

    static RateFamily heat_bath() { return {RateKind::heat_bath, nullptr, true}; }
    static RateFamily cosh_quarter() { return {RateKind::cosh_quarter, nullptr, true}; }
    static RateFamily custom(std::function<double(double)> psi) {
        return {RateKind::custom_monotone, std::move(psi), false};
    }

    const char* name() const {
        switch (kind) {
            case RateKind::heat_bath: return "heat_bath";
            case RateKind::cosh_quarter: return "cosh_quarter";
            case RateKind::custom_monotone: return "custom_monotone";
        }
        return "?";
    }
};

inline double psi_value(const RateFamily& f, double u) {
    switch (f.kind) {
        case RateKind::heat_bath: return 1.0 / (1.0 + std::exp(-u));
        case RateKind::cosh_quarter: return (1.0 + std::exp(u)) / 4.0;
        case RateKind::custom_monotone:
            if (!f.psi) throw std::invalid_argument("custom rate family without psi");
            return f.psi(u);
    }
    throw std::invalid_argument("invalid rate family");
}

inline double rate(const RateFamily& f, double delta, double beta) {
    if (beta < 0.0) throw std::invalid_argument("rate: negative beta");
    return psi_value(f, beta * delta);
}

// Samples psi on a 1001-point grid of [-envelope, envelope] (envelope =
// 4*d*J*beta) and checks monotonicity and strict positivity. Custom families
// that fail keep working but lose the monotone envelope guarantees.
inline bool validate_rate_family(RateFamily& f, double envelope) {
    bool ok = true;
    double prev = psi_value(f, -envelope);
    int direction = 0;
    for (int i = 1; i <= 1000; ++i) {
        const double u = -envelope + 2.0 * envelope * i / 1000.0;
        const double v = psi_value(f, u);
        if (v <= 0.0 || prev <= 0.0) ok = false;
        if (v > prev) {
            if (direction < 0) ok = false;
            direction = 1;
        } else if (v < prev) {
            if (direction > 0) ok = false;
            direction = -1;
        }
        prev = v;
    }
    f.monotone_verified = ok;
    return ok;
}

// Markov generator L-bar on the 2^n state space: row alpha carries the total
// escape rate on the diagonal and -w(alpha -> alpha^x) at column alpha^x, so
// the constant function is a right null vector and the semigroup is exp(-tL).
inline SparseOperator assemble_generator(const Lattice& lat, const DisorderField& omega,
                                         double beta, const RateFamily& family) {
    check_enumeration_cap(lat);
    if (beta < 0.0) throw std::invalid_argument("assemble_generator: negative beta");
    const int n = lat.n_sites();
    const std::size_t dim = std::size_t{1} << n;
    std::vector<Triplet> t;
    t.reserve(dim * (n + 1));
    for (std::size_t a = 0; a < dim; ++a) {
        const SubsetState alpha{static_cast<std::uint32_t>(a), n};
        double diag = 0.0;
        for (int x = 0; x < n; ++x) {
            const double w = rate(family, flip_delta(alpha, x, omega, lat), beta);
            diag += w;
            t.push_back({static_cast<std::uint32_t>(a),
                         static_cast<std::uint32_t>(a) ^ (1u << x), -w});
        }
        t.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a), diag});
    }
    return SparseOperator::from_triplets(dim, std::move(t));
}

// The four birth/death pieces of the lattice-gas calculus. L-bar equals
// d_minus + b_plus; conjugation by the involution swaps d_plus with b_minus
// (and b_plus with d_minus) whenever the rates are complement symmetric.
struct BirthDeathParts {
    SparseOperator b_minus;  // sum_{x in a} w(a\x, a) (phi_{a\x} - phi_a)
    SparseOperator d_minus;  // sum_{x in a} w(a, a\x) (phi_a - phi_{a\x})
    SparseOperator b_plus;   // sum_{x notin a} w(a, a+x) (phi_a - phi_{a+x})
    SparseOperator d_plus;   // sum_{x notin a} w(a+x, a) (phi_{a+x} - phi_a)
};

inline BirthDeathParts birth_death_parts(const Lattice& lat, const DisorderField& omega,
                                         double beta, const RateFamily& family) {
    check_enumeration_cap(lat);
    const int n = lat.n_sites();
    const std::size_t dim = std::size_t{1} << n;
    std::vector<Triplet> bm, dm, bp, dp;
    for (std::size_t a = 0; a < dim; ++a) {
        const auto row = static_cast<std::uint32_t>(a);
        const SubsetState alpha{row, n};
        for (int x = 0; x < n; ++x) {
            const std::uint32_t other = row ^ (1u << x);
            const SubsetState flipped{other, n};
            const double w_out = rate(family, flip_delta(alpha, x, omega, lat), beta);
            const double w_in = rate(family, flip_delta(flipped, x, omega, lat), beta);
            if (alpha.contains(x)) {
                dm.push_back({row, row, w_out});
                dm.push_back({row, other, -w_out});
                bm.push_back({row, other, w_in});
                bm.push_back({row, row, -w_in});
            } else {
                bp.push_back({row, row, w_out});
                bp.push_back({row, other, -w_out});
                dp.push_back({row, other, w_in});
                dp.push_back({row, row, -w_in});
            }
        }
    }
    return {SparseOperator::from_triplets(dim, std::move(bm)),
            SparseOperator::from_triplets(dim, std::move(dm)),
            SparseOperator::from_triplets(dim, std::move(bp)),
            SparseOperator::from_triplets(dim, std::move(dp))};
}

// E A E: relabel both indices by complement.
inline SparseOperator conjugate_by_complement(const SparseOperator& op) {
    const std::uint32_t mask = static_cast<std::uint32_t>(op.dim() - 1);
    std::vector<Triplet> t;
    t.reserve(op.nnz());
    for (std::size_t r = 0; r < op.dim(); ++r)
        for (std::size_t k = op.row_ptr()[r]; k < op.row_ptr()[r + 1]; ++k)
            t.push_back({static_cast<std::uint32_t>(r) ^ mask, op.cols()[k] ^ mask,
                         op.values()[k]});
    return SparseOperator::from_triplets(op.dim(), std::move(t), op.symmetric_flag());
}

// Gibbs symmetrization D^{1/2} L D^{-1/2}, D = diag(gibbs). Rejects input
// whose symmetrized image is not symmetric (non-reversible rate family).
inline SparseOperator symmetrize(const SparseOperator& gen, const EnergyTable& table,
                                 double tolerance = 1e-10) {
    if (gen.dim() != table.dim()) throw std::invalid_argument("symmetrize: dimension mismatch");
    std::vector<double> half_weight(table.dim());
    for (std::size_t a = 0; a < table.dim(); ++a) half_weight[a] = std::sqrt(table.gibbs[a]);
    std::vector<Triplet> t;
    t.reserve(gen.nnz());
    for (std::size_t r = 0; r < gen.dim(); ++r)
        for (std::size_t k = gen.row_ptr()[r]; k < gen.row_ptr()[r + 1]; ++k) {
            const std::uint32_t c = gen.cols()[k];
            t.push_back({static_cast<std::uint32_t>(r), c,
                         gen.values()[k] * half_weight[r] / half_weight[c]});
        }
    SparseOperator out = SparseOperator::from_triplets(gen.dim(), std::move(t), true);
    const double asym = out.max_relative_asymmetry();
    if (asym > tolerance)
        throw std::invalid_argument("symmetrize: generator is not reversible for this measure "
                                    "(relative asymmetry " + std::to_string(asym) + ")");
    return out;
}

// Closed-form construction of the symmetrized generator, the independent
// second path: diagonal sum of psi(beta Delta), off-diagonal
// -psi(beta Delta) e^{-beta Delta / 2}. For heat bath this is the familiar
// -1/(2 cosh(beta Delta / 2)).
inline SparseOperator assemble_symmetrized_direct(const Lattice& lat, const DisorderField& omega,
                                                  double beta, const RateFamily& family) {
    check_enumeration_cap(lat);
    const int n = lat.n_sites();
    const std::size_t dim = std::size_t{1} << n;
    std::vector<Triplet> t;
    t.reserve(dim * (n + 1));
    for (std::size_t a = 0; a < dim; ++a) {
        const auto row = static_cast<std::uint32_t>(a);
        const SubsetState alpha{row, n};
        double diag = 0.0;
        for (int x = 0; x < n; ++x) {
            const double delta = flip_delta(alpha, x, omega, lat);
            const double w = rate(family, delta, beta);
            diag += w;
            t.push_back({row, row ^ (1u << x), -w * std::exp(-0.5 * beta * delta)});
        }
        t.push_back({row, row, diag});
    }
    return SparseOperator::from_triplets(dim, std::move(t), true);
}

namespace detail {

// Direct matrix elements of the cosh dynamics: diagonal
// cosh(c) e^c / 2 per site (c = beta Delta_x H_alpha / 2), off-diagonal
// -cosh(c)/2.
inline SparseOperator hat_closed_form(const Lattice& lat, const DisorderField& omega,
                                      double beta) {
    const int n = lat.n_sites();
    const std::size_t dim = std::size_t{1} << n;
    std::vector<Triplet> t;
    t.reserve(dim * (n + 1));
    for (std::size_t a = 0; a < dim; ++a) {
        const auto row = static_cast<std::uint32_t>(a);
        const SubsetState alpha{row, n};
        double diag = 0.0;
        for (int x = 0; x < n; ++x) {
            const double c = 0.5 * beta * flip_delta(alpha, x, omega, lat);
            diag += 0.5 * std::cosh(c) * std::exp(c);
            t.push_back({row, row ^ (1u << x), -0.5 * std::cosh(c)});
        }
        t.push_back({row, row, diag});
    }
    return SparseOperator::from_triplets(dim, std::move(t), true);
}

}  // namespace detail

inline constexpr int kHatCap = 16;  // factorized path works with full 2^n diagonals

// The cosh dynamics generator L-hat, built through the factorized product
// sum_x e^{B/2} lbar_x e^{-B} lbar_x e^{B/2} (B = beta * diagonal Hamiltonian,
// lbar_x the Hadamard conjugate of the site projector, applied as
// (I - flip_x)/2). Cross-checked entrywise against the closed-form matrix
// elements; a mismatch means the two derivations drifted apart and is fatal.
inline SparseOperator assemble_hat(const Lattice& lat, const DisorderField& omega, double beta) {
    check_enumeration_cap(lat, kHatCap);
    const int n = lat.n_sites();
    const std::size_t dim = std::size_t{1} << n;

    std::vector<double> half_exp(dim), neg_exp(dim);
    for (std::size_t a = 0; a < dim; ++a) {
        const double h = energy({static_cast<std::uint32_t>(a), n}, omega, lat);
        half_exp[a] = std::exp(0.5 * beta * h);
        neg_exp[a] = std::exp(-beta * h);
    }

    std::vector<Triplet> t;
    t.reserve(dim * (n + 1));
    for (std::size_t a = 0; a < dim; ++a) {
        const auto col = static_cast<std::uint32_t>(a);
        double diag = 0.0;
        for (int x = 0; x < n; ++x) {
            const std::uint32_t other = col ^ (1u << x);
            // e^{B/2} e_a, then (I - s_x)/2, e^{-B}, (I - s_x)/2, e^{B/2}
            const double va = 0.5 * half_exp[a];
            const double vo = -0.5 * half_exp[a];
            const double wa = va * neg_exp[a];
            const double wo = vo * neg_exp[other];
            diag += half_exp[a] * 0.5 * (wa - wo);
            t.push_back({other, col, half_exp[other] * 0.5 * (wo - wa)});
        }
        t.push_back({col, col, diag});
    }
    SparseOperator out = SparseOperator::from_triplets(dim, std::move(t), true);

    const SparseOperator direct = detail::hat_closed_form(lat, omega, beta);
    const double scale = std::max(1.0, direct.max_abs_entry());
    if (SparseOperator::max_abs_difference(out, direct) > 1e-10 * scale)
        throw std::runtime_error("assemble_hat: factorized and closed-form paths disagree");
    return out;
}

// Literal application of one factorized term with the Hadamard butterfly:
// e^{B/2} (U l_x U) e^{-B} (U l_x U) e^{B/2} v, summed over x. Test-oriented;
// costs O(n^2 2^n) per call.
inline StateVector apply_hat_butterfly(const Lattice& lat, const DisorderField& omega, double beta,
                                       const StateVector& v) {
    const int n = lat.n_sites();
    const std::size_t dim = std::size_t{1} << n;
    if (v.dim() != dim) throw std::invalid_argument("apply_hat_butterfly: dimension mismatch");
    std::vector<double> half_exp(dim), neg_exp(dim);
    for (std::size_t a = 0; a < dim; ++a) {
        const double h = energy({static_cast<std::uint32_t>(a), n}, omega, lat);
        half_exp[a] = std::exp(0.5 * beta * h);
        neg_exp[a] = std::exp(-beta * h);
    }
    StateVector acc = StateVector::zeros(n);
    for (int x = 0; x < n; ++x) {
        StateVector w = v;
        for (std::size_t a = 0; a < dim; ++a) w.amp[a] *= half_exp[a];
        w = site_projector_apply(x, apply_hadamard(w));
        hadamard_in_place(w.amp);
        for (std::size_t a = 0; a < dim; ++a) w.amp[a] *= neg_exp[a];
        w = site_projector_apply(x, apply_hadamard(w));
        hadamard_in_place(w.amp);
        for (std::size_t a = 0; a < dim; ++a) acc.amp[a] += w.amp[a] * half_exp[a];
    }
    return acc;
}

}  // namespace glauber
