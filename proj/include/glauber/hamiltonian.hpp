#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "glauber/disorder.hpp"
#include "glauber/lattice.hpp"
#include "glauber/sparse_operator.hpp"
#include "glauber/state_space.hpp"

namespace glauber {

inline constexpr int kEnumerationCap = 20;  // dense enumeration bound, 2^20 states

inline void check_enumeration_cap(const Lattice& lat, int cap = kEnumerationCap) {
    if (lat.n_sites() > cap)
        throw std::invalid_argument("lattice too large for dense enumeration (|Lambda| > " +
                                    std::to_string(cap) + ")");
}

// H_alpha = -sum_bonds w_b s_x s_y, plus the boundary sum (with + sign) for
// fixed bc.
inline double energy(const SubsetState& alpha, const DisorderField& omega, const Lattice& lat) {
    if (alpha.n_sites != lat.n_sites())
        throw std::invalid_argument("energy: state/lattice mismatch");
    if (omega.couplings.size() != lat.bonds.size())
        throw std::invalid_argument("energy: field/lattice mismatch");
    double h = 0.0;
    for (std::size_t b = 0; b < lat.bonds.size(); ++b)
        h -= omega.couplings[b] * alpha.spin(lat.bonds[b].a) * alpha.spin(lat.bonds[b].b);
    for (std::size_t b = 0; b < lat.boundary_bonds.size(); ++b)
        h += omega.boundary_couplings[b] * alpha.spin(lat.boundary_bonds[b].site) *
             lat.boundary_bonds[b].spin;
    return h;
}

// Delta_x H_alpha = H_alpha - H_{alpha flip x}; local, O(2d).
inline double flip_delta(const SubsetState& alpha, int x, const DisorderField& omega,
                         const Lattice& lat) {
    if (x < 0 || x >= lat.n_sites()) throw std::out_of_range("flip_delta: site out of range");
    const int sx = alpha.spin(x);
    double s = 0.0;
    for (const auto& [bond_idx, y] : lat.adjacency()[x])
        s += omega.couplings[bond_idx] * alpha.spin(y);
    double d = -2.0 * sx * s;
    for (int bi : lat.boundary_adjacency()[x])
        d += 2.0 * sx * omega.boundary_couplings[bi] * lat.boundary_bonds[bi].spin;
    return d;
}

// Energies, Gibbs weights and log Z for a full enumeration of the box.
// Reference measure: uniform probability on the subsets, so Z(beta=0) = 1.
struct EnergyTable {
    double beta = 0.0;
    std::vector<double> energies;
    std::vector<double> gibbs;
    double log_z = 0.0;

    std::size_t dim() const noexcept { return energies.size(); }
};

inline EnergyTable gibbs_table(const DisorderField& omega, const Lattice& lat, double beta) {
    check_enumeration_cap(lat);
    const int n = lat.n_sites();
    const std::size_t dim = std::size_t{1} << n;
    EnergyTable t;
    t.beta = beta;
    t.energies.resize(dim);
    for (std::size_t a = 0; a < dim; ++a)
        t.energies[a] = energy({static_cast<std::uint32_t>(a), n}, omega, lat);
    // shift by the minimum energy so the exponentials cannot overflow
    const double e_min = *std::min_element(t.energies.begin(), t.energies.end());
    t.gibbs.resize(dim);
    double sum = 0.0;
    for (std::size_t a = 0; a < dim; ++a) {
        t.gibbs[a] = std::exp(-beta * (t.energies[a] - e_min));
        sum += t.gibbs[a];
    }
    for (double& g : t.gibbs) g /= sum;
    // Z = 2^{-n} sum_alpha e^{-beta H_alpha}
    t.log_z = std::log(sum) - beta * e_min - n * std::log(2.0);
    return t;
}

// The Hamiltonian as an operator on l^2 of the subsets: the diagonal form
// sum_alpha H_alpha |alpha><alpha| and its Hadamard conjugate U H U, which is
// the bond-flip form -sum_b w_b s_b (s_b flips both endpoints of the bond).
// Note the minus sign: conjugating the diagonal of -w_b * (spin product)
// yields -w_b times the double flip, so one-particle matrix elements are
// <z|UHU|y> = -w_{zy} on bonds.
struct HamiltonianOperator {
    SparseOperator diagonal;
    SparseOperator offdiag;
};

inline HamiltonianOperator hamiltonian_operator(const DisorderField& omega, const Lattice& lat) {
    check_enumeration_cap(lat);
    const int n = lat.n_sites();
    const std::size_t dim = std::size_t{1} << n;

    std::vector<double> diag(dim);
    for (std::size_t a = 0; a < dim; ++a)
        diag[a] = energy({static_cast<std::uint32_t>(a), n}, omega, lat);

    std::vector<Triplet> off;
    off.reserve(dim * lat.bonds.size() + dim);
    for (std::size_t a = 0; a < dim; ++a) {
        for (std::size_t b = 0; b < lat.bonds.size(); ++b) {
            const std::uint32_t flip =
                (1u << lat.bonds[b].a) | (1u << lat.bonds[b].b);
            off.push_back({static_cast<std::uint32_t>(a) ^ flip, static_cast<std::uint32_t>(a),
                           -omega.couplings[b]});
        }
        // fixed-bc boundary edges flip a single interior site; the printed +
        // boundary sum is -w*xi times the single-site character, so the same
        // minus sign appears after conjugation
        for (std::size_t b = 0; b < lat.boundary_bonds.size(); ++b)
            off.push_back({static_cast<std::uint32_t>(a) ^ (1u << lat.boundary_bonds[b].site),
                           static_cast<std::uint32_t>(a),
                           -omega.boundary_couplings[b] * lat.boundary_bonds[b].spin});
    }
    return {SparseOperator::diagonal(diag),
            SparseOperator::from_triplets(dim, std::move(off), true)};
}

inline void write_energy_csv(std::ostream& os, const EnergyTable& t) {
    os << "subset,energy,gibbs\n";
    for (std::size_t a = 0; a < t.dim(); ++a)
        os << a << ',' << t.energies[a] << ',' << t.gibbs[a] << '\n';
}

}  // namespace glauber
