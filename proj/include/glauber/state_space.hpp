#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace glauber {

// Subsets of the box are encoded as bit-sets: ascending site index =
// ascending bit significance. Spin convention: site in the subset <-> spin +1.
struct SubsetState {
    std::uint32_t bits = 0;
    int n_sites = 0;

    int particles() const noexcept { return std::popcount(bits); }
    bool contains(int x) const noexcept { return (bits >> x) & 1u; }
    int spin(int x) const noexcept { return contains(x) ? +1 : -1; }
    SubsetState flipped(int x) const noexcept { return {bits ^ (1u << x), n_sites}; }
    SubsetState complement() const noexcept {
        return {~bits & ((n_sites >= 32 ? ~0u : ((1u << n_sites) - 1u))), n_sites};
    }
};

// Element of l^2 over the subsets, dimension 2^n.
struct StateVector {
    int n_sites = 0;
    std::vector<double> amp;

    static StateVector zeros(int n) {
        StateVector v;
        v.n_sites = n;
        v.amp.assign(std::size_t{1} << n, 0.0);
        return v;
    }

    static StateVector basis(int n, std::uint32_t alpha) {
        StateVector v = zeros(n);
        v.amp[alpha] = 1.0;
        return v;
    }

    std::size_t dim() const noexcept { return amp.size(); }

    double norm() const noexcept {
        double s = 0.0;
        for (double a : amp) s += a * a;
        return std::sqrt(s);
    }
};

inline double dot(const StateVector& a, const StateVector& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += a.amp[i] * b.amp[i];
    return s;
}

// In-place fast Walsh-Hadamard butterfly, normalized by 2^{-n/2}. The
// resulting matrix has entries 2^{-n/2} (-1)^{|alpha ^ gamma|... } i.e.
// (-1)^{|alpha & gamma|} in subset language; it is a symmetric involution.
inline void hadamard_in_place(std::vector<double>& a) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("hadamard: dimension must be a power of two");
    for (std::size_t h = 1; h < n; h <<= 1) {
        for (std::size_t i = 0; i < n; i += h << 1) {
            for (std::size_t j = i; j < i + h; ++j) {
                const double x = a[j];
                const double y = a[j + h];
                a[j] = x + y;
                a[j + h] = x - y;
            }
        }
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (double& x : a) x *= scale;
}

// U_Lambda v.
inline StateVector apply_hadamard(const StateVector& v) {
    StateVector out = v;
    hadamard_in_place(out.amp);
    return out;
}

// E_Lambda v: amplitude at alpha moves to the complement of alpha.
inline StateVector apply_complement(const StateVector& v) {
    StateVector out = StateVector::zeros(v.n_sites);
    const std::size_t mask = v.dim() - 1;
    for (std::size_t a = 0; a < v.dim(); ++a) out.amp[a ^ mask] = v.amp[a];
    return out;
}

// ell_x v: keeps only subsets containing x.
inline StateVector site_projector_apply(int x, const StateVector& v) {
    if (x < 0 || x >= v.n_sites) throw std::out_of_range("site_projector_apply: site out of range");
    StateVector out = StateVector::zeros(v.n_sites);
    const std::size_t bit = std::size_t{1} << x;
    for (std::size_t a = 0; a < v.dim(); ++a)
        if (a & bit) out.amp[a] = v.amp[a];
    return out;
}

enum class SectorMode { parity_E, parity_Ebar, particle_number };

// Splits v into components that sum back to v exactly. parity_E gives the
// (v +- Ev)/2 pair; parity_Ebar splits by particle-number parity (the
// diagonal form of U E U); particle_number gives n+1 popcount components.
inline std::vector<StateVector> sector_split(const StateVector& v, SectorMode mode) {
    std::vector<StateVector> out;
    switch (mode) {
        case SectorMode::parity_E: {
            StateVector ev = apply_complement(v);
            StateVector plus = StateVector::zeros(v.n_sites);
            StateVector minus = StateVector::zeros(v.n_sites);
            for (std::size_t a = 0; a < v.dim(); ++a) {
                plus.amp[a] = 0.5 * (v.amp[a] + ev.amp[a]);
                minus.amp[a] = 0.5 * (v.amp[a] - ev.amp[a]);
            }
            out.push_back(std::move(plus));
            out.push_back(std::move(minus));
            break;
        }
        case SectorMode::parity_Ebar: {
            StateVector even = StateVector::zeros(v.n_sites);
            StateVector odd = StateVector::zeros(v.n_sites);
            for (std::size_t a = 0; a < v.dim(); ++a)
                (std::popcount(a) % 2 == 0 ? even : odd).amp[a] = v.amp[a];
            out.push_back(std::move(even));
            out.push_back(std::move(odd));
            break;
        }
        case SectorMode::particle_number: {
            out.assign(v.n_sites + 1, StateVector::zeros(v.n_sites));
            for (std::size_t a = 0; a < v.dim(); ++a) out[std::popcount(a)].amp[a] = v.amp[a];
            break;
        }
    }
    return out;
}

struct InvolutionResult {
    StateVector state;
    std::uint64_t boundary_record = 0;  // the eta attached to the relabelling
};

// iota^eta at the vector level: alpha -> Lambda \ alpha, with the boundary
// subset eta recorded alongside. eta lives in the boundary-layer indexing
// (bit positions >= n_sites); bits inside the box are rejected.
inline InvolutionResult subbox_involution(const StateVector& v, std::uint64_t eta) {
    const std::uint64_t box_mask =
        v.n_sites >= 64 ? ~0ull : ((std::uint64_t{1} << v.n_sites) - 1);
    if (eta & box_mask) throw std::invalid_argument("subbox_involution: eta overlaps the box");
    return {apply_complement(v), eta};
}

}  // namespace glauber
