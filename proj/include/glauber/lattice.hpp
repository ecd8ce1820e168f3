#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace glauber {

enum class BoundaryMode { periodic, free_bc, fixed };

inline const char* to_string(BoundaryMode m) {
    switch (m) {
        case BoundaryMode::periodic: return "periodic";
        case BoundaryMode::free_bc: return "free";
        case BoundaryMode::fixed: return "fixed";
    }
    return "?";
}

inline BoundaryMode boundary_mode_from_string(const std::string& s) {
    if (s == "periodic") return BoundaryMode::periodic;
    if (s == "free") return BoundaryMode::free_bc;
    if (s == "fixed") return BoundaryMode::fixed;
    throw std::invalid_argument("unknown boundary mode: " + s);
}

// Unordered nearest-neighbour pair, stored with a < b.
struct Bond {
    int a;
    int b;
    int axis;
};

// Fixed-bc edge from an interior site to a frozen exterior spin.
struct BoundaryBond {
    int site;
    int axis;
    int direction;  // -1 or +1
    int spin;       // frozen exterior spin value, +-1
};

class Lattice {
public:
    int dim = 0;
    std::vector<int> lengths;
    BoundaryMode bc = BoundaryMode::periodic;
    std::vector<std::vector<int>> coords;      // site index -> coordinates
    std::vector<Bond> bonds;                   // sorted by (min site, axis)
    std::vector<BoundaryBond> boundary_bonds;  // empty unless bc == fixed

    int n_sites() const noexcept { return static_cast<int>(coords.size()); }
    int n_bonds() const noexcept { return static_cast<int>(bonds.size()); }

    int site_index(const std::vector<int>& c) const {
        int idx = 0;
        for (int k = 0; k < dim; ++k) idx = idx * lengths[k] + c[k];
        return idx;
    }

    // Per-site adjacency: (bond index, neighbour site).
    const std::vector<std::vector<std::pair<int, int>>>& adjacency() const { return adjacency_; }

    // Per-site fixed-bc edges (indices into boundary_bonds).
    const std::vector<std::vector<int>>& boundary_adjacency() const { return boundary_adjacency_; }

    void build_adjacency() {
        adjacency_.assign(coords.size(), {});
        for (int bi = 0; bi < n_bonds(); ++bi) {
            adjacency_[bonds[bi].a].emplace_back(bi, bonds[bi].b);
            adjacency_[bonds[bi].b].emplace_back(bi, bonds[bi].a);
        }
        boundary_adjacency_.assign(coords.size(), {});
        for (int i = 0; i < static_cast<int>(boundary_bonds.size()); ++i)
            boundary_adjacency_[boundary_bonds[i].site].push_back(i);
    }

private:
    std::vector<std::vector<std::pair<int, int>>> adjacency_;
    std::vector<std::vector<int>> boundary_adjacency_;
};

// Finite box with deterministic site/bond enumeration: sites lexicographic in
// coordinates, bonds sorted by (min site index, axis). For fixed bc every
// outward edge of the box is attached to a frozen exterior spin
// (boundary_spin on all of them).
inline Lattice build_lattice(int d, const std::vector<int>& lengths, BoundaryMode bc,
                             int boundary_spin = +1) {
    if (d < 1) throw std::invalid_argument("build_lattice: dimension must be >= 1");
    if (static_cast<int>(lengths.size()) != d)
        throw std::invalid_argument("build_lattice: lengths/dimension mismatch");
    for (int L : lengths) {
        // free bc admits the degenerate single-site box (no bonds); the other
        // modes need actual interior structure
        if (L < (bc == BoundaryMode::free_bc ? 1 : 2))
            throw std::invalid_argument("build_lattice: length too small for this boundary mode");
        if (bc == BoundaryMode::periodic && L < 3)
            throw std::invalid_argument(
                "build_lattice: periodic bc needs each length >= 3 (doubled bonds otherwise)");
    }
    if (bc == BoundaryMode::fixed && boundary_spin != 1 && boundary_spin != -1)
        throw std::invalid_argument("build_lattice: boundary spin must be +-1");

    Lattice lat;
    lat.dim = d;
    lat.lengths = lengths;
    lat.bc = bc;

    long n = 1;
    for (int L : lengths) n *= L;
    lat.coords.reserve(static_cast<std::size_t>(n));
    std::vector<int> c(d, 0);
    for (long i = 0; i < n; ++i) {
        lat.coords.push_back(c);
        for (int k = d - 1; k >= 0; --k) {
            if (++c[k] < lengths[k]) break;
            c[k] = 0;
        }
    }

    for (int s = 0; s < static_cast<int>(n); ++s) {
        for (int axis = 0; axis < d; ++axis) {
            std::vector<int> nb = lat.coords[s];
            if (nb[axis] + 1 < lengths[axis]) {
                ++nb[axis];
            } else if (bc == BoundaryMode::periodic) {
                nb[axis] = 0;
            } else {
                if (bc == BoundaryMode::fixed)
                    lat.boundary_bonds.push_back({s, axis, +1, boundary_spin});
                continue;
            }
            const int t = lat.site_index(nb);
            lat.bonds.push_back({std::min(s, t), std::max(s, t), axis});
        }
        if (bc == BoundaryMode::fixed) {
            for (int axis = 0; axis < d; ++axis)
                if (lat.coords[s][axis] == 0)
                    lat.boundary_bonds.push_back({s, axis, -1, boundary_spin});
        }
    }
    std::sort(lat.bonds.begin(), lat.bonds.end(), [](const Bond& x, const Bond& y) {
        return std::tie(x.a, x.axis, x.b) < std::tie(y.a, y.axis, y.b);
    });
    lat.build_adjacency();
    return lat;
}

}  // namespace glauber
