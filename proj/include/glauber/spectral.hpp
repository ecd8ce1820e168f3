#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "glauber/dense_eigen.hpp"
#include "glauber/lanczos.hpp"
#include "glauber/sparse_operator.hpp"

namespace glauber {

inline constexpr std::size_t kDenseDimCap = 4096;

struct SpectrumResult {
    std::vector<double> eigenvalues;  // ascending; may be only the low end
    std::string method;               // "dense", "dense_parity", "lanczos"
    double residual_bound = 0.0;      // worst a-posteriori residual, 0 for dense
    bool partial = false;             // true when only the low end was computed
};

inline std::vector<double> flatten_dense(const SparseOperator& op) {
    const std::size_t n = op.dim();
    std::vector<double> flat(n * n, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t k = op.row_ptr()[r]; k < op.row_ptr()[r + 1]; ++k)
            flat[r * n + op.cols()[k]] = op.values()[k];
    return flat;
}

// Full spectrum by the in-project dense solver.
inline SpectrumResult dense_spectrum(const SparseOperator& op) {
    if (op.dim() > kDenseDimCap)
        throw std::invalid_argument("dense_spectrum: dimension above the dense cap");
    SpectrumResult res;
    res.eigenvalues = symmetric_eigen(flatten_dense(op), op.dim(), false).eigenvalues;
    res.method = "dense";
    return res;
}

// For operators commuting with the complement relabelling E the spectrum
// splits into two blocks over representatives alpha < complement(alpha):
// B^{+-}_{ag} = A_{ag} +- A_{a, complement(g)}. Halves the dense dimension.
inline SpectrumResult dense_spectrum_parity(const SparseOperator& op) {
    const std::size_t dim = op.dim();
    if (dim < 2 || (dim & (dim - 1)) != 0)
        throw std::invalid_argument("dense_spectrum_parity: dimension must be a power of two >= 2");
    const std::uint32_t mask = static_cast<std::uint32_t>(dim - 1);
    const std::size_t half = dim / 2;
    // representatives: alpha with top bit clear, i.e. alpha < complement(alpha)
    std::vector<double> bp(half * half, 0.0), bm(half * half, 0.0);
    for (std::size_t r = 0; r < half; ++r) {
        for (std::size_t k = op.row_ptr()[r]; k < op.row_ptr()[r + 1]; ++k) {
            const std::uint32_t c = op.cols()[k];
            const double v = op.values()[k];
            const std::uint32_t rep = (c < half) ? c : (c ^ mask);
            if (c < half) {
                bp[r * half + rep] += v;
                bm[r * half + rep] += v;
            } else {
                bp[r * half + rep] += v;
                bm[r * half + rep] -= v;
            }
        }
    }
    SpectrumResult res;
    auto ep = symmetric_eigen(std::move(bp), half, false).eigenvalues;
    auto em = symmetric_eigen(std::move(bm), half, false).eigenvalues;
    res.eigenvalues.reserve(dim);
    std::merge(ep.begin(), ep.end(), em.begin(), em.end(), std::back_inserter(res.eigenvalues));
    res.method = "dense_parity";
    return res;
}

// Whether conjugation by E leaves op invariant (up to tol, relative to the
// largest entry). Preconditions the parity split.
inline bool commutes_with_complement(const SparseOperator& op, double tol = 1e-12) {
    const std::uint32_t mask = static_cast<std::uint32_t>(op.dim() - 1);
    const double scale = std::max(1.0, op.max_abs_entry());
    for (std::size_t r = 0; r < op.dim(); ++r)
        for (std::size_t k = op.row_ptr()[r]; k < op.row_ptr()[r + 1]; ++k) {
            const double mirror = op.coeff(static_cast<std::uint32_t>(r) ^ mask,
                                           op.cols()[k] ^ mask);
            if (std::fabs(op.values()[k] - mirror) > tol * scale) return false;
        }
    return true;
}

// Low end of the spectrum: dense below dense_cutoff, Lanczos above.
inline SpectrumResult low_spectrum(const SparseOperator& op, int k,
                                   std::size_t dense_cutoff = 1024,
                                   const LanczosParams& params = {}) {
    if (op.dim() <= dense_cutoff) return dense_spectrum(op);  // full spectrum, callers slice
    LanczosReport rep = lanczos_lowest(op, k, params);
    SpectrumResult res;
    res.eigenvalues = rep.eigenvalues;
    res.method = "lanczos";
    res.partial = true;
    for (double r : rep.residuals) res.residual_bound = std::max(res.residual_bound, r);
    return res;
}

struct BandReport {
    double ground = 0.0;
    std::vector<double> band;  // |Lambda| eigenvalues, ascending
    double band_min = 0.0;
    double band_max = 0.0;
    double gap_below = 0.0;                 // band_min - ground
    double gap_above = 0.0;                 // next eigenvalue above - band_max
    bool gap_above_known = false;
    bool isolated = false;                  // both gaps exceed half the band width
};

// The lowest band: the n_sites eigenvalues nearest 1 after removing the
// single smallest eigenvalue (the ground state). eigenvalues must be
// ascending and contain at least n_sites + 2 entries for the upper gap.
inline BandReport extract_band(const std::vector<double>& eigenvalues, int n_sites) {
    if (eigenvalues.size() < static_cast<std::size_t>(n_sites) + 1)
        throw std::invalid_argument("extract_band: need at least n_sites + 1 eigenvalues");
    BandReport rep;
    rep.ground = eigenvalues.front();
    std::vector<double> rest(eigenvalues.begin() + 1, eigenvalues.end());
    // nearest-to-1 selection; rest is sorted, so the band is a contiguous run
    std::size_t lo = 0, hi = rest.size();
    while (hi - lo > static_cast<std::size_t>(n_sites)) {
        if (std::fabs(rest[lo] - 1.0) > std::fabs(rest[hi - 1] - 1.0))
            ++lo;
        else
            --hi;
    }
    rep.band.assign(rest.begin() + lo, rest.begin() + hi);
    rep.band_min = rep.band.front();
    rep.band_max = rep.band.back();
    rep.gap_below = rep.band_min - (lo == 0 ? rep.ground : rest[lo - 1]);
    if (hi < rest.size()) {
        rep.gap_above = rest[hi] - rep.band_max;
        rep.gap_above_known = true;
    }
    const double half_width = 0.5 * (rep.band_max - rep.band_min);
    rep.isolated = rep.gap_below > half_width && rep.gap_above_known &&
                   rep.gap_above > half_width;
    return rep;
}

struct EigenvalueCluster {
    double value = 0.0;  // cluster mean
    int multiplicity = 0;
};

// Groups ascending eigenvalues into degenerate clusters: a new cluster starts
// when the gap to the previous eigenvalue exceeds tol.
inline std::vector<EigenvalueCluster> cluster_eigenvalues(const std::vector<double>& eigs,
                                                          double tol = 1e-10) {
    std::vector<EigenvalueCluster> out;
    double last = 0.0;
    for (double l : eigs) {
        if (!out.empty() && l - last <= tol) {
            auto& c = out.back();
            c.value = (c.value * c.multiplicity + l) / (c.multiplicity + 1);
            ++c.multiplicity;
        } else {
            out.push_back({l, 1});
        }
        last = l;
    }
    return out;
}

}  // namespace glauber
