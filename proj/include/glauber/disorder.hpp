#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "glauber/lattice.hpp"
#include "glauber/rng.hpp"

namespace glauber {

// One bounded coupling per bond. For fixed bc the frozen boundary edges carry
// couplings too, stored separately after the bulk ones.
struct DisorderField {
    std::vector<double> couplings;           // bulk, indexed like Lattice::bonds
    std::vector<double> boundary_couplings;  // indexed like Lattice::boundary_bonds
    double j_minus = 0.0;
    double j_plus = 0.0;
    std::uint64_t seed = 0;
    bool is_constant = false;
    double constant_value = 0.0;
    std::string distribution = "uniform";

    // J := |J^-| v |J^+|
    double coupling_scale() const noexcept {
        return std::max(std::fabs(j_minus), std::fabs(j_plus));
    }

    std::string seed_label() const {
        if (is_constant) return "constant(" + std::to_string(constant_value) + ")";
        return std::to_string(seed);
    }
};

// I.i.d. couplings, uniform on [j_minus, j_plus]. Each value is a pure
// function of (seed, bond index), so the field is reproducible bit-for-bit
// and independent of sampling order.
inline DisorderField sample_disorder(const Lattice& lat, double j_minus, double j_plus,
                                     std::uint64_t seed) {
    if (j_minus > j_plus) throw std::invalid_argument("sample_disorder: j_minus > j_plus");
    DisorderField f;
    f.j_minus = j_minus;
    f.j_plus = j_plus;
    f.seed = seed;
    f.couplings.resize(lat.bonds.size());
    for (std::size_t b = 0; b < lat.bonds.size(); ++b)
        f.couplings[b] = j_minus + (j_plus - j_minus) * rng::to_unit(rng::derive(seed, b));
    f.boundary_couplings.resize(lat.boundary_bonds.size());
    for (std::size_t b = 0; b < lat.boundary_bonds.size(); ++b)
        f.boundary_couplings[b] =
            j_minus + (j_plus - j_minus) * rng::to_unit(rng::derive(seed, lat.bonds.size() + b));
    return f;
}

// Potential constant on all bonds (the zeta realizations of the constant
// sweep). Bounds are optional; when given, zeta must lie inside them.
inline DisorderField constant_disorder(const Lattice& lat, double zeta, double j_minus = 0.0,
                                       double j_plus = 0.0) {
    const bool have_bounds = j_minus != 0.0 || j_plus != 0.0;
    if (have_bounds && (zeta < j_minus || zeta > j_plus))
        throw std::invalid_argument("constant_disorder: zeta outside [j_minus, j_plus]");
    DisorderField f;
    f.j_minus = have_bounds ? j_minus : zeta;
    f.j_plus = have_bounds ? j_plus : zeta;
    f.is_constant = true;
    f.constant_value = zeta;
    f.distribution = "constant";
    f.couplings.assign(lat.bonds.size(), zeta);
    f.boundary_couplings.assign(lat.boundary_bonds.size(), zeta);
    return f;
}

inline nlohmann::json to_json(const DisorderField& f, const Lattice& lat) {
    nlohmann::json j;
    j["d"] = lat.dim;
    j["lengths"] = lat.lengths;
    j["bc"] = to_string(lat.bc);
    j["j_minus"] = f.j_minus;
    j["j_plus"] = f.j_plus;
    j["seed"] = f.seed_label();
    j["distribution"] = f.distribution;
    j["couplings"] = f.couplings;
    if (!f.boundary_couplings.empty()) j["boundary_couplings"] = f.boundary_couplings;
    return j;
}

}  // namespace glauber
