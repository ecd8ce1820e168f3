#include <gtest/gtest.h>

#include <cmath>

#include "glauber/hamiltonian.hpp"
#include "glauber/rng.hpp"

using namespace glauber;

namespace {

StateVector random_vector(int n, std::uint64_t key) {
    rng::CounterStream s(key);
    StateVector v = StateVector::zeros(n);
    for (double& a : v.amp) a = s.next_normal();
    return v;
}

}  // namespace

TEST(Energy, RingOfFourUnitCouplings) {
    const Lattice lat = build_lattice(1, {4}, BoundaryMode::periodic);
    const DisorderField omega = constant_disorder(lat, 1.0);
    // aligned configurations: every bond satisfied
    EXPECT_DOUBLE_EQ(energy({0b0000u, 4}, omega, lat), -4.0);
    EXPECT_DOUBLE_EQ(energy({0b1111u, 4}, omega, lat), -4.0);
    // alternating configuration: every bond frustrated
    EXPECT_DOUBLE_EQ(energy({0b0101u, 4}, omega, lat), 4.0);
    EXPECT_DOUBLE_EQ(energy({0b1010u, 4}, omega, lat), 4.0);
    // single flip from aligned: two bonds change sign
    EXPECT_DOUBLE_EQ(energy({0b0001u, 4}, omega, lat), 0.0);
}

TEST(Energy, ComplementSymmetryWithoutBoundary) {
    const Lattice lat = build_lattice(2, {3, 3}, BoundaryMode::periodic);
    const DisorderField omega = sample_disorder(lat, -1.0, 1.0, 13);
    for (std::uint32_t a = 0; a < 512; ++a) {
        const SubsetState s{a, 9};
        EXPECT_NEAR(energy(s, omega, lat), energy(s.complement(), omega, lat), 1e-12);
    }
}

TEST(Energy, FixedBoundaryBreaksComplementSymmetry) {
    const Lattice lat = build_lattice(1, {4}, BoundaryMode::fixed, +1);
    const DisorderField omega = constant_disorder(lat, 1.0);
    // all +1 against a +1 boundary: bulk -3, boundary sum +(1*1*1)*2 = +2
    EXPECT_DOUBLE_EQ(energy({0b1111u, 4}, omega, lat), -1.0);
    // all -1 against a +1 boundary: bulk -3, boundary -2
    EXPECT_DOUBLE_EQ(energy({0b0000u, 4}, omega, lat), -5.0);
}

TEST(FlipDelta, MatchesEnergyDifferenceExhaustively) {
    for (auto bc : {BoundaryMode::periodic, BoundaryMode::free_bc, BoundaryMode::fixed}) {
        const Lattice lat = build_lattice(1, {6}, bc);
        const DisorderField omega = sample_disorder(lat, -1.0, 1.0, 5);
        for (std::uint32_t a = 0; a < 64; ++a) {
            const SubsetState s{a, 6};
            for (int x = 0; x < 6; ++x) {
                const double direct =
                    energy(s, omega, lat) - energy(s.flipped(x), omega, lat);
                EXPECT_NEAR(flip_delta(s, x, omega, lat), direct, 1e-12);
            }
        }
    }
}

TEST(FlipDelta, UniformBoundExhaustive) {
    // |Delta_x H| <= 4 d J on every state and site
    const Lattice lat = build_lattice(2, {3, 3}, BoundaryMode::periodic);
    const double J = 1.0;
    const DisorderField omega = sample_disorder(lat, -J, J, 17);
    const double bound = 4.0 * lat.dim * J;
    for (std::uint32_t a = 0; a < 512; ++a)
        for (int x = 0; x < 9; ++x)
            EXPECT_LE(std::fabs(flip_delta({a, 9}, x, omega, lat)), bound + 1e-12);
}

TEST(GibbsTable, NormalizationAndInfiniteTemperature) {
    const Lattice lat = build_lattice(1, {5}, BoundaryMode::periodic);
    const DisorderField omega = sample_disorder(lat, -1.0, 1.0, 7);
    const EnergyTable t0 = gibbs_table(omega, lat, 0.0);
    // beta = 0: uniform measure, Z = 1 under the uniform reference measure
    EXPECT_NEAR(t0.log_z, 0.0, 1e-14);
    for (double g : t0.gibbs) EXPECT_NEAR(g, 1.0 / 32.0, 1e-15);

    const EnergyTable t = gibbs_table(omega, lat, 0.4);
    double sum = 0.0;
    for (double g : t.gibbs) sum += g;
    EXPECT_NEAR(sum, 1.0, 1e-13);
    // independent ratio check: mu_a / mu_b = e^{-beta (H_a - H_b)}
    for (std::uint32_t a : {1u, 7u, 19u})
        EXPECT_NEAR(t.gibbs[a] / t.gibbs[0],
                    std::exp(-0.4 * (t.energies[a] - t.energies[0])), 1e-12);
}

TEST(GibbsTable, ComplementSymmetricMeasure) {
    const Lattice lat = build_lattice(1, {6}, BoundaryMode::periodic);
    const DisorderField omega = sample_disorder(lat, -1.0, 1.0, 23);
    const EnergyTable t = gibbs_table(omega, lat, 0.5);
    for (std::uint32_t a = 0; a < 64; ++a)
        EXPECT_NEAR(t.gibbs[a], t.gibbs[a ^ 63u], 1e-14);
}

TEST(HamiltonianOperator, DiagonalMatchesEnergies) {
    const Lattice lat = build_lattice(1, {5}, BoundaryMode::periodic);
    const DisorderField omega = sample_disorder(lat, -1.0, 1.0, 29);
    const HamiltonianOperator H = hamiltonian_operator(omega, lat);
    for (std::uint32_t a = 0; a < 32; ++a)
        EXPECT_DOUBLE_EQ(H.diagonal.coeff(a, a), energy({a, 5}, omega, lat));
}

TEST(HamiltonianOperator, OffdiagIsHadamardConjugate) {
    // the flip form must equal U (diagonal) U applied to random vectors
    for (auto bc : {BoundaryMode::periodic, BoundaryMode::fixed}) {
        const Lattice lat = build_lattice(1, {6}, bc);
        const DisorderField omega = sample_disorder(lat, -1.0, 1.0, 31);
        const HamiltonianOperator H = hamiltonian_operator(omega, lat);
        for (std::uint64_t key : {1ull, 2ull, 3ull}) {
            const StateVector v = random_vector(6, key);
            const StateVector conj = apply_hadamard(H.diagonal.apply(apply_hadamard(v)));
            const StateVector direct = H.offdiag.apply(v);
            for (std::size_t a = 0; a < v.dim(); ++a)
                EXPECT_NEAR(direct.amp[a], conj.amp[a], 1e-10);
        }
    }
}

TEST(HamiltonianOperator, OneParticleElementsAreMinusCouplings) {
    // <{z}| U H U |{y}> = -w_{zy} for nearest neighbours, 0 otherwise
    const Lattice lat = build_lattice(1, {6}, BoundaryMode::periodic);
    const DisorderField omega = sample_disorder(lat, -1.0, 1.0, 37);
    const HamiltonianOperator H = hamiltonian_operator(omega, lat);
    for (std::size_t b = 0; b < lat.bonds.size(); ++b) {
        const std::uint32_t y = 1u << lat.bonds[b].a;
        const std::uint32_t z = 1u << lat.bonds[b].b;
        EXPECT_DOUBLE_EQ(H.offdiag.coeff(z, y), -omega.couplings[b]);
        EXPECT_DOUBLE_EQ(H.offdiag.coeff(y, z), -omega.couplings[b]);
    }
    EXPECT_EQ(H.offdiag.coeff(1u << 0, 1u << 2), 0.0);
}

TEST(HamiltonianOperator, EnumerationCap) {
    const Lattice big = build_lattice(1, {21}, BoundaryMode::free_bc);
    EXPECT_THROW(check_enumeration_cap(big), std::invalid_argument);
    EXPECT_NO_THROW(check_enumeration_cap(build_lattice(1, {20}, BoundaryMode::free_bc)));
}
