#include <gtest/gtest.h>

#include <cmath>

#include "glauber/generator.hpp"
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

TEST(Rates, FrozenHeatBathValues) {
    const RateFamily hb = RateFamily::heat_bath();
    EXPECT_DOUBLE_EQ(psi_value(hb, 0.0), 0.5);
    // psi(-2) = 1/(1+e^2)
    EXPECT_NEAR(rate(hb, -4.0, 0.5), 0.11920292202211755, 1e-16);
    EXPECT_NEAR(rate(hb, 4.0, 0.5), 1.0 - 0.11920292202211755, 1e-15);
    const RateFamily cq = RateFamily::cosh_quarter();
    EXPECT_DOUBLE_EQ(psi_value(cq, 0.0), 0.5);
    EXPECT_DOUBLE_EQ(psi_value(cq, 1.0), (1.0 + std::exp(1.0)) / 4.0);
    EXPECT_THROW(rate(hb, 1.0, -0.1), std::invalid_argument);
}

TEST(Rates, DetailedBalanceIdentity) {
    // psi(u) = e^u psi(-u) for both built-in families
    for (const RateFamily& f : {RateFamily::heat_bath(), RateFamily::cosh_quarter()}) {
        for (int i = -40; i <= 40; ++i) {
            const double u = 0.1 * i;
            EXPECT_NEAR(psi_value(f, u), std::exp(u) * psi_value(f, -u),
                        1e-14 * std::max(1.0, psi_value(f, u)));
        }
    }
}

TEST(Rates, ValidationAcceptsBuiltinsRejectsNonMonotone) {
    RateFamily hb = RateFamily::heat_bath();
    RateFamily cq = RateFamily::cosh_quarter();
    EXPECT_TRUE(validate_rate_family(hb, 4.0));
    EXPECT_TRUE(validate_rate_family(cq, 4.0));
    RateFamily bad = RateFamily::custom([](double u) { return 1.0 + std::sin(3.0 * u); });
    EXPECT_FALSE(validate_rate_family(bad, 4.0));
    EXPECT_FALSE(bad.monotone_verified);
}

TEST(Generator, InfiniteTemperatureStructure) {
    // beta = 0: every rate is 1/2, diagonal n/2, constants are null
    const Lattice lat = build_lattice(1, {4}, BoundaryMode::periodic);
    const DisorderField omega = sample_disorder(lat, -1.0, 1.0, 3);
    const SparseOperator L = assemble_generator(lat, omega, 0.0, RateFamily::heat_bath());
    for (std::uint32_t a = 0; a < 16; ++a) {
        EXPECT_DOUBLE_EQ(L.coeff(a, a), 2.0);
        for (int x = 0; x < 4; ++x) EXPECT_DOUBLE_EQ(L.coeff(a, a ^ (1u << x)), -0.5);
    }
}

TEST(Generator, RowsAnnihilateConstants) {
    const Lattice lat = build_lattice(1, {6}, BoundaryMode::periodic);
    const DisorderField omega = sample_disorder(lat, -1.0, 1.0, 5);
    const SparseOperator L = assemble_generator(lat, omega, 0.3, RateFamily::heat_bath());
    const std::vector<double> ones(L.dim(), 1.0);
    for (double y : L.apply(ones)) EXPECT_NEAR(y, 0.0, 1e-13);
}

TEST(Generator, GibbsStationarityAndDetailedBalance) {
    const Lattice lat = build_lattice(1, {6}, BoundaryMode::periodic);
    const DisorderField omega = sample_disorder(lat, -1.0, 1.0, 5);
    const double beta = 0.3;
    const EnergyTable table = gibbs_table(omega, lat, beta);
    const SparseOperator L = assemble_generator(lat, omega, beta, RateFamily::heat_bath());
    // detailed balance: mu_a w(a -> a^x) = mu_{a^x} w(a^x -> a)
    for (std::uint32_t a = 0; a < 64; ++a)
        for (int x = 0; x < 6; ++x) {
            const std::uint32_t b = a ^ (1u << x);
            EXPECT_NEAR(table.gibbs[a] * (-L.coeff(a, b)), table.gibbs[b] * (-L.coeff(b, a)),
                        1e-14);
        }
    // stationarity: mu^T L = 0
    for (std::uint32_t g = 0; g < 64; ++g) {
        double s = table.gibbs[g] * L.coeff(g, g);
        for (int x = 0; x < 6; ++x) {
            const std::uint32_t a = g ^ (1u << x);
            s += table.gibbs[a] * L.coeff(a, g);
        }
        EXPECT_NEAR(s, 0.0, 1e-14);
    }
}

TEST(Generator, ComplementSymmetry) {
    const Lattice lat = build_lattice(2, {3, 3}, BoundaryMode::periodic);
    const DisorderField omega = sample_disorder(lat, -1.0, 1.0, 11);
    const SparseOperator L = assemble_generator(lat, omega, 0.25, RateFamily::heat_bath());
    EXPECT_LT(SparseOperator::max_abs_difference(L, conjugate_by_complement(L)), 1e-13);
}

TEST(Symmetrize, TwoConstructionPathsAgree) {
    for (const RateFamily& f : {RateFamily::heat_bath(), RateFamily::cosh_quarter()}) {
        const Lattice lat = build_lattice(1, {6}, BoundaryMode::periodic);
        const DisorderField omega = sample_disorder(lat, -1.0, 1.0, 7);
        const double beta = 0.35;
        const SparseOperator L = assemble_generator(lat, omega, beta, f);
        const SparseOperator sym = symmetrize(L, gibbs_table(omega, lat, beta));
        const SparseOperator direct = assemble_symmetrized_direct(lat, omega, beta, f);
        EXPECT_LT(SparseOperator::max_abs_difference(sym, direct), 1e-12);
        EXPECT_LT(sym.max_relative_asymmetry(), 1e-12);
    }
}

TEST(Symmetrize, SqrtGibbsIsNull) {
    const Lattice lat = build_lattice(1, {6}, BoundaryMode::periodic);
    const DisorderField omega = sample_disorder(lat, -1.0, 1.0, 9);
    const double beta = 0.4;
    const EnergyTable table = gibbs_table(omega, lat, beta);
    const SparseOperator sym =
        assemble_symmetrized_direct(lat, omega, beta, RateFamily::heat_bath());
    std::vector<double> root(table.dim());
    for (std::size_t a = 0; a < table.dim(); ++a) root[a] = std::sqrt(table.gibbs[a]);
    for (double y : sym.apply(root)) EXPECT_NEAR(y, 0.0, 1e-14);
}

TEST(Symmetrize, RejectsNonReversibleFamily) {
    const Lattice lat = build_lattice(1, {4}, BoundaryMode::periodic);
    const DisorderField omega = sample_disorder(lat, -1.0, 1.0, 13);
    const double beta = 0.5;
    const RateFamily broken = RateFamily::custom([](double) { return 1.0; });
    const SparseOperator L = assemble_generator(lat, omega, beta, broken);
    EXPECT_THROW(symmetrize(L, gibbs_table(omega, lat, beta)), std::invalid_argument);
}

TEST(BirthDeath, PartsRecombine) {
    const Lattice lat = build_lattice(1, {6}, BoundaryMode::periodic);
    const DisorderField omega = sample_disorder(lat, -1.0, 1.0, 15);
    const double beta = 0.3;
    const RateFamily f = RateFamily::heat_bath();
    const SparseOperator L = assemble_generator(lat, omega, beta, f);
    const BirthDeathParts p = birth_death_parts(lat, omega, beta, f);
    // L = d_minus + b_plus
    const StateVector v = random_vector(6, 44);
    const StateVector lv = L.apply(v);
    const StateVector dv = p.d_minus.apply(v);
    const StateVector bv = p.b_plus.apply(v);
    for (std::size_t a = 0; a < v.dim(); ++a)
        EXPECT_NEAR(lv.amp[a], dv.amp[a] + bv.amp[a], 1e-12);
}

TEST(BirthDeath, InvolutionSwapsRoles) {
    // conjugation by the complement maps d_plus to b_minus and b_plus to
    // d_minus (rates are complement symmetric without boundary terms)
    const Lattice lat = build_lattice(1, {6}, BoundaryMode::periodic);
    const DisorderField omega = sample_disorder(lat, -1.0, 1.0, 15);
    const BirthDeathParts p = birth_death_parts(lat, omega, 0.3, RateFamily::heat_bath());
    EXPECT_LT(SparseOperator::max_abs_difference(conjugate_by_complement(p.d_plus), p.b_minus),
              1e-13);
    EXPECT_LT(SparseOperator::max_abs_difference(conjugate_by_complement(p.b_plus), p.d_minus),
              1e-13);
}

TEST(HatGenerator, InternalCrossCheckAndInfiniteTemperature) {
    const Lattice lat = build_lattice(1, {6}, BoundaryMode::periodic);
    const DisorderField omega = sample_disorder(lat, -1.0, 1.0, 17);
    // the factorized and closed-form paths are cross-checked inside
    const SparseOperator hat0 = assemble_hat(lat, omega, 0.0);
    const SparseOperator tilde0 =
        assemble_symmetrized_direct(lat, omega, 0.0, RateFamily::heat_bath());
    // at beta = 0 both dynamics collapse to the same operator
    EXPECT_LT(SparseOperator::max_abs_difference(hat0, tilde0), 1e-14);
}

TEST(HatGenerator, ButterflyApplicationMatchesMatrix) {
    const Lattice lat = build_lattice(1, {6}, BoundaryMode::periodic);
    const DisorderField omega = sample_disorder(lat, -1.0, 1.0, 19);
    const double beta = 0.3;
    const SparseOperator hat = assemble_hat(lat, omega, beta);
    for (std::uint64_t key : {7ull, 8ull}) {
        const StateVector v = random_vector(6, key);
        const StateVector via_matrix = hat.apply(v);
        const StateVector via_butterfly = apply_hat_butterfly(lat, omega, beta, v);
        for (std::size_t a = 0; a < v.dim(); ++a)
            EXPECT_NEAR(via_matrix.amp[a], via_butterfly.amp[a], 1e-11);
    }
}

TEST(HatGenerator, CoshQuarterSymmetrizationIsHat) {
    // symmetrizing the cosh_quarter dynamics reproduces the hat matrix exactly
    const Lattice lat = build_lattice(1, {5}, BoundaryMode::periodic);
    const DisorderField omega = sample_disorder(lat, -1.0, 1.0, 21);
    const double beta = 0.3;
    const SparseOperator via_sym =
        assemble_symmetrized_direct(lat, omega, beta, RateFamily::cosh_quarter());
    const SparseOperator hat = assemble_hat(lat, omega, beta);
    EXPECT_LT(SparseOperator::max_abs_difference(via_sym, hat), 1e-12);
}
