#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "glauber/kmc.hpp"
#include "glauber/spectral.hpp"

using namespace glauber;

TEST(Kmc, DeterministicReplay) {
    const Lattice lat = build_lattice(1, {6}, BoundaryMode::periodic);
    const DisorderField omega = sample_disorder(lat, -1.0, 1.0, 3);
    KmcOptions opts;
    opts.t_max = 200.0;
    opts.burn_in = 10.0;
    opts.seed = 99;
    const Trajectory a = simulate(lat, omega, 0.2, RateFamily::heat_bath(), opts);
    const Trajectory b = simulate(lat, omega, 0.2, RateFamily::heat_bath(), opts);
    EXPECT_EQ(a.n_events, b.n_events);
    ASSERT_EQ(a.tagged.size(), b.tagged.size());
    for (std::size_t i = 0; i < a.tagged.size(); ++i) EXPECT_EQ(a.tagged[i], b.tagged[i]);
    EXPECT_EQ(a.initial.bits, b.initial.bits);
}

TEST(Kmc, BookkeepingInvariants) {
    const Lattice lat = build_lattice(1, {6}, BoundaryMode::periodic);
    const DisorderField omega = sample_disorder(lat, -1.0, 1.0, 5);
    KmcOptions opts;
    opts.t_max = 500.0;
    opts.burn_in = 0.0;
    opts.seed = 7;
    opts.record_events = true;
    opts.record_magnetization = true;
    const Trajectory traj = simulate(lat, omega, 0.1, RateFamily::heat_bath(), opts);
    // flip counts add up to the event count
    std::uint64_t total = 0;
    for (std::uint64_t f : traj.flips_per_site) total += f;
    EXPECT_EQ(total, traj.n_events);
    EXPECT_EQ(traj.events.size(), traj.n_events);
    // event times strictly increasing and below the horizon
    for (std::size_t i = 1; i < traj.events.size(); ++i)
        EXPECT_GT(traj.events[i].first, traj.events[i - 1].first);
    EXPECT_LT(traj.events.back().first, 500.0);
    EXPECT_EQ(traj.magnetization.size(), traj.tagged.size());
    // auto grid step is 0.1 / max rate
    const double envelope = 4.0 * 1 * omega.coupling_scale() * 0.1;
    const double max_rate = psi_value(RateFamily::heat_bath(), envelope);
    EXPECT_NEAR(traj.dt, 0.1 / max_rate, 1e-12);
}

TEST(Kmc, RejectsBadHorizon) {
    const Lattice lat = build_lattice(1, {4}, BoundaryMode::periodic);
    const DisorderField omega = sample_disorder(lat, -1.0, 1.0, 3);
    KmcOptions opts;
    opts.t_max = 1.0;
    opts.burn_in = 2.0;
    EXPECT_THROW(simulate(lat, omega, 0.1, RateFamily::heat_bath(), opts),
                 std::invalid_argument);
}

TEST(Kmc, InfiniteTemperatureFlipsAreUniform) {
    // beta = 0: every site flips at rate 1/2, so flip counts are
    // binomial(N, 1/n) per site
    const Lattice lat = build_lattice(1, {6}, BoundaryMode::periodic);
    const DisorderField omega = sample_disorder(lat, -1.0, 1.0, 11);
    KmcOptions opts;
    opts.t_max = 80000.0;
    opts.max_events = 200000;
    opts.seed = 13;
    const Trajectory traj = simulate(lat, omega, 0.0, RateFamily::heat_bath(), opts);
    const double N = static_cast<double>(traj.n_events);
    ASSERT_GT(N, 100000.0);
    const double p = 1.0 / 6.0;
    const double sigma = std::sqrt(N * p * (1.0 - p));
    for (std::uint64_t f : traj.flips_per_site)
        EXPECT_LE(std::fabs(static_cast<double>(f) - N * p), 4.0 * sigma);
}

TEST(Kmc, OccupationTimesMatchGibbs) {
    // replay the event list into state occupation times; total-variation
    // distance to the exact Gibbs measure must be small
    const Lattice lat = build_lattice(1, {5}, BoundaryMode::periodic);
    const DisorderField omega = sample_disorder(lat, -1.0, 1.0, 17);
    const double beta = 0.3;
    KmcOptions opts;
    opts.t_max = 400000.0;
    opts.burn_in = 1000.0;
    opts.seed = 19;
    opts.record_events = true;
    const Trajectory traj = simulate(lat, omega, beta, RateFamily::heat_bath(), opts);
    std::vector<double> occupation(32, 0.0);
    SubsetState state = traj.initial;
    double t_prev = 0.0;
    for (const auto& [t, x] : traj.events) {
        if (t > traj.burn_in)
            occupation[state.bits] += t - std::max(t_prev, traj.burn_in);
        state = state.flipped(x);
        t_prev = t;
    }
    occupation[state.bits] += traj.t_end - std::max(t_prev, traj.burn_in);
    double total = 0.0;
    for (double o : occupation) total += o;
    const EnergyTable table = gibbs_table(omega, lat, beta);
    double tv = 0.0;
    for (std::size_t a = 0; a < 32; ++a)
        tv += 0.5 * std::fabs(occupation[a] / total - table.gibbs[a]);
    EXPECT_LT(tv, 0.02);
}

TEST(Kmc, SingleSiteRelaxationRateIsOne) {
    // one free spin flips at rate 1/2 in both directions: the tagged-spin
    // autocorrelation decays at rate exactly 1
    const Lattice lat = build_lattice(1, {1}, BoundaryMode::free_bc);
    const DisorderField omega = constant_disorder(lat, 0.0);
    KmcOptions opts;
    opts.t_max = 400000.0;
    opts.burn_in = 10.0;
    opts.seed = 23;
    const Trajectory traj = simulate(lat, omega, 0.0, RateFamily::heat_bath(), opts);
    const GapEstimate est = autocorrelation_gap(traj);
    EXPECT_NEAR(est.rate, 1.0, 0.05);
    EXPECT_GT(est.n_lags, 2u);
}

TEST(Kmc, EstimatorTracksSpectralReference) {
    const Lattice lat = build_lattice(1, {6}, BoundaryMode::periodic);
    const DisorderField omega = sample_disorder(lat, -1.0, 1.0, 29);
    const double beta = 0.15;
    KmcOptions opts;
    opts.t_max = 1.0e6;
    opts.burn_in = 1000.0;
    opts.seed = 31;
    const Trajectory traj = simulate(lat, omega, beta, RateFamily::heat_bath(), opts);
    const GapEstimate est = autocorrelation_gap(traj);
    const SpectralReference ref = spectral_autocorrelation_reference(
        lat, omega, beta, RateFamily::heat_bath(), opts.tagged_site, traj.dt);
    EXPECT_GT(ref.windowed_rate, 0.0);
    EXPECT_NEAR(est.rate, ref.windowed_rate, 0.1 * ref.windowed_rate);
}

TEST(SpectralReference, InfiniteTemperatureIsExactlyOne) {
    // at beta = 0 the tagged spin is a single eigenmode at eigenvalue 1
    const Lattice lat = build_lattice(1, {5}, BoundaryMode::periodic);
    const DisorderField omega = sample_disorder(lat, -1.0, 1.0, 37);
    const SpectralReference ref = spectral_autocorrelation_reference(
        lat, omega, 0.0, RateFamily::heat_bath(), 2, 0.2);
    EXPECT_NEAR(ref.windowed_rate, 1.0, 1e-8);
    EXPECT_NEAR(ref.smallest_overlap, 1.0, 1e-10);
    // eigenvalue 1 is n-fold degenerate at beta = 0, so the overlap may be
    // split across several degenerate eigenvectors; all modes must sit at 1
    // and carry the full weight
    double weight = 0.0;
    for (const auto& [lambda, w] : ref.modes) {
        EXPECT_NEAR(lambda, 1.0, 1e-10);
        weight += w;
    }
    EXPECT_NEAR(weight, 1.0, 1e-9);
}

TEST(GapBound, ExactAtInfiniteTemperature) {
    // beta = 0: numerator n, susceptibility n, gap = bound = 1
    const Lattice lat = build_lattice(1, {6}, BoundaryMode::periodic);
    const DisorderField omega = sample_disorder(lat, -1.0, 1.0, 41);
    const GapUpperBound b = gap_upper_bound_exact(lat, omega, 0.0, RateFamily::heat_bath());
    ASSERT_TRUE(b.available);
    EXPECT_NEAR(b.numerator, 6.0, 1e-12);
    EXPECT_NEAR(b.susceptibility, 6.0, 1e-12);
    EXPECT_NEAR(b.bound, 1.0, 1e-12);
}

TEST(GapBound, DominatesTheTrueGap) {
    const Lattice lat = build_lattice(1, {6}, BoundaryMode::periodic);
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const DisorderField omega = sample_disorder(lat, 0.5, 1.0, seed);
        for (double beta : {0.1, 0.2}) {
            const SparseOperator sym =
                assemble_symmetrized_direct(lat, omega, beta, RateFamily::heat_bath());
            const SpectrumResult s = dense_spectrum(sym);
            const double gap = s.eigenvalues[1] - s.eigenvalues[0];
            const GapUpperBound b =
                gap_upper_bound_exact(lat, omega, beta, RateFamily::heat_bath());
            ASSERT_TRUE(b.available);
            EXPECT_LE(gap, b.bound * (1.0 + 1e-10));
        }
    }
}
