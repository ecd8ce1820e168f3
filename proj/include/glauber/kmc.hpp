#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "glauber/dense_eigen.hpp"
#include "glauber/disorder.hpp"
#include "glauber/generator.hpp"
#include "glauber/hamiltonian.hpp"
#include "glauber/lattice.hpp"
#include "glauber/rng.hpp"
#include "glauber/state_space.hpp"

namespace glauber {

namespace detail {

// Complete binary tree of partial sums over per-site rates: O(log n) updates
// and O(log n) inverse-CDF sampling.
class RateTree {
public:
    explicit RateTree(int n) : n_(n) {
        leaves_ = 1;
        while (leaves_ < n) leaves_ <<= 1;
        tree_.assign(2 * leaves_, 0.0);
    }

    void set(int i, double r) {
        int k = leaves_ + i;
        tree_[k] = r;
        for (k >>= 1; k >= 1; k >>= 1) tree_[k] = tree_[2 * k] + tree_[2 * k + 1];
    }

    double total() const { return tree_[1]; }

    int sample(double u) const {  // u in [0, total)
        int k = 1;
        while (k < leaves_) {
            k <<= 1;
            if (u >= tree_[k]) {
                u -= tree_[k];
                ++k;
            }
        }
        return std::min(k - leaves_, n_ - 1);
    }

private:
    int n_;
    int leaves_;
    std::vector<double> tree_;
};

}  // namespace detail

struct KmcOptions {
    double t_max = 0.0;       // simulated time horizon (includes burn_in)
    double burn_in = 0.0;     // equilibration span excluded from observables
    std::uint64_t max_events = 0;  // 0 = no event cap
    std::uint64_t seed = 1;
    int tagged_site = 0;
    double dt = 0.0;          // sampling grid step; 0 = auto 0.1 / max rate
    bool record_events = false;
    bool record_magnetization = false;
};

struct Trajectory {
    SubsetState initial;
    double t_end = 0.0;
    double burn_in = 0.0;
    double dt = 0.0;
    std::uint64_t n_events = 0;
    std::vector<std::int8_t> tagged;       // tagged spin on the grid, after burn_in
    std::vector<float> magnetization;      // mean spin on the same grid (opt-in)
    std::vector<std::pair<double, int>> events;  // only when record_events
    std::vector<std::uint64_t> flips_per_site;
};

// Event-driven continuous-time Glauber dynamics: waiting times are
// exponential in the total rate, the flip site is drawn proportionally to
// its rate, and only the flipped site and its neighbours get rate updates.
inline Trajectory simulate(const Lattice& lat, const DisorderField& omega, double beta,
                           const RateFamily& family, const KmcOptions& opts) {
    const int n = lat.n_sites();
    if (opts.t_max <= opts.burn_in)
        throw std::invalid_argument("simulate: t_max must exceed burn_in");
    if (opts.burn_in < 0.0) throw std::invalid_argument("simulate: negative burn_in");

    rng::CounterStream stream(opts.seed);

    // random initial configuration
    std::uint32_t bits = 0;
    for (int x = 0; x < n; ++x)
        if (stream.next_unit() < 0.5) bits |= (1u << x);
    SubsetState state{bits, n};

    // monotone psi attains its extremes at the ends of the attainable
    // argument range [-4 d J beta, 4 d J beta]
    const double envelope = 4.0 * lat.dim * omega.coupling_scale() * beta;
    const double max_rate =
        std::max(psi_value(family, -envelope), psi_value(family, envelope));
    const double dt = opts.dt > 0.0 ? opts.dt : 0.1 / max_rate;

    detail::RateTree rates(n);
    for (int x = 0; x < n; ++x)
        rates.set(x, ::glauber::rate(family, flip_delta(state, x, omega, lat), beta));

    Trajectory traj;
    traj.initial = state;
    traj.burn_in = opts.burn_in;
    traj.dt = dt;
    traj.flips_per_site.assign(n, 0);
    const std::size_t n_samples =
        static_cast<std::size_t>(std::floor((opts.t_max - opts.burn_in) / dt)) + 1;
    traj.tagged.reserve(n_samples);
    if (opts.record_magnetization) traj.magnetization.reserve(n_samples);

    double t = 0.0;
    std::size_t next_sample = 0;  // index of the next grid point to fill
    auto sample_until = [&](double t_now) {
        while (next_sample < n_samples && opts.burn_in + next_sample * dt <= t_now) {
            traj.tagged.push_back(static_cast<std::int8_t>(state.spin(opts.tagged_site)));
            if (opts.record_magnetization)
                traj.magnetization.push_back(
                    static_cast<float>((2.0 * state.particles() - n) / n));
            ++next_sample;
        }
    };

    while (t < opts.t_max && (opts.max_events == 0 || traj.n_events < opts.max_events)) {
        const double total = rates.total();
        if (!(total > 0.0)) throw std::logic_error("simulate: total rate vanished");
        const double wait = stream.next_exponential(total);
        const double t_next = t + wait;
        sample_until(std::min(t_next, opts.t_max));
        if (t_next >= opts.t_max) {
            t = opts.t_max;
            break;
        }
        t = t_next;
        const int x = rates.sample(stream.next_unit() * total);
        state = state.flipped(x);
        ++traj.flips_per_site[x];
        ++traj.n_events;
        if (opts.record_events) traj.events.emplace_back(t, x);
        rates.set(x, ::glauber::rate(family, flip_delta(state, x, omega, lat), beta));
        for (const auto& [bond_idx, y] : lat.adjacency()[x])
            rates.set(y, ::glauber::rate(family, flip_delta(state, y, omega, lat), beta));
    }
    sample_until(t);
    traj.t_end = t;
    return traj;
}

struct GapEstimate {
    double rate = 0.0;        // fitted exponential decay rate of C(t)
    double stderr_boot = 0.0; // bootstrap standard error over blocks
    double window_lo = 0.0;   // fit window in time units
    double window_hi = 0.0;
    double fit_residual = 0.0;  // rms residual of the log-linear fit
    std::size_t n_lags = 0;
};

namespace detail {

// least-squares slope of log c over lags [lo, hi]; returns {-slope, rms}
inline std::pair<double, double> log_linear_rate(const std::vector<double>& c, std::size_t lo,
                                                 std::size_t hi, double dt) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t k = lo; k <= hi; ++k) {
        if (c[k] <= 0.0) continue;
        const double x = k * dt, y = std::log(c[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 3) throw std::runtime_error("autocorrelation fit: too few usable lags");
    const double denom = m * sxx - sx * sx;
    const double slope = (m * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / m;
    double rss = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) {
        if (c[k] <= 0.0) continue;
        const double r = std::log(c[k]) - (intercept + slope * k * dt);
        rss += r * r;
    }
    return {-slope, std::sqrt(rss / m)};
}

}  // namespace detail

// Decay rate of the tagged-spin autocorrelation, fitted on the window where
// C(t)/C(0) lies in [0.05, 0.5]. The estimate targets the smallest eigenvalue
// with nonzero overlap on the tagged spin, which can exceed the true gap.
inline GapEstimate autocorrelation_gap(const Trajectory& traj, int n_blocks = 16,
                                       int n_boot = 200, std::uint64_t boot_seed = 777) {
    const std::vector<std::int8_t>& s = traj.tagged;
    const std::size_t m = s.size();
    if (m < 1000) throw std::invalid_argument("autocorrelation_gap: trajectory too short");

    // per-block autocovariance curves; bootstrap resamples whole blocks
    const std::size_t block_len = m / n_blocks;

    double mean = 0.0;
    for (std::int8_t v : s) mean += v;
    mean /= m;

    // probe the global curve lag by lag to find how far the fit window
    // reaches; computing thousands of unused lags dominates cost otherwise
    std::size_t max_lag = 0;
    {
        const std::size_t lag_cap = std::min<std::size_t>(block_len / 2, 4000);
        double c0 = 0.0;
        for (std::size_t i = 0; i < m; ++i) c0 += (s[i] - mean) * (s[i] - mean);
        c0 /= m;
        if (c0 <= 0.0) throw std::runtime_error("autocorrelation_gap: zero variance");
        for (std::size_t lag = 1; lag <= lag_cap; ++lag) {
            double acc = 0.0;
            for (std::size_t i = 0; i + lag < m; ++i) acc += (s[i] - mean) * (s[i + lag] - mean);
            acc /= (m - lag);
            max_lag = lag;
            if (acc < 0.03 * c0) break;  // margin below the 0.05 window edge
        }
        max_lag = std::min(max_lag + max_lag / 4 + 2, lag_cap);
    }

    std::vector<std::vector<double>> block_cov(n_blocks, std::vector<double>(max_lag + 1, 0.0));
    for (int b = 0; b < n_blocks; ++b) {
        const std::size_t off = b * block_len;
        for (std::size_t lag = 0; lag <= max_lag; ++lag) {
            double acc = 0.0;
            const std::size_t cnt = block_len - lag;
            for (std::size_t i = 0; i < cnt; ++i)
                acc += (s[off + i] - mean) * (s[off + i + lag] - mean);
            block_cov[b][lag] = acc / cnt;
        }
    }

    auto fit_curve = [&](const std::vector<double>& c) {
        const double c0 = c[0];
        if (c0 <= 0.0) throw std::runtime_error("autocorrelation_gap: zero variance");
        std::size_t lo = max_lag + 1, hi = 0;
        for (std::size_t k = 1; k <= max_lag; ++k) {
            const double rel = c[k] / c0;
            if (rel <= 0.5 && lo > max_lag) lo = k;
            if (rel < 0.05) {
                hi = k;
                break;
            }
        }
        if (lo > max_lag || hi <= lo)
            throw std::runtime_error(
                "autocorrelation_gap: correlation did not decay through the fit window");
        return std::make_tuple(detail::log_linear_rate(c, lo, hi, traj.dt), lo, hi);
    };

    std::vector<double> mean_cov(max_lag + 1, 0.0);
    for (int b = 0; b < n_blocks; ++b)
        for (std::size_t k = 0; k <= max_lag; ++k) mean_cov[k] += block_cov[b][k] / n_blocks;
    auto [rate_res, lo, hi] = fit_curve(mean_cov);

    rng::CounterStream boot(boot_seed);
    std::vector<double> boot_rates;
    boot_rates.reserve(n_boot);
    std::vector<double> resampled(max_lag + 1);
    for (int r = 0; r < n_boot; ++r) {
        std::fill(resampled.begin(), resampled.end(), 0.0);
        for (int b = 0; b < n_blocks; ++b) {
            const int pick = std::min<int>(static_cast<int>(boot.next_unit() * n_blocks),
                                           n_blocks - 1);
            for (std::size_t k = 0; k <= max_lag; ++k)
                resampled[k] += block_cov[pick][k] / n_blocks;
        }
        try {
            boot_rates.push_back(std::get<0>(std::get<0>(fit_curve(resampled))));
        } catch (const std::runtime_error&) {
            // degenerate resample; skip
        }
    }
    double se = 0.0;
    if (boot_rates.size() > 2) {
        double bm = 0.0;
        for (double v : boot_rates) bm += v;
        bm /= boot_rates.size();
        for (double v : boot_rates) se += (v - bm) * (v - bm);
        se = std::sqrt(se / (boot_rates.size() - 1));
    }

    GapEstimate est;
    est.rate = rate_res.first;
    est.fit_residual = rate_res.second;
    est.stderr_boot = se;
    est.window_lo = lo * traj.dt;
    est.window_hi = hi * traj.dt;
    est.n_lags = hi - lo + 1;
    if (!(est.rate > 0.0)) throw std::runtime_error("autocorrelation_gap: non-positive rate");
    return est;
}

struct SpectralReference {
    double windowed_rate = 0.0;     // exact C(t) put through the same windowed fit
    double smallest_overlap = 0.0;  // smallest eigenvalue with nonzero overlap on the spin
    std::vector<std::pair<double, double>> modes;  // (eigenvalue, weight), weight > 1e-6
};

// The spectral quantity the autocorrelation estimator targets. The tagged
// spin overlaps several band eigenvalues, so C(t) is a multi-mode mixture and
// its [0.05, 0.5] windowed log-slope differs from any single eigenvalue; the
// honest dense-diagonalization reference applies the identical fit to the
// exact C(t) = sum_k w_k e^{-lambda_k t}.
inline SpectralReference spectral_autocorrelation_reference(const Lattice& lat,
                                                            const DisorderField& omega,
                                                            double beta,
                                                            const RateFamily& family,
                                                            int tagged_site, double dt) {
    check_enumeration_cap(lat, 12);
    const int n = lat.n_sites();
    const std::size_t dim = std::size_t{1} << n;
    const EnergyTable table = gibbs_table(omega, lat, beta);
    SparseOperator sym;
    {
        const SparseOperator gen = assemble_generator(lat, omega, beta, family);
        sym = symmetrize(gen, table);
    }
    std::vector<double> flat(dim * dim, 0.0);
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t k = sym.row_ptr()[r]; k < sym.row_ptr()[r + 1]; ++k)
            flat[r * dim + sym.cols()[k]] = sym.values()[k];
    const SymmetricEigenResult eig = symmetric_eigen(std::move(flat), dim, true);

    std::vector<double> f(dim);
    double fnorm = 0.0;
    for (std::size_t a = 0; a < dim; ++a) {
        f[a] = std::sqrt(table.gibbs[a]) *
               SubsetState{static_cast<std::uint32_t>(a), n}.spin(tagged_site);
        fnorm += f[a] * f[a];
    }
    SpectralReference ref;
    std::vector<std::pair<double, double>> modes;
    for (std::size_t k = 1; k < dim; ++k) {  // k = 0 is the mean (ground state)
        double ov = 0.0;
        for (std::size_t a = 0; a < dim; ++a) ov += f[a] * eig.vectors[a * dim + k];
        const double w = ov * ov / fnorm;
        if (w > 1e-12 && ref.smallest_overlap == 0.0) ref.smallest_overlap = eig.eigenvalues[k];
        if (w > 1e-6) {
            modes.emplace_back(eig.eigenvalues[k], w);
            if (modes.size() <= 64) ref.modes.push_back(modes.back());
        }
    }
    auto c_exact = [&modes](double t) {
        double s = 0.0;
        for (const auto& [l, w] : modes) s += w * std::exp(-l * t);
        return s;
    };
    const double c0 = c_exact(0.0);
    std::size_t lo = 0, hi = 0;
    for (std::size_t k = 1; k < 100000; ++k) {
        const double rel = c_exact(k * dt) / c0;
        if (rel <= 0.5 && lo == 0) lo = k;
        if (rel < 0.05) {
            hi = k;
            break;
        }
    }
    if (lo == 0 || hi <= lo)
        throw std::runtime_error("spectral_autocorrelation_reference: degenerate window");
    std::vector<double> curve(hi + 1);
    for (std::size_t k = 0; k <= hi; ++k) curve[k] = c_exact(k * dt);
    ref.windowed_rate = detail::log_linear_rate(curve, lo, hi, dt).first;
    return ref;
}

struct GapUpperBound {
    double bound = 0.0;
    bool available = false;  // false when the susceptibility denominator <= 0
    double numerator = 0.0;       // 2 E_mu[sum_x w_x]
    double susceptibility = 0.0;  // sum_{x,y} [mu(s_x s_y) - mu(s_x) mu(s_y)]
};

// Exact susceptibility-based upper bound on the spectral gap:
// 2 E_mu[sum_x w_x] / sum_{x,y} cov_mu(s_x, s_y), from full enumeration.
inline GapUpperBound gap_upper_bound_exact(const Lattice& lat, const DisorderField& omega,
                                           double beta, const RateFamily& family) {
    check_enumeration_cap(lat, 16);
    const int n = lat.n_sites();
    const std::size_t dim = std::size_t{1} << n;
    const EnergyTable table = gibbs_table(omega, lat, beta);

    double mean_total_rate = 0.0;
    std::vector<double> mean_spin(n, 0.0);
    std::vector<double> corr(std::size_t(n) * n, 0.0);
    for (std::size_t a = 0; a < dim; ++a) {
        const SubsetState alpha{static_cast<std::uint32_t>(a), n};
        const double mu = table.gibbs[a];
        double wsum = 0.0;
        for (int x = 0; x < n; ++x)
            wsum += ::glauber::rate(family, flip_delta(alpha, x, omega, lat), beta);
        mean_total_rate += mu * wsum;
        for (int x = 0; x < n; ++x) {
            const int sx = alpha.spin(x);
            mean_spin[x] += mu * sx;
            for (int y = 0; y < n; ++y) corr[std::size_t(x) * n + y] += mu * sx * alpha.spin(y);
        }
    }
    GapUpperBound out;
    out.numerator = 2.0 * mean_total_rate;
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            out.susceptibility += corr[std::size_t(x) * n + y] - mean_spin[x] * mean_spin[y];
    if (out.susceptibility > 0.0) {
        out.bound = out.numerator / out.susceptibility;
        out.available = true;
    }
    return out;
}

}  // namespace glauber
