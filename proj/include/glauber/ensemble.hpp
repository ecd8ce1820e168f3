#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "glauber/disorder.hpp"
#include "glauber/forms.hpp"
#include "glauber/generator.hpp"
#include "glauber/hamiltonian.hpp"
#include "glauber/kmc.hpp"
#include "glauber/lanczos.hpp"
#include "glauber/lattice.hpp"
#include "glauber/perturbation.hpp"
#include "glauber/rng.hpp"
#include "glauber/spectral.hpp"

namespace glauber {

enum class Experiment { band_check, band_union, perturbation_scaling, form_audit, mc_gap,
                        gap_bound };

inline const char* to_string(Experiment e) {
    switch (e) {
        case Experiment::band_check: return "band_check";
        case Experiment::band_union: return "band_union";
        case Experiment::perturbation_scaling: return "perturbation_scaling";
        case Experiment::form_audit: return "form_audit";
        case Experiment::mc_gap: return "mc_gap";
        case Experiment::gap_bound: return "gap_bound";
    }
    return "?";
}

inline Experiment experiment_from_string(const std::string& s) {
    if (s == "band_check") return Experiment::band_check;
    if (s == "band_union") return Experiment::band_union;
    if (s == "perturbation_scaling") return Experiment::perturbation_scaling;
    if (s == "form_audit") return Experiment::form_audit;
    if (s == "mc_gap") return Experiment::mc_gap;
    if (s == "gap_bound") return Experiment::gap_bound;
    throw std::invalid_argument("unknown experiment: " + s);
}

struct RunConfig {
    Experiment experiment = Experiment::band_check;
    int d = 1;
    std::vector<int> lengths = {8};
    BoundaryMode bc = BoundaryMode::periodic;
    double j_minus = -1.0;
    double j_plus = 1.0;
    int n_realizations = 50;
    std::uint64_t base_seed = 1;
    std::vector<double> betas = {0.02};
    std::string solver = "auto";  // auto | dense | lanczos
    std::string rate_family = "heat_bath";
    std::string output_dir;      // empty = no files
    double margin_coeff = 10.0;  // band tolerance envelope margin_coeff * beta^2
    int violation_threshold = 0;
    // mc_gap parameters
    std::uint64_t max_events = 1000000;
    int replicas = 8;
    double t_max = 0.0;    // 0 = derive from max_events
    double burn_in = 0.0;  // 0 = auto 5% of horizon
    double dt = 0.0;
    int tagged_site = 0;
    // form_audit parameters
    int n_vectors = 1000;

    RateFamily family() const {
        if (rate_family == "heat_bath") return RateFamily::heat_bath();
        if (rate_family == "cosh_quarter") return RateFamily::cosh_quarter();
        throw std::invalid_argument("unknown rate family: " + rate_family);
    }

    void validate() const {
        if (d < 1) throw std::invalid_argument("config: d must be >= 1");
        if (static_cast<int>(lengths.size()) != d)
            throw std::invalid_argument("config: lengths/d mismatch");
        if (j_minus > j_plus) throw std::invalid_argument("config: j_minus > j_plus");
        if (n_realizations < 1) throw std::invalid_argument("config: n_realizations < 1");
        if (betas.empty()) throw std::invalid_argument("config: empty beta list");
        for (double b : betas)
            if (b < 0.0) throw std::invalid_argument("config: negative beta");
        if (solver != "auto" && solver != "dense" && solver != "lanczos")
            throw std::invalid_argument("config: unknown solver " + solver);
        family();  // validates rate_family
    }
};

inline nlohmann::json to_json(const RunConfig& c) {
    return {{"experiment", to_string(c.experiment)},
            {"d", c.d},
            {"lengths", c.lengths},
            {"bc", to_string(c.bc)},
            {"j_minus", c.j_minus},
            {"j_plus", c.j_plus},
            {"n_realizations", c.n_realizations},
            {"base_seed", c.base_seed},
            {"betas", c.betas},
            {"solver", c.solver},
            {"rate_family", c.rate_family},
            {"margin_coeff", c.margin_coeff},
            {"violation_threshold", c.violation_threshold},
            {"max_events", c.max_events},
            {"replicas", c.replicas},
            {"t_max", c.t_max},
            {"burn_in", c.burn_in},
            {"dt", c.dt},
            {"tagged_site", c.tagged_site},
            {"n_vectors", c.n_vectors}};
}

struct RealizationRecord {
    int index = 0;
    std::uint64_t seed = 0;
    double beta = 0.0;
    BandReport band;
    double bound_lo = 0.0;  // applied acceptance interval
    double bound_hi = 0.0;
    bool violated = false;
    std::string method;
    std::string error;  // non-empty when the stage failed
    nlohmann::json extra;  // experiment-specific payload
};

struct EnsembleReport {
    RunConfig config;
    std::vector<RealizationRecord> records;
    double union_min = 0.0;
    double union_max = 0.0;
    int bound_violations = 0;
    int failures = 0;
    double hausdorff_stability = -1.0;  // band_union only
    bool passed = false;
};

// One realization pipeline: sample -> assemble -> symmetrize -> solve ->
// extract band. Solver choice: dense up to 2^10, Lanczos (n+2 lowest) above.
inline BandReport band_for_realization(const Lattice& lat, const DisorderField& omega,
                                       double beta, const RateFamily& family,
                                       const std::string& solver, std::string* method_out) {
    const int n = lat.n_sites();
    const EnergyTable table = gibbs_table(omega, lat, beta);
    const SparseOperator sym = symmetrize(assemble_generator(lat, omega, beta, family), table);
    const bool dense = solver == "dense" || (solver == "auto" && sym.dim() <= 1024);
    if (dense) {
        SpectrumResult spec = dense_spectrum(sym);
        if (method_out) *method_out = spec.method;
        return extract_band(spec.eigenvalues, n);
    }
    LanczosParams params;
    params.seed = 0x1234abcdu;
    LanczosReport rep = lanczos_lowest(sym, n + 2, params);
    if (method_out) *method_out = "lanczos";
    return extract_band(rep.eigenvalues, n);
}

namespace detail {

inline void union_stats(EnsembleReport& report) {
    bool first = true;
    for (const auto& r : report.records) {
        if (!r.error.empty() || r.band.band.empty()) continue;
        if (first || r.band.band_min < report.union_min) report.union_min = r.band.band_min;
        if (first || r.band.band_max > report.union_max) report.union_max = r.band.band_max;
        first = false;
    }
}

}  // namespace detail

// Band inclusion sweep: every band eigenvalue must lie inside
// [1 - 2 d J beta - margin_coeff beta^2, 1 + 2 d J beta + margin_coeff beta^2].
inline EnsembleReport run_band_check(const RunConfig& config) {
    config.validate();
    EnsembleReport report;
    report.config = config;
    const Lattice lat = build_lattice(config.d, config.lengths, config.bc);
    const RateFamily family = config.family();
    for (double beta : config.betas) {
        for (int i = 0; i < config.n_realizations; ++i) {
            RealizationRecord rec;
            rec.index = i;
            rec.beta = beta;
            rec.seed = rng::derive(config.base_seed, static_cast<std::uint64_t>(i));
            try {
                const DisorderField omega =
                    sample_disorder(lat, config.j_minus, config.j_plus, rec.seed);
                rec.band = band_for_realization(lat, omega, beta, family, config.solver,
                                                &rec.method);
                const double j = omega.coupling_scale();
                const double margin = config.margin_coeff * beta * beta;
                rec.bound_lo = 1.0 - 2.0 * config.d * j * beta - margin;
                rec.bound_hi = 1.0 + 2.0 * config.d * j * beta + margin;
                rec.violated = rec.band.band_min < rec.bound_lo ||
                               rec.band.band_max > rec.bound_hi;
                if (rec.violated) ++report.bound_violations;
            } catch (const std::exception& e) {
                rec.error = e.what();
                ++report.failures;
            }
            report.records.push_back(std::move(rec));
        }
    }
    detail::union_stats(report);
    report.passed =
        report.failures == 0 && report.bound_violations <= config.violation_threshold;
    return report;
}

// Non-randomness proxy: two independent ensembles; the Hausdorff distance
// between their union bands (as intervals) must be a small fraction of the
// first-order band width.
inline EnsembleReport run_band_union(const RunConfig& config) {
    config.validate();
    if (config.betas.size() != 1)
        throw std::invalid_argument("band_union: exactly one beta required");
    EnsembleReport report;
    report.config = config;
    const Lattice lat = build_lattice(config.d, config.lengths, config.bc);
    const RateFamily family = config.family();
    const double beta = config.betas.front();
    double mins[2], maxs[2];
    for (int half = 0; half < 2; ++half) {
        const std::uint64_t ensemble_seed = config.base_seed + half;
        bool first = true;
        for (int i = 0; i < config.n_realizations; ++i) {
            RealizationRecord rec;
            rec.index = half * config.n_realizations + i;
            rec.beta = beta;
            rec.seed = rng::derive(ensemble_seed, static_cast<std::uint64_t>(i));
            try {
                const DisorderField omega =
                    sample_disorder(lat, config.j_minus, config.j_plus, rec.seed);
                rec.band = band_for_realization(lat, omega, beta, family, config.solver,
                                                &rec.method);
                rec.extra["ensemble"] = half;
                if (first || rec.band.band_min < mins[half]) mins[half] = rec.band.band_min;
                if (first || rec.band.band_max > maxs[half]) maxs[half] = rec.band.band_max;
                first = false;
            } catch (const std::exception& e) {
                rec.error = e.what();
                ++report.failures;
            }
            report.records.push_back(std::move(rec));
        }
    }
    detail::union_stats(report);
    report.hausdorff_stability =
        std::max(std::fabs(mins[0] - mins[1]), std::fabs(maxs[0] - maxs[1]));
    const double j = std::max(std::fabs(config.j_minus), std::fabs(config.j_plus));
    const double band_width = 2.0 * 2.0 * config.d * j * beta;
    report.passed = report.failures == 0 &&
                    report.hausdorff_stability <= 0.01 * band_width;
    return report;
}

// First-order accuracy: deviation(beta) = max_i |band_i - (1 + beta theta_i)|
// should scale as beta^2 (Richardson ratio dev(2 beta)/dev(beta) near 4).
inline EnsembleReport run_perturbation_scaling(const RunConfig& config) {
    config.validate();
    if (config.betas.size() != 1)
        throw std::invalid_argument("perturbation_scaling: exactly one (base) beta required");
    EnsembleReport report;
    report.config = config;
    const Lattice lat = build_lattice(config.d, config.lengths, config.bc);
    const RateFamily family = config.family();
    const double beta = config.betas.front();
    int in_window = 0, usable = 0;
    for (int i = 0; i < config.n_realizations; ++i) {
        RealizationRecord rec;
        rec.index = i;
        rec.beta = beta;
        rec.seed = rng::derive(config.base_seed, static_cast<std::uint64_t>(i));
        try {
            const DisorderField omega =
                sample_disorder(lat, config.j_minus, config.j_plus, rec.seed);
            const OneParticleMatrix t1 = first_order_matrix(lat, omega);
            auto deviation = [&](double b) {
                const BandReport band =
                    band_for_realization(lat, omega, b, family, config.solver, nullptr);
                const std::vector<double> pred = predicted_band(b, t1);
                double worst = 0.0;
                for (std::size_t k = 0; k < pred.size(); ++k)
                    worst = std::max(worst, std::fabs(band.band[k] - pred[k]));
                return worst;
            };
            const double dev1 = deviation(beta);
            const double dev2 = deviation(2.0 * beta);
            rec.band = band_for_realization(lat, omega, beta, family, config.solver,
                                            &rec.method);
            const double ratio = dev2 / dev1;
            rec.extra = {{"deviation", dev1},
                         {"deviation_2beta", dev2},
                         {"richardson_ratio", ratio}};
            ++usable;
            if (ratio >= 3.0 && ratio <= 5.0) ++in_window;
            rec.violated = !(ratio >= 3.0 && ratio <= 5.0);
            if (rec.violated) ++report.bound_violations;
        } catch (const std::exception& e) {
            rec.error = e.what();
            ++report.failures;
        }
        report.records.push_back(std::move(rec));
    }
    detail::union_stats(report);
    report.passed = report.failures == 0 && usable > 0 &&
                    in_window >= static_cast<int>(std::ceil(0.9 * usable));
    return report;
}

// Quadratic-form audit: comparison lemma on parity-projected vectors,
// relative bounds, tilde <= hat domination, form/matrix equality.
inline EnsembleReport run_form_audit(const RunConfig& config) {
    config.validate();
    EnsembleReport report;
    report.config = config;
    const Lattice lat = build_lattice(config.d, config.lengths, config.bc);
    const int n = lat.n_sites();
    for (double beta : config.betas) {
        for (int i = 0; i < config.n_realizations; ++i) {
            RealizationRecord rec;
            rec.index = i;
            rec.beta = beta;
            rec.seed = rng::derive(config.base_seed, static_cast<std::uint64_t>(i));
            try {
                const DisorderField omega =
                    sample_disorder(lat, config.j_minus, config.j_plus, rec.seed);
                const EnergyTable table = gibbs_table(omega, lat, beta);
                const SparseOperator sym = symmetrize(
                    assemble_generator(lat, omega, beta, RateFamily::heat_bath()), table);
                const SparseOperator hat = assemble_hat(lat, omega, beta);
                rng::CounterStream vecs(rng::derive(rec.seed, 0xf00d));
                int lemma_fail = 0, rb_fail = 0, dom_fail = 0, eq_fail = 0;
                for (int v = 0; v < config.n_vectors; ++v) {
                    StateVector u = StateVector::zeros(n);
                    for (auto& a : u.amp) a = vecs.next_normal();
                    // parity-project for the lemma
                    StateVector up = sector_split(u, SectorMode::parity_E)[v % 2];
                    if (up.norm() > 1e-12 && !check_lemma_comparison(up).passed) ++lemma_fail;
                    auto [rb_tilde, rb_hat] = check_relative_bound(
                        u, sym, hat, beta, lat.dim, omega.coupling_scale());
                    if (!rb_tilde.passed || !rb_hat.passed) ++rb_fail;
                    const double ft = dirichlet_form_tilde(u, lat, omega, beta);
                    const double fh = dirichlet_form_hat(u, lat, omega, beta);
                    if (fh - ft < -1e-12 * std::max({std::fabs(ft), std::fabs(fh), 1.0}))
                        ++dom_fail;
                    const double mt = sym.quadratic_form(u.amp);
                    const double mh = hat.quadratic_form(u.amp);
                    if (std::fabs(ft - mt) > 1e-10 * (1.0 + std::fabs(ft)) ||
                        std::fabs(fh - mh) > 1e-10 * (1.0 + std::fabs(fh)))
                        ++eq_fail;
                }
                rec.extra = {{"lemma_failures", lemma_fail},
                             {"relative_bound_failures", rb_fail},
                             {"domination_failures", dom_fail},
                             {"form_matrix_failures", eq_fail}};
                rec.violated = lemma_fail + rb_fail + dom_fail + eq_fail > 0;
                if (rec.violated) ++report.bound_violations;
            } catch (const std::exception& e) {
                rec.error = e.what();
                ++report.failures;
            }
            report.records.push_back(std::move(rec));
        }
    }
    report.passed = report.failures == 0 && report.bound_violations == 0;
    return report;
}

// KMC gap estimate vs the matching spectral quantity (smallest eigenvalue
// with nonzero overlap on the tagged spin, from dense diagonalization).
inline EnsembleReport run_mc_gap(const RunConfig& config) {
    config.validate();
    if (config.betas.size() != 1) throw std::invalid_argument("mc_gap: exactly one beta");
    EnsembleReport report;
    report.config = config;
    const Lattice lat = build_lattice(config.d, config.lengths, config.bc);
    const int n = lat.n_sites();
    const RateFamily family = config.family();
    const double beta = config.betas.front();
    const DisorderField omega = sample_disorder(lat, config.j_minus, config.j_plus,
                                                rng::derive(config.base_seed, 0));

    // dense-diagonalization reference: the exact autocorrelation put through
    // the identical windowed fit (the estimator's actual target), plus the
    // smallest overlapping eigenvalue for context
    const double envelope = 4.0 * lat.dim * omega.coupling_scale() * beta;
    const double auto_dt =
        config.dt > 0.0
            ? config.dt
            : 0.1 / std::max(psi_value(family, -envelope), psi_value(family, envelope));
    const SpectralReference sref =
        spectral_autocorrelation_reference(lat, omega, beta, family, config.tagged_site,
                                           auto_dt);
    const double reference = sref.windowed_rate;

    std::vector<double> estimates;
    for (int r = 0; r < config.replicas; ++r) {
        RealizationRecord rec;
        rec.index = r;
        rec.beta = beta;
        rec.seed = rng::derive(config.base_seed, 1000 + static_cast<std::uint64_t>(r));
        try {
            KmcOptions opts;
            opts.seed = rec.seed;
            opts.max_events = config.max_events;
            opts.tagged_site = config.tagged_site;
            opts.dt = config.dt;
            // horizon from the event budget at the beta = 0 rate scale
            opts.t_max = config.t_max > 0.0
                             ? config.t_max
                             : 2.2 * static_cast<double>(config.max_events) / (0.5 * n);
            opts.burn_in = config.burn_in > 0.0 ? config.burn_in : 0.02 * opts.t_max;
            const Trajectory traj = simulate(lat, omega, beta, family, opts);
            const GapEstimate est = autocorrelation_gap(traj);
            estimates.push_back(est.rate);
            rec.extra = {{"rate", est.rate},
                         {"stderr", est.stderr_boot},
                         {"events", traj.n_events},
                         {"t_end", traj.t_end},
                         {"window", {est.window_lo, est.window_hi}}};
        } catch (const std::exception& e) {
            rec.error = e.what();
            ++report.failures;
        }
        report.records.push_back(std::move(rec));
    }

    double mean = 0.0, se = 0.0;
    for (double v : estimates) mean += v;
    if (!estimates.empty()) mean /= estimates.size();
    for (double v : estimates) se += (v - mean) * (v - mean);
    if (estimates.size() > 1)
        se = std::sqrt(se / (estimates.size() - 1) / estimates.size());
    const double rel_err = reference > 0.0 ? std::fabs(mean - reference) / reference : 1.0;
    const bool within_se = std::fabs(mean - reference) <= 3.0 * std::max(se, 1e-12);
    report.passed = report.failures == 0 && !estimates.empty() && within_se && rel_err <= 0.15;
    RealizationRecord summary;
    summary.index = -1;
    summary.beta = beta;
    summary.extra = {{"mean_rate", mean},
                     {"stderr", se},
                     {"spectral_reference", reference},
                     {"smallest_overlap_eigenvalue", sref.smallest_overlap},
                     {"relative_error", rel_err},
                     {"within_3se", within_se}};
    report.records.push_back(std::move(summary));
    return report;
}

// Exact gap vs susceptibility upper bound per realization.
inline EnsembleReport run_gap_bound(const RunConfig& config) {
    config.validate();
    EnsembleReport report;
    report.config = config;
    const Lattice lat = build_lattice(config.d, config.lengths, config.bc);
    const RateFamily family = config.family();
    for (double beta : config.betas) {
        for (int i = 0; i < config.n_realizations; ++i) {
            RealizationRecord rec;
            rec.index = i;
            rec.beta = beta;
            rec.seed = rng::derive(config.base_seed, static_cast<std::uint64_t>(i));
            try {
                const DisorderField omega =
                    sample_disorder(lat, config.j_minus, config.j_plus, rec.seed);
                const EnergyTable table = gibbs_table(omega, lat, beta);
                const SparseOperator sym =
                    symmetrize(assemble_generator(lat, omega, beta, family), table);
                const SpectrumResult spec = dense_spectrum(sym);
                const double gap = spec.eigenvalues[1] - spec.eigenvalues[0];
                const GapUpperBound ub = gap_upper_bound_exact(lat, omega, beta, family);
                rec.extra = {{"gap", gap},
                             {"bound", ub.bound},
                             {"bound_available", ub.available},
                             {"susceptibility", ub.susceptibility}};
                rec.violated = ub.available && gap > ub.bound * (1.0 + 1e-10);
                if (rec.violated) ++report.bound_violations;
            } catch (const std::exception& e) {
                rec.error = e.what();
                ++report.failures;
            }
            report.records.push_back(std::move(rec));
        }
    }
    report.passed = report.failures == 0 && report.bound_violations == 0;
    return report;
}

inline EnsembleReport run(const RunConfig& config) {
    switch (config.experiment) {
        case Experiment::band_check: return run_band_check(config);
        case Experiment::band_union: return run_band_union(config);
        case Experiment::perturbation_scaling: return run_perturbation_scaling(config);
        case Experiment::form_audit: return run_form_audit(config);
        case Experiment::mc_gap: return run_mc_gap(config);
        case Experiment::gap_bound: return run_gap_bound(config);
    }
    throw std::invalid_argument("run: unknown experiment");
}

// --- persistence ------------------------------------------------------------

inline nlohmann::json record_to_json(const RealizationRecord& r) {
    nlohmann::json j = {{"index", r.index}, {"seed", r.seed}, {"beta", r.beta}};
    if (!r.error.empty()) {
        j["error"] = r.error;
        return j;
    }
    if (!r.band.band.empty()) {
        j["band"] = {{"ground", r.band.ground},
                     {"min", r.band.band_min},
                     {"max", r.band.band_max},
                     {"values", r.band.band},
                     {"gap_below", r.band.gap_below},
                     {"gap_above", r.band.gap_above},
                     {"isolated", r.band.isolated}};
        j["bound_lo"] = r.bound_lo;
        j["bound_hi"] = r.bound_hi;
        j["violated"] = r.violated;
        j["method"] = r.method;
    }
    if (!r.extra.is_null()) j["extra"] = r.extra;
    return j;
}

// Writes results.jsonl (config line + one record per line), summary.json and
// plot CSVs. Timestamps live only in manifest.json so result records are
// byte-reproducible.
inline void write_report(const EnsembleReport& report, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const nlohmann::json cfg = to_json(report.config);
    {
        std::ofstream out(dir + "/results.jsonl");
        out << nlohmann::json{{"config", cfg}}.dump() << '\n';
        for (const auto& r : report.records) out << record_to_json(r).dump() << '\n';
    }
    {
        nlohmann::json summary = {{"config", cfg},
                                  {"union_band", {report.union_min, report.union_max}},
                                  {"bound_violations", report.bound_violations},
                                  {"failures", report.failures},
                                  {"passed", report.passed}};
        if (report.hausdorff_stability >= 0.0)
            summary["hausdorff_stability"] = report.hausdorff_stability;
        std::ofstream out(dir + "/summary.json");
        out << summary.dump(2) << '\n';
    }
    {
        std::ofstream out(dir + "/bands.csv");
        out << "# config: " << cfg.dump() << '\n';
        out << "beta,g_minus,band_min,band_max,g_plus\n";
        out << std::setprecision(17);
        for (const auto& r : report.records) {
            if (!r.error.empty() || r.band.band.empty()) continue;
            out << r.beta << ',' << r.bound_lo << ',' << r.band.band_min << ','
                << r.band.band_max << ',' << r.bound_hi << '\n';
        }
    }
    {
        std::ofstream out(dir + "/manifest.json");
        const auto now = std::chrono::system_clock::now().time_since_epoch();
        out << nlohmann::json{
                   {"written_unix_ms",
                    std::chrono::duration_cast<std::chrono::milliseconds>(now).count()},
                   {"files", {"results.jsonl", "summary.json", "bands.csv"}}}
                   .dump(2)
            << '\n';
    }
}

}  // namespace glauber
