// glauber-lab: spectral experiments on disordered Glauber dynamics.
//
// Subcommands map to the experiment recipes in glauber/ensemble.hpp plus an
// operator-export utility. Configuration comes from an optional flat
// key=value file (--config) with command-line flags taking precedence.
// Exit codes: 0 pass, 1 violations or stage failures, 2 configuration error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "glauber/ensemble.hpp"

namespace {

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    for (const auto& t : split_csv(s)) out.push_back(std::stoi(t));
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    for (const auto& t : split_csv(s)) out.push_back(std::stod(t));
    return out;
}

// Flat config grammar: one `key = value` per line, `#` starts a comment.
std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto strip = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            const auto b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        if (strip(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected key = value");
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (key.empty()) throw std::runtime_error("config line " + std::to_string(lineno) +
                                                  ": empty key");
        kv[key] = value;
    }
    return kv;
}

void apply_config_file(glauber::RunConfig& c, const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) {
        if (key == "d") c.d = std::stoi(value);
        else if (key == "lengths") c.lengths = parse_int_list(value);
        else if (key == "bc") c.bc = glauber::boundary_mode_from_string(value);
        else if (key == "j_minus") c.j_minus = std::stod(value);
        else if (key == "j_plus") c.j_plus = std::stod(value);
        else if (key == "n_realizations") c.n_realizations = std::stoi(value);
        else if (key == "base_seed") c.base_seed = std::stoull(value);
        else if (key == "betas") c.betas = parse_double_list(value);
        else if (key == "solver") c.solver = value;
        else if (key == "rate_family") c.rate_family = value;
        else if (key == "output_dir") c.output_dir = value;
        else if (key == "margin_coeff") c.margin_coeff = std::stod(value);
        else if (key == "violation_threshold") c.violation_threshold = std::stoi(value);
        else if (key == "max_events") c.max_events = std::stoull(value);
        else if (key == "replicas") c.replicas = std::stoi(value);
        else if (key == "t_max") c.t_max = std::stod(value);
        else if (key == "burn_in") c.burn_in = std::stod(value);
        else if (key == "dt") c.dt = std::stod(value);
        else if (key == "tagged_site") c.tagged_site = std::stoi(value);
        else if (key == "n_vectors") c.n_vectors = std::stoi(value);
        else throw std::runtime_error("unknown config key: " + key);
    }
}

struct CommonFlags {
    std::string config_file;
    std::string lengths, betas, bc;
    bool have_lengths = false, have_betas = false, have_bc = false;
    CLI::App* cmd = nullptr;  // for flag-presence queries (CLI overrides file)
};

void add_common_options(CLI::App* cmd, glauber::RunConfig& c, CommonFlags& f) {
    cmd->add_option("--config", f.config_file, "flat key=value config file");
    cmd->add_option("--d", c.d, "lattice dimension");
    cmd->add_option("--lengths", f.lengths, "per-axis side lengths, comma separated")
        ->each([&f](const std::string&) { f.have_lengths = true; });
    cmd->add_option("--bc", f.bc, "boundary mode: periodic | free | fixed")
        ->each([&f](const std::string&) { f.have_bc = true; });
    cmd->add_option("--j-minus", c.j_minus, "coupling lower bound");
    cmd->add_option("--j-plus", c.j_plus, "coupling upper bound");
    cmd->add_option("--realizations", c.n_realizations, "disorder realizations per beta");
    cmd->add_option("--seed", c.base_seed, "base seed for the realization sweep");
    cmd->add_option("--betas", f.betas, "inverse temperatures, comma separated")
        ->each([&f](const std::string&) { f.have_betas = true; });
    cmd->add_option("--solver", c.solver, "auto | dense | lanczos");
    cmd->add_option("--rate-family", c.rate_family, "heat_bath | cosh_quarter");
    cmd->add_option("--out", c.output_dir, "output directory (omit for no files)");
    cmd->add_option("--margin-coeff", c.margin_coeff, "band margin coefficient (x beta^2)");
    cmd->add_option("--violation-threshold", c.violation_threshold,
                    "violations tolerated before failing");
}

int run_experiment(const glauber::RunConfig& cli, const CommonFlags& f) {
    try {
        glauber::RunConfig c = cli;
        if (!f.config_file.empty()) {
            // file provides the base; any flag given on the command line wins
            glauber::RunConfig merged;
            merged.experiment = cli.experiment;
            apply_config_file(merged, read_config_file(f.config_file));
            const auto given = [&f](const char* name) { return f.cmd->count(name) > 0; };
            if (given("--d")) merged.d = cli.d;
            if (given("--j-minus")) merged.j_minus = cli.j_minus;
            if (given("--j-plus")) merged.j_plus = cli.j_plus;
            if (given("--realizations")) merged.n_realizations = cli.n_realizations;
            if (given("--seed")) merged.base_seed = cli.base_seed;
            if (given("--solver")) merged.solver = cli.solver;
            if (given("--rate-family")) merged.rate_family = cli.rate_family;
            if (given("--out")) merged.output_dir = cli.output_dir;
            if (given("--margin-coeff")) merged.margin_coeff = cli.margin_coeff;
            if (given("--violation-threshold"))
                merged.violation_threshold = cli.violation_threshold;
            const auto opt_given = [&f](const char* name) {
                const CLI::Option* o = f.cmd->get_option_no_throw(name);
                return o != nullptr && o->count() > 0;
            };
            if (opt_given("--events")) merged.max_events = cli.max_events;
            if (opt_given("--replicas")) merged.replicas = cli.replicas;
            if (opt_given("--t-max")) merged.t_max = cli.t_max;
            if (opt_given("--burn-in")) merged.burn_in = cli.burn_in;
            if (opt_given("--dt")) merged.dt = cli.dt;
            if (opt_given("--tagged-site")) merged.tagged_site = cli.tagged_site;
            if (opt_given("--vectors")) merged.n_vectors = cli.n_vectors;
            c = merged;
        }
        if (f.have_lengths) c.lengths = parse_int_list(f.lengths);
        if (f.have_betas) c.betas = parse_double_list(f.betas);
        if (f.have_bc) c.bc = glauber::boundary_mode_from_string(f.bc);
        c.validate();

        const glauber::EnsembleReport report = glauber::run(c);
        if (!c.output_dir.empty()) glauber::write_report(report, c.output_dir);

        std::printf("experiment=%s records=%zu violations=%d failures=%d",
                    glauber::to_string(c.experiment), report.records.size(),
                    report.bound_violations, report.failures);
        if (!report.records.empty() && report.union_max > 0.0)
            std::printf(" union=[%.6f, %.6f]", report.union_min, report.union_max);
        if (report.hausdorff_stability >= 0.0)
            std::printf(" hausdorff=%.6g", report.hausdorff_stability);
        std::printf(" result=%s\n", report.passed ? "PASS" : "FAIL");
        return report.passed ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    }
}

int run_export(const glauber::RunConfig& base, const CommonFlags& f, const std::string& which,
               double beta, const std::string& out_file, const std::string& field_out) {
    try {
        glauber::RunConfig c = base;
        if (!f.config_file.empty()) apply_config_file(c, read_config_file(f.config_file));
        if (f.have_lengths) c.lengths = parse_int_list(f.lengths);
        if (f.have_bc) c.bc = glauber::boundary_mode_from_string(f.bc);
        const glauber::Lattice lat = glauber::build_lattice(c.d, c.lengths, c.bc);
        const glauber::DisorderField omega =
            glauber::sample_disorder(lat, c.j_minus, c.j_plus, c.base_seed);

        glauber::SparseOperator op;
        if (which == "generator") {
            op = glauber::assemble_generator(lat, omega, beta, c.family());
        } else if (which == "tilde") {
            const glauber::EnergyTable table = glauber::gibbs_table(omega, lat, beta);
            op = glauber::symmetrize(
                glauber::assemble_generator(lat, omega, beta, c.family()), table);
        } else if (which == "hat") {
            op = glauber::assemble_hat(lat, omega, beta);
        } else if (which == "hamiltonian-diag") {
            op = glauber::hamiltonian_operator(omega, lat).diagonal;
        } else if (which == "hamiltonian-offdiag") {
            op = glauber::hamiltonian_operator(omega, lat).offdiag;
        } else {
            throw std::invalid_argument("unknown operator: " + which);
        }
        std::ofstream out(out_file);
        if (!out) throw std::invalid_argument("cannot open output file: " + out_file);
        op.write_coordinate(out);
        if (!field_out.empty()) {
            std::ofstream fo(field_out);
            if (!fo) throw std::invalid_argument("cannot open field output: " + field_out);
            fo << glauber::to_json(omega, lat).dump(2) << '\n';
        }
        std::printf("wrote %s: dim=%zu nnz=%zu\n", out_file.c_str(), op.dim(), op.nnz());
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral laboratory for disordered Glauber dynamics"};
    app.require_subcommand(1);

    struct Sub {
        const char* name;
        const char* desc;
        glauber::Experiment experiment;
    };
    const Sub subs[] = {
        {"band-check", "verify the lowest band against the analytic interval",
         glauber::Experiment::band_check},
        {"band-union", "split-ensemble stability of the union band",
         glauber::Experiment::band_union},
        {"perturb-scaling", "first-order band prediction and Richardson scaling",
         glauber::Experiment::perturbation_scaling},
        {"form-audit", "quadratic-form inequality sweep",
         glauber::Experiment::form_audit},
        {"mc-gap", "kinetic Monte Carlo autocorrelation vs dense spectrum",
         glauber::Experiment::mc_gap},
        {"gap-bound", "exact spectral gap vs susceptibility upper bound",
         glauber::Experiment::gap_bound},
    };

    std::vector<glauber::RunConfig> configs(std::size(subs) + 1);
    std::vector<CommonFlags> flags(std::size(subs) + 1);
    std::vector<CLI::App*> cmds;
    for (std::size_t i = 0; i < std::size(subs); ++i) {
        CLI::App* cmd = app.add_subcommand(subs[i].name, subs[i].desc);
        configs[i].experiment = subs[i].experiment;
        flags[i].cmd = cmd;
        add_common_options(cmd, configs[i], flags[i]);
        if (subs[i].experiment == glauber::Experiment::mc_gap) {
            cmd->add_option("--events", configs[i].max_events, "event budget per replica");
            cmd->add_option("--replicas", configs[i].replicas, "independent replicas");
            cmd->add_option("--t-max", configs[i].t_max, "time horizon (0 = derive)");
            cmd->add_option("--burn-in", configs[i].burn_in, "equilibration span");
            cmd->add_option("--dt", configs[i].dt, "sampling step (0 = auto)");
            cmd->add_option("--tagged-site", configs[i].tagged_site, "autocorrelation site");
        }
        if (subs[i].experiment == glauber::Experiment::form_audit)
            cmd->add_option("--vectors", configs[i].n_vectors, "random vectors per instance");
        cmds.push_back(cmd);
    }

    // export-ops: write one operator in coordinate-triplet text form
    const std::size_t ei = std::size(subs);
    CLI::App* exp_cmd = app.add_subcommand("export-ops", "export an operator as text triplets");
    std::string export_which = "tilde", export_file = "operator.txt", export_field;
    double export_beta = 0.0;
    exp_cmd->add_option("--config", flags[ei].config_file, "flat key=value config file");
    exp_cmd->add_option("--d", configs[ei].d, "lattice dimension");
    exp_cmd->add_option("--lengths", flags[ei].lengths, "per-axis side lengths")
        ->each([&flags, ei](const std::string&) { flags[ei].have_lengths = true; });
    exp_cmd->add_option("--bc", flags[ei].bc, "boundary mode")
        ->each([&flags, ei](const std::string&) { flags[ei].have_bc = true; });
    exp_cmd->add_option("--j-minus", configs[ei].j_minus, "coupling lower bound");
    exp_cmd->add_option("--j-plus", configs[ei].j_plus, "coupling upper bound");
    exp_cmd->add_option("--seed", configs[ei].base_seed, "disorder seed");
    exp_cmd->add_option("--rate-family", configs[ei].rate_family, "rate family");
    exp_cmd->add_option("--beta", export_beta, "inverse temperature");
    exp_cmd->add_option("--operator", export_which,
                        "generator | tilde | hat | hamiltonian-diag | hamiltonian-offdiag");
    exp_cmd->add_option("--file", export_file, "output path");
    exp_cmd->add_option("--field-out", export_field, "also write the disorder field JSON here");

    CLI11_PARSE(app, argc, argv);

    for (std::size_t i = 0; i < std::size(subs); ++i)
        if (cmds[i]->parsed()) return run_experiment(configs[i], flags[i]);
    if (exp_cmd->parsed())
        return run_export(configs[ei], flags[ei], export_which, export_beta, export_file,
                          export_field);
    return 2;
}
