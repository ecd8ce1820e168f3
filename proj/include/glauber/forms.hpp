#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "glauber/disorder.hpp"
#include "glauber/generator.hpp"
#include "glauber/hamiltonian.hpp"
#include "glauber/lattice.hpp"
#include "glauber/perturbation.hpp"
#include "glauber/state_space.hpp"

namespace glauber {

struct FormCheckResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;  // rhs - lhs
    bool passed = false;
    std::string context;
};

inline FormCheckResult make_form_check(double lhs, double rhs, std::string context) {
    FormCheckResult r;
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = rhs - lhs;
    r.passed = r.margin >= -1e-12 * std::max({std::fabs(lhs), std::fabs(rhs), 1.0});
    r.context = std::move(context);
    return r;
}

// Dirichlet form of the symmetrized heat-bath generator, evaluated from the
// sum formula rather than the assembled matrix:
// sum_alpha sum_x [1/cosh(c)] [ ((u_a - u_{a^x})/2)^2 + u_a^2 (e^c - 1)/2 ],
// c = beta Delta_x H_alpha / 2. Equality with the matrix quadratic form is
// the central cross-validation of generator assembly.
inline double dirichlet_form_tilde(const StateVector& u, const Lattice& lat,
                                   const DisorderField& omega, double beta) {
    const int n = lat.n_sites();
    if (u.dim() != (std::size_t{1} << n))
        throw std::invalid_argument("dirichlet_form_tilde: dimension mismatch");
    double total = 0.0;
    for (std::size_t a = 0; a < u.dim(); ++a) {
        const SubsetState alpha{static_cast<std::uint32_t>(a), n};
        for (int x = 0; x < n; ++x) {
            const double c = 0.5 * beta * flip_delta(alpha, x, omega, lat);
            const double du = 0.5 * (u.amp[a] - u.amp[a ^ (std::size_t{1} << x)]);
            total += (du * du + 0.5 * u.amp[a] * u.amp[a] * std::expm1(c)) / std::cosh(c);
        }
    }
    return total;
}

// Same structure with cosh(c) multiplying instead of dividing: the Dirichlet
// form of the cosh dynamics.
inline double dirichlet_form_hat(const StateVector& u, const Lattice& lat,
                                 const DisorderField& omega, double beta) {
    const int n = lat.n_sites();
    if (u.dim() != (std::size_t{1} << n))
        throw std::invalid_argument("dirichlet_form_hat: dimension mismatch");
    double total = 0.0;
    for (std::size_t a = 0; a < u.dim(); ++a) {
        const SubsetState alpha{static_cast<std::uint32_t>(a), n};
        for (int x = 0; x < n; ++x) {
            const double c = 0.5 * beta * flip_delta(alpha, x, omega, lat);
            const double du = 0.5 * (u.amp[a] - u.amp[a ^ (std::size_t{1} << x)]);
            total += (du * du + 0.5 * u.amp[a] * u.amp[a] * std::expm1(c)) * std::cosh(c);
        }
    }
    return total;
}

// <u| sum_x (I - s_x)/2 |u>: the beta = 0 generator.
inline double flip_form(const StateVector& u) {
    const std::size_t dim = u.dim();
    int n = 0;
    while ((std::size_t{1} << n) < dim) ++n;
    double total = 0.0;
    for (std::size_t a = 0; a < dim; ++a)
        for (int x = 0; x < n; ++x) {
            const double du = u.amp[a] - u.amp[a ^ (std::size_t{1} << x)];
            total += 0.25 * du * du;  // halves double counting over (a, a^x)
        }
    return total;
}

// <u| N |u> with N the particle-number operator.
inline double number_form(const StateVector& u) {
    double total = 0.0;
    for (std::size_t a = 0; a < u.dim(); ++a)
        total += static_cast<double>(std::popcount(a)) * u.amp[a] * u.amp[a];
    return total;
}

// Comparison lemma <u| Lbar |u> <= 2 <u| N |u>, valid on complement-parity
// sectors only. Rejects mixed-parity input; see delta_empty_counterexample
// for why the restriction is essential.
inline FormCheckResult check_lemma_comparison(const StateVector& u, double parity_tol = 1e-10) {
    const StateVector eu = apply_complement(u);
    double plus = 0.0, minus = 0.0;
    for (std::size_t a = 0; a < u.dim(); ++a) {
        const double p = 0.5 * (u.amp[a] + eu.amp[a]);
        const double m = 0.5 * (u.amp[a] - eu.amp[a]);
        plus += p * p;
        minus += m * m;
    }
    const double nrm2 = plus + minus;
    if (std::min(plus, minus) > parity_tol * std::max(nrm2, 1e-300))
        throw std::invalid_argument("check_lemma_comparison: input has mixed complement parity");
    const double lhs = flip_form(u);
    const double rhs = 2.0 * number_form(u);
    std::ostringstream ctx;
    ctx << "lemma_comparison sector=" << (plus >= minus ? "+" : "-") << " dim=" << u.dim();
    return make_form_check(lhs, rhs, ctx.str());
}

// The documented counterexample to the unrestricted comparison lemma: for
// u = delta_empty (which mixes parities), lhs = |Lambda|/2 while rhs = 0.
inline FormCheckResult delta_empty_counterexample(int n_sites) {
    const StateVector u = StateVector::basis(n_sites, 0);
    const double lhs = flip_form(u);
    const double rhs = 2.0 * number_form(u);
    FormCheckResult r;
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = rhs - lhs;
    r.passed = false;  // by construction: records the violation
    r.context = "delta_empty counterexample dim=" + std::to_string(std::size_t{1} << n_sites);
    return r;
}

// Relative bounds <v|U A U|v> <= (1 + 2c) <v|N|v> for A the symmetrized
// heat-bath generator (c = b) and the cosh generator (c = b'). Overload
// taking pre-assembled operators for sweeps.
inline std::pair<FormCheckResult, FormCheckResult> check_relative_bound(
    const StateVector& v, const SparseOperator& sym_tilde, const SparseOperator& sym_hat,
    double beta, int d, double coupling_j, const std::string& tag = "") {
    const RelativeBoundConstants c = relative_bound_constants(beta, d, coupling_j);
    const StateVector uv = apply_hadamard(v);
    const double n_form = number_form(v);
    const double lhs_tilde = sym_tilde.quadratic_form(uv.amp);
    const double lhs_hat = sym_hat.quadratic_form(uv.amp);
    std::ostringstream base;
    base << "relative_bound beta=" << beta << ' ' << tag;
    FormCheckResult tilde =
        make_form_check(lhs_tilde, (1.0 + 2.0 * c.b) * n_form, base.str() + " kind=tilde");
    FormCheckResult hat =
        make_form_check(lhs_hat, (1.0 + 2.0 * c.b_prime) * n_form, base.str() + " kind=hat");
    return {tilde, hat};
}

inline std::pair<FormCheckResult, FormCheckResult> check_relative_bound(
    const StateVector& v, const Lattice& lat, const DisorderField& omega, double beta,
    const std::string& tag = "") {
    const EnergyTable table = gibbs_table(omega, lat, beta);
    const SparseOperator gen = assemble_generator(lat, omega, beta, RateFamily::heat_bath());
    const SparseOperator sym = symmetrize(gen, table);
    const SparseOperator hat = assemble_hat(lat, omega, beta);
    return check_relative_bound(v, sym, hat, beta, lat.dim, omega.coupling_scale(), tag);
}

}  // namespace glauber
