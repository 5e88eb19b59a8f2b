#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "bellmono/counter_rng.hpp"
#include "bellmono/error.hpp"
#include "bellmono/spinchain.hpp"

namespace bellmono::spinchain {

namespace {

// Dot products and norms run serially so that results never depend on the
// thread count; the matrix-vector product dominates the cost anyway.
double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void scale(std::span<double> a, double f) {
    for (double& x : a) x *= f;
}

double residual_norm(std::span<const double> hv, std::span<const double> v, double e) {
    double s = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double d = hv[k] - e * v[k];
        s += d * d;
    }
    return std::sqrt(s);
}

struct Ritz {
    double value;
    Eigen::VectorXd coeffs;
};

Ritz lowest_ritz(const std::vector<double>& alpha, const std::vector<double>& beta) {
    const int m = static_cast<int>(alpha.size());
    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), m);
    Eigen::VectorXd sub(std::max(m - 1, 0));
    for (int k = 0; k + 1 < m; ++k) sub(k) = beta[k];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    return {es.eigenvalues()(0), es.eigenvectors().col(0)};
}

// Lanczos recurrence from unit vector q0. When `accumulate` is given, the
// Ritz combination sum_k coeffs[k] q_k is written into it. `deflate`, if
// non-empty, is projected out of every Krylov vector.
struct LanczosPass {
    std::vector<double> alpha, beta;
    int matvecs = 0;
};

LanczosPass lanczos_pass(const ChainSpec& spec, const SectorBasis& basis, std::span<const double> q0, int steps,
                         std::span<const double> deflate, const Eigen::VectorXd* coeffs, std::span<double> accumulate) {
    const std::size_t dim = q0.size();
    std::vector<double> prev(dim, 0.0), cur(q0.begin(), q0.end()), w(dim);
    LanczosPass pass;
    if (coeffs) std::fill(accumulate.begin(), accumulate.end(), 0.0);
    double beta_prev = 0.0;
    for (int k = 0; k < steps; ++k) {
        if (coeffs) {
            const double c = (*coeffs)(k);
            for (std::size_t x = 0; x < dim; ++x) accumulate[x] += c * cur[x];
            if (k + 1 == coeffs->size()) break;
        }
        apply_hamiltonian(spec, basis, cur, w);
        ++pass.matvecs;
        for (std::size_t x = 0; x < dim; ++x) w[x] -= beta_prev * prev[x];
        const double a = dot(cur, w);
        for (std::size_t x = 0; x < dim; ++x) w[x] -= a * cur[x];
        if (!deflate.empty()) {
            const double d = dot(deflate, w);
            for (std::size_t x = 0; x < dim; ++x) w[x] -= d * deflate[x];
        }
        pass.alpha.push_back(a);
        const double b = norm(w);
        if (b <= 1e-12 * (std::abs(a) + 1.0) || k + 1 == steps) break;
        pass.beta.push_back(b);
        prev.swap(cur);
        for (std::size_t x = 0; x < dim; ++x) cur[x] = w[x] / b;
        beta_prev = b;
    }
    return pass;
}

}  // namespace

std::string_view to_string(SolverMethod m) noexcept {
    switch (m) {
        case SolverMethod::Power: return "power";
        case SolverMethod::Lanczos: return "lanczos";
        case SolverMethod::Auto:
        default: return "auto";
    }
}

SolverMethod parse_solver_method(std::string_view name) {
    if (name == "power") return SolverMethod::Power;
    if (name == "lanczos") return SolverMethod::Lanczos;
    if (name == "auto") return SolverMethod::Auto;
    throw DomainError("solver_method", "unknown solver '" + std::string(name) + "'");
}

std::string GroundState::flags() const {
    std::string f;
    auto add = [&f](const char* s) {
        if (!f.empty()) f += ';';
        f += s;
    };
    if (!converged) add("not_converged");
    if (possibly_degenerate) add("possibly_degenerate");
    return f;
}

std::vector<double> neel_start_vector(const SectorBasis& basis) {
    std::vector<double> v(basis.size(), 1e-3);
    std::uint32_t neel = 0;
    for (int site = 1; site < basis.n_sites(); site += 2) neel |= std::uint32_t{1} << site;
    v[basis.rank(neel)] += 1.0;
    scale(v, 1.0 / norm(v));
    return v;
}

GroundState ground_state(const ChainSpec& spec, const SectorBasis& basis, const SolverOptions& options,
                         std::span<const double> start) {
    spec.validate();
    if (spec.n_sites != basis.n_sites()) throw DomainError("dimension", "basis does not match chain size");
    if (!(options.tol > 0.0) || options.max_iter < 1) throw DomainError("solver_options", "invalid tolerance or cap");

    const std::size_t dim = basis.size();
    GroundState gs;
    gs.spec = spec;
    if (start.empty()) {
        gs.vector = neel_start_vector(basis);
    } else {
        if (start.size() != dim) throw DomainError("dimension", "start vector has wrong length");
        gs.vector.assign(start.begin(), start.end());
        const double n0 = norm(gs.vector);
        if (!(n0 > 0.0)) throw DomainError("nonzero_state", "start vector is zero");
        scale(gs.vector, 1.0 / n0);
    }

    std::vector<double>& v = gs.vector;
    std::vector<double> hv(dim);
    const double shift = spec.spectral_bound();
    double energy_prev = std::numeric_limits<double>::infinity();
    int matvecs = 0;

    auto evaluate = [&]() {
        apply_hamiltonian(spec, basis, v, hv);
        ++matvecs;
        gs.energy = dot(v, hv);
        gs.residual = residual_norm(hv, v, gs.energy);
    };
    auto done = [&]() {
        return gs.residual < kResidualTarget * 1e-2 &&
               std::abs(gs.energy - energy_prev) <= options.tol * std::abs(gs.energy);
    };

    // Power phase.
    const bool use_power = options.method != SolverMethod::Lanczos;
    const int power_cap = options.method == SolverMethod::Auto ? options.power_budget : options.max_iter;
    gs.method_used = use_power ? SolverMethod::Power : SolverMethod::Lanczos;
    if (use_power) {
        for (int it = 0; it < power_cap && matvecs < options.max_iter; ++it) {
            evaluate();
            if (done()) {
                gs.converged = true;
                break;
            }
            energy_prev = gs.energy;
            for (std::size_t k = 0; k < dim; ++k) v[k] = shift * v[k] - hv[k];
            scale(v, 1.0 / norm(v));
        }
    }

    // Restarted two-pass Lanczos: the first pass yields the tridiagonal
    // matrix, the second regenerates the Krylov vectors to build the Ritz
    // vector without storing them.
    if (!gs.converged && options.method != SolverMethod::Power) {
        gs.method_used = SolverMethod::Lanczos;
        std::vector<double> ritz(dim);
        const int steps = static_cast<int>(std::min<std::size_t>(options.lanczos_steps, dim));
        while (matvecs < options.max_iter) {
            const LanczosPass pass = lanczos_pass(spec, basis, v, steps, {}, nullptr, {});
            matvecs += pass.matvecs;
            const Ritz r = lowest_ritz(pass.alpha, pass.beta);
            const LanczosPass rebuild = lanczos_pass(spec, basis, v, steps, {}, &r.coeffs, ritz);
            matvecs += rebuild.matvecs;
            v = ritz;
            scale(v, 1.0 / norm(v));
            energy_prev = gs.energy;
            evaluate();
            if (done()) {
                gs.converged = true;
                break;
            }
        }
    }
    if (!gs.converged) {
        // Make sure the reported energy and residual belong to the returned vector.
        evaluate();
        gs.converged = gs.residual <= kResidualTarget;
    }
    gs.iterations = matvecs;

    if (options.estimate_gap && dim > 1) {
        // Lanczos in the orthogonal complement of the ground vector.
        std::vector<double> q(dim);
        CounterRng rng(0x6a9, static_cast<std::uint64_t>(spec.n_sites));
        for (auto& x : q) x = rng.next_uniform() - 0.5;
        const double d = dot(q, v);
        for (std::size_t k = 0; k < dim; ++k) q[k] -= d * v[k];
        scale(q, 1.0 / norm(q));
        const int steps = static_cast<int>(std::min<std::size_t>(options.gap_steps, dim - 1));
        const LanczosPass pass = lanczos_pass(spec, basis, q, steps, v, nullptr, {});
        const Ritz r = lowest_ritz(pass.alpha, pass.beta);
        gs.gap_estimate = r.value - gs.energy;
        gs.possibly_degenerate = *gs.gap_estimate < 1e-6 * std::abs(gs.energy);
    }
    return gs;
}

GroundState ground_state(const ChainSpec& spec, const SolverOptions& options) {
    spec.validate();
    const SectorBasis basis(spec.n_sites);
    return ground_state(spec, basis, options, {});
}

}  // namespace bellmono::spinchain
