#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bellmono/chsh.hpp"
#include "bellmono/pauli.hpp"
#include "bellmono/qstate.hpp"

namespace bellmono::spinchain {

inline constexpr int kMinSites = 4;
inline constexpr int kMaxSites = 24;
inline constexpr double kResidualTarget = 1e-8;

// Periodic dimerized Heisenberg ring
//   H = sum_i J1 s(2i-1).s(2i) + J2 s(2i).s(2i+1)
// with Pauli vectors s and 0-based sites internally: J1 bonds are
// (0,1), (2,3), ...; J2 bonds are (1,2), (3,4), ..., (N-1,0).
struct ChainSpec {
    int n_sites = 4;
    double j1 = 1.0;
    double j2 = 0.0;

    void validate() const;
    bool uniform() const noexcept;
    // 3 (N/2)(|J1| + |J2|) >= ||H||.
    double spectral_bound() const noexcept;
};

struct Bond {
    int a, b;
    double j;
};

std::vector<Bond> bonds(const ChainSpec& spec);

// Zero-magnetization basis (exactly N/2 up spins), ascending, with O(1)
// rank lookup through split lookup tables on the high and low halves.
class SectorBasis {
public:
    explicit SectorBasis(int n_sites);

    int n_sites() const noexcept { return n_sites_; }
    std::size_t size() const noexcept { return states_.size(); }
    std::span<const std::uint32_t> states() const noexcept { return states_; }
    std::uint32_t state(std::size_t k) const { return states_[k]; }

    bool contains(std::uint32_t pattern) const noexcept;
    // Position of `pattern`; precondition contains(pattern).
    std::size_t rank(std::uint32_t pattern) const noexcept {
        return hi_offset_[pattern >> half_] + lo_rank_[pattern & lo_mask_];
    }

private:
    int n_sites_;
    int half_;
    std::uint32_t lo_mask_;
    std::vector<std::uint32_t> states_;
    std::vector<std::uint32_t> hi_offset_;
    std::vector<std::uint32_t> lo_rank_;
};

SectorBasis enumerate_sector(int n_sites);

// out = H v over the sector basis, without materializing H. Each output
// entry is gathered independently, so the result does not depend on the
// number of OpenMP threads.
void apply_hamiltonian(const ChainSpec& spec, const SectorBasis& basis, std::span<const double> v,
                       std::span<double> out);
std::vector<double> apply_hamiltonian(const ChainSpec& spec, const SectorBasis& basis, std::span<const double> v);

enum class SolverMethod { Power, Lanczos, Auto };

std::string_view to_string(SolverMethod m) noexcept;
SolverMethod parse_solver_method(std::string_view name);

struct SolverOptions {
    double tol = 1e-12;  // relative eigenvalue change
    int max_iter = 200000;
    SolverMethod method = SolverMethod::Auto;
    // Auto: power iterations before switching to restarted Lanczos.
    int power_budget = 200;
    int lanczos_steps = 60;
    bool estimate_gap = true;
    int gap_steps = 40;
};

struct GroundState {
    ChainSpec spec;
    std::vector<double> vector;
    double energy = 0.0;
    double residual = 0.0;
    int iterations = 0;  // matrix-vector products spent
    std::optional<double> gap_estimate;
    bool converged = false;
    bool possibly_degenerate = false;
    SolverMethod method_used = SolverMethod::Power;

    std::string flags() const;
};

// Neel pattern |0101...> plus a 1e-3 uniform admixture, normalized.
std::vector<double> neel_start_vector(const SectorBasis& basis);

// Shifted power iteration on (sigma I - H), optionally accelerated by a
// restarted Lanczos phase. `start` overrides the Neel start vector.
GroundState ground_state(const ChainSpec& spec, const SectorBasis& basis, const SolverOptions& options = {},
                         std::span<const double> start = {});
GroundState ground_state(const ChainSpec& spec, const SolverOptions& options = {});

// <sigma_u(i) sigma_u(j)> in the ground state; 0-based sites.
double correlator(const GroundState& gs, const SectorBasis& basis, PauliAxis axis, int i, int j);

// General <sigma_u(i) sigma_v(j)> and single-site <sigma_u(i)>.
double pauli_pair_expectation(const GroundState& gs, const SectorBasis& basis, PauliAxis u, int i, PauliAxis v,
                              int j);
double pauli_expectation(const GroundState& gs, const SectorBasis& basis, PauliAxis u, int i);

// rho_ij rebuilt from all sixteen Pauli expectations.
qstate::TwoQubitState pair_rdm(const GroundState& gs, const SectorBasis& basis, int i, int j);

inline constexpr double kClosedFormAgreement = 1e-8;

// Closed-form isotropic value 2 sqrt(2)|<zz>|, cross-checked against the
// general criterion on the explicit reduced state.
chsh::BellValue pair_bell(const GroundState& gs, const SectorBasis& basis, int i, int j);

struct SweepPoint {
    double ratio = 0.0;
    double b12 = 0.0, b23 = 0.0;
    double db12 = 0.0, db23 = 0.0;
    double bs = 0.0;  // B12^2 + B23^2
    double energy = 0.0;
    double residual = 0.0;
    std::string flags;
    bool ok = true;
};

struct SweepResult {
    int n_sites = 0;
    std::vector<SweepPoint> points;

    double max_bs() const;
};

struct SweepOptions {
    SolverOptions solver;
    bool warm_start = true;
    // Called once per point with the solved ground state, before it is discarded.
    std::function<void(const GroundState&, const SectorBasis&, const SweepPoint&)> observer;
};

// J1 = 1 and J2 = ratio at every grid point; grid must be ascending.
SweepResult sweep(int n_sites, std::span<const double> grid, const SweepOptions& options = {});

// `count` uniformly spaced points on [lo, hi], endpoints included.
std::vector<double> uniform_grid(double lo, double hi, int count);

// Central differences, one-sided at the ends.
std::vector<double> finite_difference(std::span<const double> x, std::span<const double> y);

struct DistanceEntry {
    int distance = 0;
    double value = 0.0;
    double concurrence = 0.0;
    bool asserted = true;
    bool within_bound = true;
};

struct Theorem1Report {
    std::vector<DistanceEntry> entries;
    std::optional<DistanceEntry> antipodal;  // present when excluded from assertion
    bool all_within_bound = true;
};

// Bell values of pairs (0, d) for d = 1..N/2 on a translation-invariant
// ring; each asserted value must be <= 2 + 1e-9.
Theorem1Report theorem1_scan(const GroundState& gs, const SectorBasis& basis, bool exclude_antipodal);

}  // namespace bellmono::spinchain
