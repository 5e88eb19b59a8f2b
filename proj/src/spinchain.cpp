#include <cmath>
#include <string>

#include "bellmono/error.hpp"
#include "bellmono/spinchain.hpp"

namespace bellmono::spinchain {

void ChainSpec::validate() const {
    if (n_sites < kMinSites || n_sites > kMaxSites || n_sites % 2 != 0) {
        throw DomainError("chain_size", "n_sites must be even and in [4, 24], got " + std::to_string(n_sites));
    }
    if (!(j1 > 0.0) || !std::isfinite(j1)) throw DomainError("positive_j1", "J1 must be positive");
    if (!std::isfinite(j2)) throw DomainError("finite_j2", "J2 must be finite");
}

bool ChainSpec::uniform() const noexcept { return std::abs(j1 - j2) < 1e-12; }

double ChainSpec::spectral_bound() const noexcept { return 3.0 * (n_sites / 2) * (std::abs(j1) + std::abs(j2)); }

std::vector<Bond> bonds(const ChainSpec& spec) {
    std::vector<Bond> out;
    out.reserve(spec.n_sites);
    for (int i = 0; i < spec.n_sites / 2; ++i) {
        out.push_back({2 * i, 2 * i + 1, spec.j1});
        out.push_back({2 * i + 1, (2 * i + 2) % spec.n_sites, spec.j2});
    }
    return out;
}

void apply_hamiltonian(const ChainSpec& spec, const SectorBasis& basis, std::span<const double> v,
                       std::span<double> out) {
    if (v.size() != basis.size() || out.size() != basis.size() || spec.n_sites != basis.n_sites()) {
        throw DomainError("dimension", "vector length does not match the sector dimension");
    }
    const std::vector<Bond> bl = bonds(spec);
    const auto states = basis.states();
    const std::int64_t dim = static_cast<std::int64_t>(basis.size());

    // s.s on a bond: +J if the spins agree; -J plus a 2J flip-flop transfer otherwise.
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < dim; ++k) {
        const std::uint32_t s = states[k];
        double acc = 0.0;
        for (const Bond& bond : bl) {
            const std::uint32_t mask = (std::uint32_t{1} << bond.a) | (std::uint32_t{1} << bond.b);
            const std::uint32_t bits = s & mask;
            if (bits == 0 || bits == mask) {
                acc += bond.j * v[k];
            } else {
                acc += -bond.j * v[k] + 2.0 * bond.j * v[basis.rank(s ^ mask)];
            }
        }
        out[k] = acc;
    }
}

std::vector<double> apply_hamiltonian(const ChainSpec& spec, const SectorBasis& basis, std::span<const double> v) {
    std::vector<double> out(basis.size());
    apply_hamiltonian(spec, basis, v, out);
    return out;
}

// ---------------------------------------------------------------------------

namespace {

void check_site(int site, int n) {
    if (site < 0 || site >= n) {
        throw DomainError("site_index", "site " + std::to_string(site) + " out of range for " + std::to_string(n) +
                                            " sites");
    }
}

struct PauliFactor {
    int site;
    PauliAxis axis;
};

std::complex<double> expectation(const GroundState& gs, const SectorBasis& basis, std::span<const PauliFactor> ops) {
    if (gs.vector.size() != basis.size()) throw DomainError("dimension", "ground state does not match basis");
    const auto states = basis.states();
    const auto& v = gs.vector;
    std::complex<double> acc = 0.0;
    for (std::size_t k = 0; k < states.size(); ++k) {
        std::uint32_t t = states[k];
        std::complex<double> phase = 1.0;
        for (const PauliFactor& f : ops) {
            const PauliAction act = pauli_action(f.axis, (t >> f.site) & 1U);
            phase *= act.phase;
            if (act.flip) t ^= std::uint32_t{1} << f.site;
        }
        if (!basis.contains(t)) continue;
        acc += v[basis.rank(t)] * phase * v[k];
    }
    return acc;
}

double real_part_checked(std::complex<double> z, const char* what) {
    if (std::abs(z.imag()) > 1e-9) {
        throw DomainError("hermitian", std::string(what) + " has imaginary part " + std::to_string(z.imag()));
    }
    return z.real();
}

Eigen::Matrix2cd pauli_matrix(int mu) {
    using C = std::complex<double>;
    Eigen::Matrix2cd m;
    switch (mu) {
        case 0: m << 1, 0, 0, 1; break;
        case 1: m << 0, 1, 1, 0; break;
        case 2: m << 0, C(0, -1), C(0, 1), 0; break;
        default: m << 1, 0, 0, -1; break;
    }
    return m;
}

}  // namespace

double pauli_pair_expectation(const GroundState& gs, const SectorBasis& basis, PauliAxis u, int i, PauliAxis v,
                              int j) {
    check_site(i, basis.n_sites());
    check_site(j, basis.n_sites());
    if (i == j) throw DomainError("distinct_sites", "pair sites must differ");
    const PauliFactor ops[] = {{i, u}, {j, v}};
    return real_part_checked(expectation(gs, basis, ops), "two-site Pauli expectation");
}

double pauli_expectation(const GroundState& gs, const SectorBasis& basis, PauliAxis u, int i) {
    check_site(i, basis.n_sites());
    const PauliFactor ops[] = {{i, u}};
    return real_part_checked(expectation(gs, basis, ops), "single-site Pauli expectation");
}

double correlator(const GroundState& gs, const SectorBasis& basis, PauliAxis axis, int i, int j) {
    return pauli_pair_expectation(gs, basis, axis, i, axis, j);
}

qstate::TwoQubitState pair_rdm(const GroundState& gs, const SectorBasis& basis, int i, int j) {
    check_site(i, basis.n_sites());
    check_site(j, basis.n_sites());
    if (i == j) throw DomainError("distinct_sites", "pair sites must differ");

    qstate::TwoQubitState::Matrix rho = qstate::TwoQubitState::Matrix::Zero();
    for (int mu = 0; mu < 4; ++mu) {
        for (int nu = 0; nu < 4; ++nu) {
            double e = 1.0;
            if (mu > 0 && nu > 0) {
                e = pauli_pair_expectation(gs, basis, kPauliAxes[mu - 1], i, kPauliAxes[nu - 1], j);
            } else if (mu > 0) {
                e = pauli_expectation(gs, basis, kPauliAxes[mu - 1], i);
            } else if (nu > 0) {
                e = pauli_expectation(gs, basis, kPauliAxes[nu - 1], j);
            }
            if (e == 0.0) continue;
            const Eigen::Matrix2cd a = pauli_matrix(mu);
            const Eigen::Matrix2cd b = pauli_matrix(nu);
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) rho(r, c) += 0.25 * e * a(r >> 1, c >> 1) * b(r & 1, c & 1);
        }
    }
    return qstate::TwoQubitState(rho, std::pair{i, j});
}

chsh::BellValue pair_bell(const GroundState& gs, const SectorBasis& basis, int i, int j) {
    const double zz = correlator(gs, basis, PauliAxis::Z, i, j);
    const chsh::BellValue closed = chsh::heisenberg_bell(zz);
    const chsh::BellValue general = chsh::horodecki_max(qstate::correlation_matrix(pair_rdm(gs, basis, i, j)));
    if (std::abs(closed.value - general.value) > kClosedFormAgreement) {
        throw DomainError("closed_form_consistency",
                          "isotropic value " + std::to_string(closed.value) + " vs general " +
                              std::to_string(general.value) + " for sites " + std::to_string(i + 1) + "," +
                              std::to_string(j + 1));
    }
    return closed;
}

Theorem1Report theorem1_scan(const GroundState& gs, const SectorBasis& basis, bool exclude_antipodal) {
    if (!gs.spec.uniform()) {
        throw DomainError("translation_invariance", "distance scan needs J1 == J2");
    }
    Theorem1Report report;
    const int n = gs.spec.n_sites;
    for (int d = 1; d <= n / 2; ++d) {
        DistanceEntry e;
        e.distance = d;
        e.value = pair_bell(gs, basis, 0, d).value;
        e.concurrence = chsh::concurrence(pair_rdm(gs, basis, 0, d));
        e.within_bound = e.value <= 2.0 + 1e-9;
        e.asserted = !(exclude_antipodal && d == n / 2);
        if (e.asserted) {
            report.all_within_bound = report.all_within_bound && e.within_bound;
        } else {
            report.antipodal = e;
        }
        report.entries.push_back(e);
    }
    return report;
}

}  // namespace bellmono::spinchain
