#include "bellmono/chsh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bellmono/counter_rng.hpp"
#include "bellmono/error.hpp"
#include "bellmono/sym3_eigen.hpp"

namespace bellmono::chsh {

namespace {

bool is_unit(const Eigen::Vector3d& v) { return std::abs(v.norm() - 1.0) <= 1e-12; }

Eigen::Vector3d normalized_or_any(const Eigen::Vector3d& v) {
    const double n = v.norm();
    if (n < 1e-300) return Eigen::Vector3d::UnitX();
    return v / n;
}

Eigen::Vector3d random_direction(CounterRng& rng) {
    const auto [x, y] = rng.next_normal_pair();
    const auto [z, unused] = rng.next_normal_pair();
    (void)unused;
    return normalized_or_any(Eigen::Vector3d(x, y, z));
}

std::string pair_label(int i, int j) { return std::to_string(i + 1) + "," + std::to_string(j + 1); }

MonogamyReport pivot_report(const StateVector& state, int pivot, double bound) {
    MonogamyReport report;
    report.bound = bound;
    for (int other = 0; other < state.n_qubits(); ++other) {
        if (other == pivot) continue;
        const BellValue b = horodecki_max(qstate::correlation_matrix(qstate::partial_trace_pair(state, pivot, other)));
        const double sq = b.squared();
        report.pair_values.emplace_back(pair_label(pivot, other), sq);
        report.sum += sq;
    }
    report.slack = report.bound - report.sum;
    report.satisfied = report.sum <= report.bound + kMonogamyTolerance;
    return report;
}

void check_pivot(const StateVector& state, int pivot) {
    if (pivot < 0 || pivot >= state.n_qubits()) {
        throw DomainError("qubit_index", "pivot " + std::to_string(pivot) + " out of range");
    }
}

}  // namespace

void BellSetting::validate() const {
    if (!is_unit(a) || !is_unit(a_prime) || !is_unit(b) || !is_unit(b_prime)) {
        throw DomainError("unit_direction", "measurement directions must be unit vectors");
    }
}

double checked_sqrt(double radicand, const char* what) {
    if (radicand < 0.0) {
        if (radicand < -kRadicandTolerance) {
            throw DomainError("nonnegative_radicand", std::string(what) + " radicand " + std::to_string(radicand));
        }
        return 0.0;
    }
    return std::sqrt(radicand);
}

BellValue horodecki_max(const CorrelationMatrix& t) {
    const Eigen::Matrix3d u_mat = t.t().transpose() * t.t();
    const auto eig = symmetric3_eigenvalues(u_mat);
    // U is PSD; only rounding can push these below zero.
    const double u = std::max(eig[0], 0.0);
    const double u_prime = std::max(eig[1], 0.0);
    BellValue v;
    v.u = u;
    v.u_prime = u_prime;
    v.value = 2.0 * checked_sqrt(u + u_prime, "horodecki");
    return v;
}

double bell_expectation(const CorrelationMatrix& t, const BellSetting& s) {
    s.validate();
    const Eigen::Matrix3d& m = t.t();
    return s.a.dot(m * (s.b + s.b_prime)) + s.a_prime.dot(m * (s.b - s.b_prime));
}

BellValue oracle_max(const CorrelationMatrix& t, const OracleOptions& options) {
    if (options.restarts < 1) throw DomainError("oracle_restarts", "restarts must be >= 1");
    if (!(options.tol > 0.0)) throw DomainError("oracle_tolerance", "tol must be positive");

    const Eigen::Matrix3d& m = t.t();
    CounterRng rng(options.seed, 0);

    BellValue best;
    best.value = -1.0;
    bool all_converged = true;
    for (int restart = 0; restart < options.restarts; ++restart) {
        BellSetting s;
        s.b = random_direction(rng);
        s.b_prime = random_direction(rng);
        double value = -1.0;
        bool converged = false;
        for (int it = 0; it < options.max_iterations; ++it) {
            // For fixed b, b' the optimum is a || T(b + b'), a' || T(b - b').
            s.a = normalized_or_any(m * (s.b + s.b_prime));
            s.a_prime = normalized_or_any(m * (s.b - s.b_prime));
            // For fixed a, a' the optimum is b || T^T(a + a'), b' || T^T(a - a').
            s.b = normalized_or_any(m.transpose() * (s.a + s.a_prime));
            s.b_prime = normalized_or_any(m.transpose() * (s.a - s.a_prime));
            const double next = s.a.dot(m * (s.b + s.b_prime)) + s.a_prime.dot(m * (s.b - s.b_prime));
            if (std::abs(next - value) < options.tol) {
                value = next;
                converged = true;
                break;
            }
            value = next;
        }
        all_converged = all_converged && converged;
        if (value > best.value) {
            best.value = value;
            best.setting = s;
        }
    }
    best.converged = all_converged;
    return best;
}

BellValue heisenberg_bell(double tzz) {
    if (!std::isfinite(tzz) || std::abs(tzz) > 1.0 + 1e-12) {
        throw DomainError("correlation_range", "t_zz = " + std::to_string(tzz));
    }
    BellValue v;
    v.value = kTsirelson * std::abs(tzz);
    v.u = tzz * tzz;
    v.u_prime = tzz * tzz;
    return v;
}

MonogamyReport monogamy_triple(const StateVector& state, int pivot) {
    if (state.n_qubits() != 3) {
        throw DomainError("qubit_count", "tripartite monogamy needs 3 qubits, got " + std::to_string(state.n_qubits()));
    }
    check_pivot(state, pivot);
    return pivot_report(state, pivot, 8.0);
}

MonogamyReport bell_sum(const StateVector& state, int pivot) {
    if (state.n_qubits() < 3) {
        throw DomainError("qubit_count", "N-party monogamy needs at least 3 qubits");
    }
    check_pivot(state, pivot);
    return pivot_report(state, pivot, 4.0 * (state.n_qubits() - 1));
}

double real_tripartite_max(const StateVector& state, int i, int j) {
    if (state.n_qubits() != 3) throw DomainError("qubit_count", "real tripartite form needs 3 qubits");
    if (!state.is_real(1e-12)) throw DomainError("real_amplitudes", "state has complex amplitudes");
    if (i < 0 || i > 2 || j < 0 || j > 2 || i == j) {
        throw DomainError("qubit_index", "pair must be two distinct qubits among {0, 1, 2}");
    }
    const int k = 3 - i - j;
    constexpr auto Y = PauliAxis::Y;
    const double yij = qstate::pauli_pair_expectation(state, Y, i, Y, j);
    const double yik = qstate::pauli_pair_expectation(state, Y, i, Y, k);
    const double yjk = qstate::pauli_pair_expectation(state, Y, j, Y, k);
    return 2.0 * checked_sqrt(1.0 + yij * yij - yik * yik - yjk * yjk, "real tripartite");
}

BellValue real_plane_max(const CorrelationMatrix& t) {
    Eigen::Matrix2d block;
    block << t.t()(0, 0), t.t()(0, 2), t.t()(2, 0), t.t()(2, 2);
    const Eigen::Matrix2d g = block.transpose() * block;
    const double tr = g.trace();
    const double det = g.determinant();
    const double disc = checked_sqrt(tr * tr / 4.0 - det, "real plane");
    BellValue v;
    v.u = tr / 2.0 + disc;
    v.u_prime = std::max(tr / 2.0 - disc, 0.0);
    v.value = 2.0 * checked_sqrt(block.squaredNorm(), "real plane");
    return v;
}

double concurrence(const TwoQubitState& rdm) {
    using Matrix = TwoQubitState::Matrix;
    const Matrix& rho = rdm.matrix();
    Matrix yy = Matrix::Zero();
    // sigma_y (x) sigma_y in the |ab> basis: anti-diagonal (-1, 1, 1, -1).
    yy(0, 3) = -1.0;
    yy(1, 2) = 1.0;
    yy(2, 1) = 1.0;
    yy(3, 0) = -1.0;
    const Matrix flipped = yy * rho.conjugate() * yy;

    // Eigenvalues of rho * flipped equal those of sqrt(rho) flipped sqrt(rho),
    // which is Hermitian PSD.
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
    const Eigen::Vector4d evals = es.eigenvalues().cwiseMax(0.0);
    const Matrix sqrt_rho = es.eigenvectors() * evals.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
    Matrix r = sqrt_rho * flipped * sqrt_rho;
    r = 0.5 * (r + r.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> rs(r, Eigen::EigenvaluesOnly);
    std::array<double, 4> lambda;
    for (int k = 0; k < 4; ++k) lambda[k] = std::sqrt(std::max(rs.eigenvalues()(k), 0.0));
    std::sort(lambda.begin(), lambda.end(), std::greater<>());
    return std::max(0.0, lambda[0] - lambda[1] - lambda[2] - lambda[3]);
}

nlohmann::json to_json(const BellValue& v) {
    auto vec = [](const Eigen::Vector3d& x) { return nlohmann::json::array({x(0), x(1), x(2)}); };
    nlohmann::json j;
    j["value"] = v.value;
    j["u"] = v.u ? nlohmann::json(*v.u) : nlohmann::json(nullptr);
    j["u_prime"] = v.u_prime ? nlohmann::json(*v.u_prime) : nlohmann::json(nullptr);
    if (v.setting) {
        j["setting"] = {{"a", vec(v.setting->a)},
                        {"a_prime", vec(v.setting->a_prime)},
                        {"b", vec(v.setting->b)},
                        {"b_prime", vec(v.setting->b_prime)}};
    } else {
        j["setting"] = nullptr;
    }
    return j;
}

}  // namespace bellmono::chsh
