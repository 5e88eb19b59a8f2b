#include "bellmono/qstate.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bellmono/counter_rng.hpp"
#include "bellmono/error.hpp"

namespace bellmono::qstate {

namespace {

double squared_norm(std::span<const Amplitude> amps) {
    double s = 0.0;
    for (const auto& a : amps) s += std::norm(a);
    return s;
}

void check_qubit(int q, int n_qubits, const char* what) {
    if (q < 0 || q >= n_qubits) {
        throw DomainError("qubit_index", std::string(what) + " index " + std::to_string(q) +
                                             " out of range for " + std::to_string(n_qubits) + " qubits");
    }
}

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Insert a zero bit at position `pos`, shifting higher bits up.
constexpr std::uint64_t insert_zero_bit(std::uint64_t x, int pos) {
    const std::uint64_t low = x & ((std::uint64_t{1} << pos) - 1);
    return ((x >> pos) << (pos + 1)) | low;
}

}  // namespace

StateVector::StateVector(int n_qubits, std::vector<Amplitude> amplitudes)
    : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {
    if (n_qubits < 1 || n_qubits > 30) {
        throw DomainError("qubit_count", "unsupported qubit count " + std::to_string(n_qubits));
    }
    if (amplitudes_.size() != (std::size_t{1} << n_qubits)) {
        throw DomainError("state_length", "expected " + std::to_string(std::size_t{1} << n_qubits) +
                                              " amplitudes, got " + std::to_string(amplitudes_.size()));
    }
    const double norm2 = squared_norm(amplitudes_);
    if (std::abs(norm2 - 1.0) > kNormTolerance) {
        throw DomainError("unit_norm", "squared norm " + std::to_string(norm2));
    }
}

bool StateVector::is_real(double tol) const noexcept {
    for (const auto& a : amplitudes_) {
        if (std::abs(a.imag()) > tol) return false;
    }
    return true;
}

NormalizedState make_state(int n_qubits, std::span<const Amplitude> amplitudes) {
    if (n_qubits < 1 || n_qubits > 30 || amplitudes.size() != (std::size_t{1} << n_qubits)) {
        throw DomainError("state_length", "amplitude count " + std::to_string(amplitudes.size()) +
                                              " does not match 2^" + std::to_string(n_qubits));
    }
    const double norm = std::sqrt(squared_norm(amplitudes));
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw DomainError("nonzero_state", "cannot normalize a zero or non-finite vector");
    }
    const double factor = 1.0 / norm;
    std::vector<Amplitude> scaled(amplitudes.begin(), amplitudes.end());
    for (auto& a : scaled) a *= factor;
    return {StateVector(n_qubits, std::move(scaled)), factor};
}

StateVector basis_state(int n_qubits, std::uint64_t index) {
    std::vector<Amplitude> amps(std::size_t{1} << n_qubits);
    if (index >= amps.size()) throw DomainError("state_length", "basis index out of range");
    amps[index] = 1.0;
    return StateVector(n_qubits, std::move(amps));
}

StateVector ghz_state(int n_qubits) {
    std::vector<Amplitude> amps(std::size_t{1} << n_qubits);
    amps.front() = amps.back() = kInvSqrt2;
    return StateVector(n_qubits, std::move(amps));
}

StateVector w_state(int n_qubits) {
    std::vector<Amplitude> amps(std::size_t{1} << n_qubits);
    const double a = 1.0 / std::sqrt(static_cast<double>(n_qubits));
    for (int q = 0; q < n_qubits; ++q) amps[std::size_t{1} << q] = a;
    return StateVector(n_qubits, std::move(amps));
}

StateVector singlet_state() {
    // |01> means qubit 0 in |0>, qubit 1 in |1>: basis index 0b10 = 2.
    std::vector<Amplitude> amps(4);
    amps[2] = kInvSqrt2;
    amps[1] = -kInvSqrt2;
    return StateVector(2, std::move(amps));
}

StateVector tensor(const StateVector& low, const StateVector& high) {
    const int n = low.n_qubits() + high.n_qubits();
    std::vector<Amplitude> amps(std::size_t{1} << n);
    for (std::size_t h = 0; h < high.dim(); ++h) {
        for (std::size_t l = 0; l < low.dim(); ++l) {
            amps[(h << low.n_qubits()) | l] = high[h] * low[l];
        }
    }
    const NormalizedState s = make_state(n, amps);
    return s.state;
}

// ---------------------------------------------------------------------------

TwoQubitState::TwoQubitState(const Matrix& matrix, std::optional<std::pair<int, int>> source_pair)
    : matrix_(matrix), source_pair_(source_pair) {
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            if (std::abs(matrix_(r, c) - std::conj(matrix_(c, r))) > kHermitianTolerance) {
                throw DomainError("hermitian", "density matrix is not Hermitian at (" + std::to_string(r) +
                                                   "," + std::to_string(c) + ")");
            }
        }
    }
    const Amplitude tr = matrix_.trace();
    if (std::abs(tr - 1.0) > kTraceTolerance) {
        throw DomainError("unit_trace", "trace " + std::to_string(tr.real()) + "+" +
                                            std::to_string(tr.imag()) + "i");
    }
    const double lmin = min_eigenvalue();
    if (lmin < kPsdTolerance) {
        throw DomainError("positive_semidefinite", "smallest eigenvalue " + std::to_string(lmin));
    }
}

TwoQubitState::TwoQubitState(const Matrix& matrix, std::pair<int, int> source_pair, Trusted)
    : matrix_(matrix), source_pair_(source_pair) {}

double TwoQubitState::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(matrix_, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

Eigen::Matrix2cd TwoQubitState::first_marginal() const {
    Eigen::Matrix2cd m;
    for (int a = 0; a < 2; ++a)
        for (int ap = 0; ap < 2; ++ap) m(a, ap) = matrix_(2 * a, 2 * ap) + matrix_(2 * a + 1, 2 * ap + 1);
    return m;
}

Eigen::Matrix2cd TwoQubitState::second_marginal() const {
    Eigen::Matrix2cd m;
    for (int b = 0; b < 2; ++b)
        for (int bp = 0; bp < 2; ++bp) m(b, bp) = matrix_(b, bp) + matrix_(2 + b, 2 + bp);
    return m;
}

TwoQubitState TwoQubitState::singlet() { return partial_trace_pair(singlet_state(), 0, 1); }

TwoQubitState TwoQubitState::product_zero() {
    Matrix m = Matrix::Zero();
    m(0, 0) = 1.0;
    return TwoQubitState(m);
}

TwoQubitState TwoQubitState::werner(double p) {
    if (p < 0.0 || p > 1.0) throw DomainError("werner_weight", "p must lie in [0, 1]");
    Matrix m = p * singlet().matrix() + (1.0 - p) * Matrix::Identity() / 4.0;
    return TwoQubitState(m);
}

TwoQubitState partial_trace_pair(const StateVector& state, int i, int j) {
    const int n = state.n_qubits();
    check_qubit(i, n, "first");
    check_qubit(j, n, "second");
    if (i == j) throw DomainError("distinct_qubits", "pair indices must differ");

    const int lo = std::min(i, j);
    const int hi = std::max(i, j);
    const std::uint64_t bit_i = std::uint64_t{1} << i;
    const std::uint64_t bit_j = std::uint64_t{1} << j;
    const std::uint64_t rest = std::uint64_t{1} << (n - 2);

    TwoQubitState::Matrix rho = TwoQubitState::Matrix::Zero();
    const auto amps = state.amplitudes();
    for (std::uint64_t r = 0; r < rest; ++r) {
        const std::uint64_t base = insert_zero_bit(insert_zero_bit(r, lo), hi);
        const std::array<Amplitude, 4> psi{amps[base], amps[base | bit_j], amps[base | bit_i],
                                           amps[base | bit_i | bit_j]};
        for (int row = 0; row < 4; ++row) {
            for (int col = row; col < 4; ++col) rho(row, col) += psi[row] * std::conj(psi[col]);
        }
    }
    for (int row = 0; row < 4; ++row) {
        rho(row, row) = rho(row, row).real();
        for (int col = 0; col < row; ++col) rho(row, col) = std::conj(rho(col, row));
    }
    return TwoQubitState(rho, {i, j}, TwoQubitState::Trusted{});
}

double pauli_pair_expectation(const StateVector& state, PauliAxis u, int i, PauliAxis v, int j) {
    const int n = state.n_qubits();
    check_qubit(i, n, "first");
    check_qubit(j, n, "second");
    if (i == j) throw DomainError("distinct_qubits", "pair indices must differ");

    const auto amps = state.amplitudes();
    Amplitude acc = 0.0;
    for (std::size_t s = 0; s < amps.size(); ++s) {
        const PauliAction ai = pauli_action(u, (s >> i) & 1U);
        const PauliAction aj = pauli_action(v, (s >> j) & 1U);
        std::size_t t = s;
        if (ai.flip) t ^= std::size_t{1} << i;
        if (aj.flip) t ^= std::size_t{1} << j;
        // <psi|P|psi> = sum_s psi_s * phase(s) * conj(psi_t)
        acc += std::conj(amps[t]) * ai.phase * aj.phase * amps[s];
    }
    if (std::abs(acc.imag()) > 1e-9) {
        throw DomainError("hermitian", "Pauli expectation has imaginary part " + std::to_string(acc.imag()));
    }
    return acc.real();
}

// ---------------------------------------------------------------------------

CorrelationMatrix::CorrelationMatrix(const Eigen::Matrix3d& t) : t_(t) {
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            if (!std::isfinite(t_(r, c)) || std::abs(t_(r, c)) > 1.0 + 1e-12) {
                throw DomainError("correlation_range", "entry (" + std::to_string(r) + "," +
                                                           std::to_string(c) + ") = " + std::to_string(t_(r, c)));
            }
        }
    }
}

CorrelationMatrix CorrelationMatrix::diagonal(double xx, double yy, double zz) {
    return CorrelationMatrix(Eigen::Vector3d(xx, yy, zz).asDiagonal());
}

CorrelationMatrix correlation_matrix(const TwoQubitState& rdm) {
    const auto& rho = rdm.matrix();
    Eigen::Matrix3d t;
    for (const PauliAxis u : kPauliAxes) {
        for (const PauliAxis v : kPauliAxes) {
            // Tr(rho M) = sum_r rho(r, out(r)) * phase(r) for the one-nonzero-per-column M.
            Amplitude acc = 0.0;
            for (unsigned r = 0; r < 4; ++r) {
                const unsigned a = r >> 1, b = r & 1U;
                const PauliAction pa = pauli_action(u, a);
                const PauliAction pb = pauli_action(v, b);
                const unsigned out = ((a ^ static_cast<unsigned>(pa.flip)) << 1) | (b ^ static_cast<unsigned>(pb.flip));
                acc += rho(r, out) * pa.phase * pb.phase;
            }
            if (std::abs(acc.imag()) > 1e-9) {
                throw DomainError("hermitian", "correlation t(" + std::string(axis_name(u)) +
                                                   std::string(axis_name(v)) + ") has imaginary part " +
                                                   std::to_string(acc.imag()));
            }
            t(static_cast<int>(u), static_cast<int>(v)) = acc.real();
        }
    }
    return CorrelationMatrix(t);
}

// ---------------------------------------------------------------------------

std::string_view to_string(EnsembleKind kind) noexcept {
    return kind == EnsembleKind::ComplexHaar ? "complex" : "real";
}

EnsembleKind parse_ensemble(std::string_view name) {
    if (name == "complex" || name == "complex-haar") return EnsembleKind::ComplexHaar;
    if (name == "real" || name == "real-orthogonal") return EnsembleKind::RealOrthogonal;
    throw DomainError("ensemble", "unknown ensemble '" + std::string(name) + "'");
}

StateVector random_pure_state(int n_qubits, const RandomEnsemble& ensemble, std::uint64_t sample_index) {
    if (n_qubits < 2 || n_qubits > 30) {
        throw DomainError("qubit_count", "random states need at least 2 qubits");
    }
    const std::size_t dim = std::size_t{1} << n_qubits;
    CounterRng rng(ensemble.seed, sample_index);
    std::vector<Amplitude> amps(dim);
    double norm2 = 0.0;
    if (ensemble.kind == EnsembleKind::ComplexHaar) {
        for (auto& a : amps) {
            const auto [re, im] = rng.next_normal_pair();
            a = {re, im};
            norm2 += re * re + im * im;
        }
    } else {
        for (std::size_t k = 0; k < dim; k += 2) {
            const auto [x, y] = rng.next_normal_pair();
            amps[k] = x;
            amps[k + 1] = y;
            norm2 += x * x + y * y;
        }
    }
    const double scale = 1.0 / std::sqrt(norm2);
    for (auto& a : amps) a *= scale;
    return StateVector(n_qubits, std::move(amps));
}

// ---------------------------------------------------------------------------

TwoQubitState two_qubit_state_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("dim") || !j.contains("re") || !j.contains("im")) {
        throw DomainError("state_file", "expected object with keys dim, re, im");
    }
    if (!j.at("dim").is_number_integer() || j.at("dim").get<int>() != 4) {
        throw DomainError("state_file", "dim must be 4");
    }
    auto read_block = [](const nlohmann::json& block, const char* name) {
        Eigen::Matrix4d m;
        if (!block.is_array() || block.size() != 4) {
            throw DomainError("state_file", std::string(name) + " must be a 4x4 array");
        }
        for (int r = 0; r < 4; ++r) {
            const auto& row = block.at(r);
            if (!row.is_array() || row.size() != 4) {
                throw DomainError("state_file", std::string(name) + " must be a 4x4 array");
            }
            for (int c = 0; c < 4; ++c) {
                if (!row.at(c).is_number()) throw DomainError("state_file", std::string(name) + " entries must be numbers");
                m(r, c) = row.at(c).get<double>();
            }
        }
        return m;
    };
    const Eigen::Matrix4d re = read_block(j.at("re"), "re");
    const Eigen::Matrix4d im = read_block(j.at("im"), "im");
    TwoQubitState::Matrix m;
    m.real() = re;
    m.imag() = im;
    return TwoQubitState(m);
}

nlohmann::json to_json(const TwoQubitState& rdm) {
    nlohmann::json re = nlohmann::json::array();
    nlohmann::json im = nlohmann::json::array();
    for (int r = 0; r < 4; ++r) {
        nlohmann::json rr = nlohmann::json::array();
        nlohmann::json ri = nlohmann::json::array();
        for (int c = 0; c < 4; ++c) {
            rr.push_back(rdm.matrix()(r, c).real());
            ri.push_back(rdm.matrix()(r, c).imag());
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ri));
    }
    return {{"dim", 4}, {"re", std::move(re)}, {"im", std::move(im)}};
}

}  // namespace bellmono::qstate

namespace bellmono::qstate {

TwoQubitState random_mixed_pair_state(std::uint64_t seed, std::uint64_t sample_index) {
    CounterRng rng(seed ^ 0x6d69786564ULL, sample_index);
    const int components = 1 + static_cast<int>(rng.next_u64() % 4);
    TwoQubitState::Matrix rho = TwoQubitState::Matrix::Zero();
    double total = 0.0;
    for (int c = 0; c < components; ++c) {
        const double w = rng.next_uniform();
        const StateVector psi = random_pure_state(2, {EnsembleKind::ComplexHaar, rng.next_u64()}, sample_index);
        Eigen::Vector4cd v;
        for (int k = 0; k < 4; ++k) v(k) = psi[static_cast<std::size_t>(k)];
        rho += w * v * v.adjoint();
        total += w;
    }
    rho /= total;
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return TwoQubitState(rho);
}

}  // namespace bellmono::qstate
