#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "bellmono/pauli.hpp"

namespace bellmono::qstate {

using Amplitude = std::complex<double>;

inline constexpr double kNormTolerance = 1e-10;
inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kTraceTolerance = 1e-12;
inline constexpr double kPsdTolerance = -1e-10;

// Pure N-qubit state. Basis index bit k holds qubit k (qubit 0 least
// significant); qubit indices are 0-based.
class StateVector {
public:
    // Throws DomainError unless amplitudes.size() == 2^n_qubits and the
    // vector has unit norm.
    StateVector(int n_qubits, std::vector<Amplitude> amplitudes);

    int n_qubits() const noexcept { return n_qubits_; }
    std::size_t dim() const noexcept { return amplitudes_.size(); }
    std::span<const Amplitude> amplitudes() const noexcept { return amplitudes_; }
    const Amplitude& operator[](std::size_t k) const { return amplitudes_[k]; }

    bool is_real(double tol = 1e-12) const noexcept;

private:
    int n_qubits_;
    std::vector<Amplitude> amplitudes_;
};

struct NormalizedState {
    StateVector state;
    double norm_factor;  // multiplier applied to the raw amplitudes
};

NormalizedState make_state(int n_qubits, std::span<const Amplitude> amplitudes);

StateVector basis_state(int n_qubits, std::uint64_t index);
StateVector ghz_state(int n_qubits);
StateVector w_state(int n_qubits);
// (|01> - |10>)/sqrt(2) on qubits (0, 1).
StateVector singlet_state();
// Qubits of `low` keep their indices; qubits of `high` are shifted up.
StateVector tensor(const StateVector& low, const StateVector& high);

// Two-qubit density operator. Row/column index is 2*a + b where a is the
// state of the first factor and b of the second.
class TwoQubitState {
public:
    using Matrix = Eigen::Matrix4cd;

    // Validates hermiticity, unit trace and positive semidefiniteness.
    explicit TwoQubitState(const Matrix& matrix,
                           std::optional<std::pair<int, int>> source_pair = std::nullopt);

    const Matrix& matrix() const noexcept { return matrix_; }
    const std::optional<std::pair<int, int>>& source_pair() const noexcept { return source_pair_; }

    Eigen::Matrix2cd first_marginal() const;
    Eigen::Matrix2cd second_marginal() const;

    // Smallest eigenvalue; used by the PSD invariant and by tests.
    double min_eigenvalue() const;

    static TwoQubitState singlet();
    static TwoQubitState product_zero();
    // p |Psi-><Psi-| + (1 - p) I/4
    static TwoQubitState werner(double p);

private:
    struct Trusted {};
    TwoQubitState(const Matrix& matrix, std::pair<int, int> source_pair, Trusted);

    friend TwoQubitState partial_trace_pair(const StateVector&, int, int);

    Matrix matrix_;
    std::optional<std::pair<int, int>> source_pair_;
};

// Reduced state of qubits (i, j), qubit i as the first tensor factor.
TwoQubitState partial_trace_pair(const StateVector& state, int i, int j);

// <psi| sigma_u(i) sigma_v(j) |psi> evaluated directly on the amplitudes.
double pauli_pair_expectation(const StateVector& state, PauliAxis u, int i, PauliAxis v, int j);

// Real 3x3 matrix t(u, v) = Tr(rho sigma_u (x) sigma_v), axes ordered x, y, z.
class CorrelationMatrix {
public:
    // Entries must lie in [-1, 1] up to 1e-12.
    explicit CorrelationMatrix(const Eigen::Matrix3d& t);

    const Eigen::Matrix3d& t() const noexcept { return t_; }
    double operator()(PauliAxis u, PauliAxis v) const {
        return t_(static_cast<int>(u), static_cast<int>(v));
    }
    CorrelationMatrix transposed() const { return CorrelationMatrix(t_.transpose()); }

    static CorrelationMatrix diagonal(double xx, double yy, double zz);

private:
    Eigen::Matrix3d t_;
};

CorrelationMatrix correlation_matrix(const TwoQubitState& rdm);

enum class EnsembleKind { ComplexHaar, RealOrthogonal };

struct RandomEnsemble {
    EnsembleKind kind = EnsembleKind::ComplexHaar;
    std::uint64_t seed = 0;
};

std::string_view to_string(EnsembleKind kind) noexcept;
// Accepts "complex" / "complex-haar" and "real" / "real-orthogonal".
EnsembleKind parse_ensemble(std::string_view name);

// Pure function of (ensemble, sample_index).
StateVector random_pure_state(int n_qubits, const RandomEnsemble& ensemble, std::uint64_t sample_index);

// {"dim": 4, "re": [[...]], "im": [[...]]}, row-major.
TwoQubitState two_qubit_state_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TwoQubitState& rdm);

}  // namespace bellmono::qstate

namespace bellmono::qstate {

// Mixture of 1-4 random complex pure two-qubit states with random weights;
// a pure function of (seed, sample_index). Used by the oracle checks.
TwoQubitState random_mixed_pair_state(std::uint64_t seed, std::uint64_t sample_index);

}  // namespace bellmono::qstate
