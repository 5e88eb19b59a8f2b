#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "bellmono/qstate.hpp"

namespace bellmono::chsh {

using qstate::CorrelationMatrix;
using qstate::StateVector;
using qstate::TwoQubitState;

inline constexpr double kTsirelson = 2.8284271247461903;  // 2 sqrt(2)
inline constexpr double kRadicandTolerance = 1e-10;
inline constexpr double kMonogamyTolerance = 1e-9;

// Measurement directions a, a' (first qubit) and b, b' (second qubit).
struct BellSetting {
    Eigen::Vector3d a, a_prime, b, b_prime;

    // Throws DomainError when any direction is not a unit vector within 1e-12.
    void validate() const;
};

struct BellValue {
    double value = 0.0;
    // Two largest eigenvalues of T^T T; absent when the value did not come
    // from the eigenvalue route.
    std::optional<double> u, u_prime;
    std::optional<BellSetting> setting;
    // oracle_max only: false when the iteration cap was hit.
    bool converged = true;

    // 4 (u + u'), the squared Bell value without a rounding step.
    double squared() const { return u && u_prime ? 4.0 * (*u + *u_prime) : value * value; }
};

struct MonogamyReport {
    std::vector<std::pair<std::string, double>> pair_values;  // ("1,2", B^2), 1-based labels
    double sum = 0.0;
    double bound = 0.0;
    bool satisfied = true;
    double slack = 0.0;  // bound - sum
};

// sqrt of a radicand that may carry rounding residue. Values in
// [-1e-10, 0) clamp to zero; anything more negative is a DomainError.
double checked_sqrt(double radicand, const char* what);

BellValue horodecki_max(const CorrelationMatrix& t);

double bell_expectation(const CorrelationMatrix& t, const BellSetting& s);

struct OracleOptions {
    int restarts = 16;
    double tol = 1e-9;
    int max_iterations = 500;
    std::uint64_t seed = 0x5eed;
};

// Direction search by alternating exact half-step maximizations; never
// touches the eigenvalues of T^T T.
BellValue oracle_max(const CorrelationMatrix& t, const OracleOptions& options = {});

BellValue heisenberg_bell(double tzz);

MonogamyReport monogamy_triple(const StateVector& state, int pivot);
MonogamyReport bell_sum(const StateVector& state, int pivot);

// 2 sqrt(1 + <y_i y_j>^2 - <y_i y_k>^2 - <y_j y_k>^2) for real 3-qubit states.
double real_tripartite_max(const StateVector& state, int i, int j);

// Maximum over measurement directions confined to the x-z plane (real
// observables): 2 sqrt of the squared Frobenius norm of the x-z block of T.
// u, u' are the squared singular values of that block.
BellValue real_plane_max(const CorrelationMatrix& t);

double concurrence(const TwoQubitState& rdm);

nlohmann::json to_json(const BellValue& v);

}  // namespace bellmono::chsh
