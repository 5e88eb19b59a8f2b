#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bellmono/chsh.hpp"
#include "bellmono/counter_rng.hpp"
#include "bellmono/error.hpp"
#include "bellmono/sym3_eigen.hpp"

using namespace bellmono;
using namespace bellmono::chsh;
using qstate::EnsembleKind;

namespace {

const double kSqrt2 = std::sqrt(2.0);

Eigen::Vector3d random_unit(CounterRng& rng) {
    const auto [x, y] = rng.next_normal_pair();
    const auto [z, w] = rng.next_normal_pair();
    (void)w;
    return Eigen::Vector3d(x, y, z).normalized();
}

}  // namespace

TEST_CASE("symmetric 3x3 eigenvalues: closed form, Jacobi and Eigen agree") {
    CounterRng rng(3, 0);
    for (int k = 0; k < 2000; ++k) {
        Eigen::Matrix3d a;
        for (int r = 0; r < 3; ++r)
            for (int c = r; c < 3; ++c) a(r, c) = a(c, r) = 2.0 * rng.next_uniform() - 1.0;
        const auto closed = symmetric3_eigenvalues(a);
        const auto jacobi = symmetric3_eigenvalues_jacobi(a);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(a);
        for (int i = 0; i < 3; ++i) {
            CHECK(closed[i] == doctest::Approx(es.eigenvalues()(2 - i)).epsilon(1e-9).scale(1.0));
            CHECK(jacobi[i] == doctest::Approx(es.eigenvalues()(2 - i)).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("symmetric 3x3 eigenvalues on degenerate spectra") {
    CHECK(symmetric3_eigenvalues(Eigen::Matrix3d::Identity())[2] == doctest::Approx(1.0));
    const auto e = symmetric3_eigenvalues(Eigen::Vector3d(0.5, 0.5, 0.2).asDiagonal());
    CHECK(e[0] == doctest::Approx(0.5));
    CHECK(e[1] == doctest::Approx(0.5));
    CHECK(e[2] == doctest::Approx(0.2));
    // Rotated doubly-degenerate matrix.
    const Eigen::Matrix3d q = Eigen::AngleAxisd(0.7, Eigen::Vector3d(1, 2, 3).normalized()).toRotationMatrix();
    const Eigen::Matrix3d m = q * Eigen::Vector3d(0.9, 0.1, 0.1).asDiagonal() * q.transpose();
    const auto f = symmetric3_eigenvalues(m);
    CHECK(f[0] == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(f[1] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(f[2] == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("horodecki_max closed-form examples") {
    auto v = horodecki_max(CorrelationMatrix::diagonal(-1, -1, -1));
    CHECK(v.value == doctest::Approx(2.0 * kSqrt2).epsilon(1e-14));
    CHECK(*v.u == doctest::Approx(1.0));
    CHECK(*v.u_prime == doctest::Approx(1.0));
    CHECK_FALSE(v.setting.has_value());

    v = horodecki_max(CorrelationMatrix::diagonal(0, 0, 1));
    CHECK(v.value == doctest::Approx(2.0));
    CHECK(*v.u_prime == doctest::Approx(0.0));

    // Werner p = 0.8: T = diag(-0.8, -0.8, -0.8); the oracle search on the
    // explicit 4x4 state is the independent check.
    v = horodecki_max(CorrelationMatrix::diagonal(-0.8, -0.8, -0.8));
    CHECK(v.value == doctest::Approx(1.6 * kSqrt2).epsilon(1e-14));
    const auto werner_t = qstate::correlation_matrix(qstate::TwoQubitState::werner(0.8));
    CHECK(std::abs(oracle_max(werner_t).value - 2.262741699796952) < 1e-6);
    CHECK(std::abs(v.value - 2.262741699796952) < 1e-12);
}

TEST_CASE("bell_expectation") {
    const auto singlet = CorrelationMatrix::diagonal(-1, -1, -1);
    BellSetting s{Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0), -Eigen::Vector3d(1, 1, 0) / kSqrt2,
                  Eigen::Vector3d(-1, 1, 0) / kSqrt2};
    CHECK(bell_expectation(singlet, s) == doctest::Approx(2.0 * kSqrt2).epsilon(1e-14));

    CounterRng rng(9, 0);
    for (int k = 0; k < 100; ++k) {
        const auto t = qstate::correlation_matrix(qstate::random_mixed_pair_state(1, k));
        BellSetting same{random_unit(rng), random_unit(rng), random_unit(rng), Eigen::Vector3d::Zero()};
        same.b_prime = same.b;
        const double e = bell_expectation(t, same);
        CHECK(e == doctest::Approx(same.a.dot(t.t() * (2.0 * same.b))).epsilon(1e-12));
        CHECK(std::abs(e) <= 2.0 + 1e-12);
    }

    const auto zero = CorrelationMatrix::diagonal(0, 0, 0);
    const BellSetting any{random_unit(rng), random_unit(rng), random_unit(rng), random_unit(rng)};
    CHECK(bell_expectation(zero, any) == 0.0);

    BellSetting bad = any;
    bad.a *= 1.01;
    CHECK_THROWS_AS(bell_expectation(zero, bad), DomainError);
}

TEST_CASE("oracle_max matches Tsirelson and classical limits") {
    auto v = oracle_max(CorrelationMatrix::diagonal(-1, -1, -1));
    CHECK(std::abs(v.value - 2.0 * kSqrt2) < 1e-6);
    REQUIRE(v.setting.has_value());
    CHECK(bell_expectation(CorrelationMatrix::diagonal(-1, -1, -1), *v.setting) == doctest::Approx(v.value));
    v = oracle_max(CorrelationMatrix::diagonal(0, 0, 1));
    CHECK(std::abs(v.value - 2.0) < 1e-6);
    CHECK_FALSE(v.u.has_value());
    CHECK_THROWS_AS(oracle_max(CorrelationMatrix::diagonal(0, 0, 1), {.restarts = 0}), DomainError);
    CHECK_THROWS_AS(oracle_max(CorrelationMatrix::diagonal(0, 0, 1), {.tol = 0.0}), DomainError);
}

TEST_CASE("oracle_max agrees with the closed form on random mixed states") {
    for (int k = 0; k < 100; ++k) {
        const auto t = qstate::correlation_matrix(qstate::random_mixed_pair_state(2024, k));
        const double closed = horodecki_max(t).value;
        const auto found = oracle_max(t, {.seed = static_cast<std::uint64_t>(k)});
        CHECK(std::abs(found.value - closed) <= 1e-5);
        CHECK(found.converged);
    }
}

TEST_CASE("oracle_max flags a hit iteration cap") {
    const auto t = qstate::correlation_matrix(qstate::random_mixed_pair_state(5, 3));
    const auto v = oracle_max(t, {.restarts = 1, .tol = 1e-300, .max_iterations = 1});
    CHECK_FALSE(v.converged);
    CHECK(v.value <= horodecki_max(t).value + 1e-9);
}

TEST_CASE("no setting beats the closed form, and transposition is a symmetry") {
    CounterRng rng(77, 1);
    for (int k = 0; k < 300; ++k) {
        const auto t = qstate::correlation_matrix(qstate::random_mixed_pair_state(8, k));
        const double closed = horodecki_max(t).value;
        CHECK(closed <= kTsirelson + 1e-9);
        CHECK(std::abs(horodecki_max(t.transposed()).value - closed) <= 1e-12);
        for (int r = 0; r < 10; ++r) {
            const BellSetting s{random_unit(rng), random_unit(rng), random_unit(rng), random_unit(rng)};
            CHECK(bell_expectation(t, s) <= closed + 1e-9);
        }
    }
}

TEST_CASE("heisenberg_bell") {
    CHECK(heisenberg_bell(-1.0).value == doctest::Approx(2.0 * kSqrt2));
    CHECK(heisenberg_bell(0.0).value == 0.0);
    const auto v = heisenberg_bell(-2.0 / 3.0);
    CHECK(v.value == doctest::Approx(4.0 * kSqrt2 / 3.0).epsilon(1e-14));
    CHECK(std::abs(v.value - 1.885618083164127) < 1e-12);
    CHECK(*v.u == doctest::Approx(4.0 / 9.0));
    // Same answer through the general criterion on the isotropic matrix.
    CHECK(horodecki_max(CorrelationMatrix::diagonal(-2.0 / 3, -2.0 / 3, -2.0 / 3)).value ==
          doctest::Approx(v.value).epsilon(1e-14));
    CHECK_THROWS_AS(heisenberg_bell(1.1), DomainError);
}

TEST_CASE("monogamy_triple on named states") {
    auto r = monogamy_triple(qstate::ghz_state(3), 0);
    REQUIRE(r.pair_values.size() == 2);
    CHECK(r.pair_values[0].first == "1,2");
    CHECK(r.pair_values[1].first == "1,3");
    CHECK(r.pair_values[0].second == doctest::Approx(4.0));
    CHECK(r.sum == doctest::Approx(8.0));
    CHECK(std::abs(r.slack) < 1e-12);
    CHECK(r.satisfied);

    r = monogamy_triple(qstate::w_state(3), 0);
    CHECK(r.pair_values[0].second == doctest::Approx(32.0 / 9.0).epsilon(1e-13));
    CHECK(r.pair_values[1].second == doctest::Approx(32.0 / 9.0).epsilon(1e-13));
    CHECK(r.sum == doctest::Approx(64.0 / 9.0));
    CHECK(r.satisfied);

    r = monogamy_triple(qstate::basis_state(3, 0), 0);
    CHECK(r.sum == doctest::Approx(8.0));
    CHECK(std::abs(r.slack) < 1e-12);

    CHECK_THROWS_AS(monogamy_triple(qstate::ghz_state(4), 0), DomainError);
    CHECK_THROWS_AS(monogamy_triple(qstate::ghz_state(3), 3), DomainError);
}

TEST_CASE("bell_sum on named states") {
    for (int n = 3; n <= 8; ++n) {
        auto r = bell_sum(qstate::basis_state(n, 0), 0);
        CHECK(r.sum == doctest::Approx(4.0 * (n - 1)).epsilon(1e-14));
        CHECK(r.bound == 4.0 * (n - 1));
        CHECK(std::abs(r.slack) < 1e-12);
        r = bell_sum(qstate::ghz_state(n), n - 1);
        CHECK(r.sum == doctest::Approx(4.0 * (n - 1)).epsilon(1e-14));
        CHECK(r.satisfied);
    }
    const auto s = qstate::tensor(qstate::singlet_state(), qstate::basis_state(1, 0));
    const auto r = bell_sum(s, 0);
    CHECK(r.pair_values[0].second == doctest::Approx(8.0));
    CHECK(r.pair_values[1].second == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(r.sum <= 8.0 + 1e-9);
    CHECK_THROWS_AS(bell_sum(qstate::singlet_state(), 0), DomainError);
}

TEST_CASE("monogamy holds on random states") {
    for (const auto kind : {EnsembleKind::ComplexHaar, EnsembleKind::RealOrthogonal}) {
        for (std::uint64_t k = 0; k < 5000; ++k) {
            const auto s3 = qstate::random_pure_state(3, {kind, 31}, k);
            CHECK(monogamy_triple(s3, static_cast<int>(k % 3)).satisfied);
            const int n = 3 + static_cast<int>(k % 4);
            CHECK(bell_sum(qstate::random_pure_state(n, {kind, 37}, k), 0).satisfied);
        }
    }
}

TEST_CASE("real_tripartite_max") {
    // All three y-y correlators of GHZ vanish, so the radicand is 1.
    const auto ghz = qstate::ghz_state(3);
    CHECK(qstate::pauli_pair_expectation(ghz, PauliAxis::Y, 0, PauliAxis::Y, 1) == doctest::Approx(0.0));
    CHECK(qstate::pauli_pair_expectation(ghz, PauliAxis::Y, 0, PauliAxis::Y, 2) == doctest::Approx(0.0));
    CHECK(qstate::pauli_pair_expectation(ghz, PauliAxis::Y, 1, PauliAxis::Y, 2) == doctest::Approx(0.0));
    CHECK(real_tripartite_max(ghz, 0, 1) == doctest::Approx(2.0));
    CHECK(horodecki_max(qstate::correlation_matrix(qstate::partial_trace_pair(ghz, 0, 1))).value ==
          doctest::Approx(2.0));

    const auto s = qstate::tensor(qstate::singlet_state(), qstate::basis_state(1, 0));
    CHECK(real_tripartite_max(s, 0, 1) == doctest::Approx(2.0 * kSqrt2));

    CHECK_THROWS_AS(real_tripartite_max(qstate::random_pure_state(3, {EnsembleKind::ComplexHaar, 1}, 0), 0, 1),
                    DomainError);
    CHECK_THROWS_AS(real_tripartite_max(ghz, 1, 1), DomainError);
    CHECK_THROWS_AS(real_tripartite_max(qstate::ghz_state(4), 0, 1), DomainError);
}

TEST_CASE("real_tripartite_max is the real-observable maximum on real states") {
    // The closed form matches directions restricted to the x-z plane. The
    // unrestricted criterion can be larger: y-y correlations are invisible
    // to real observables but not to the full maximization.
    int strictly_below = 0;
    for (std::uint64_t k = 0; k < 10000; ++k) {
        const auto s = qstate::random_pure_state(3, {EnsembleKind::RealOrthogonal, 4242}, k);
        for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
            const auto t = qstate::correlation_matrix(qstate::partial_trace_pair(s, i, j));
            const double closed = real_tripartite_max(s, i, j);
            CHECK(std::abs(closed - real_plane_max(t).value) <= 1e-9);
            const auto general = horodecki_max(t);
            CHECK(closed <= general.value + 1e-9);
            // Equality exactly when t_yy^2 does not enter the two largest eigenvalues of T^T T.
            const double tyy2 = t(PauliAxis::Y, PauliAxis::Y) * t(PauliAxis::Y, PauliAxis::Y);
            const auto plane = real_plane_max(t);
            if (tyy2 <= *plane.u_prime - 1e-9) {
                CHECK(std::abs(closed - general.value) <= 1e-9);
            } else if (tyy2 > *plane.u_prime + 1e-9) {
                CHECK(closed < general.value);
                ++strictly_below;
            }
        }
    }
    // Counterexamples to equality with the unrestricted maximum are common.
    CHECK(strictly_below > 1000);
}

TEST_CASE("real_plane_max on named correlation matrices") {
    CHECK(real_plane_max(CorrelationMatrix::diagonal(-1, -1, -1)).value == doctest::Approx(2.0 * kSqrt2));
    // Only t_yy: the plane sees nothing.
    CHECK(real_plane_max(CorrelationMatrix::diagonal(0, 1, 0)).value == doctest::Approx(0.0).scale(1.0));
    const auto v = real_plane_max(CorrelationMatrix::diagonal(0.6, 0.9, 0.3));
    CHECK(*v.u == doctest::Approx(0.36));
    CHECK(*v.u_prime == doctest::Approx(0.09));
}

TEST_CASE("concurrence") {
    CHECK(concurrence(qstate::TwoQubitState::singlet()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(concurrence(qstate::TwoQubitState::product_zero()) == doctest::Approx(0.0).scale(1.0));
    CHECK(concurrence(qstate::TwoQubitState::werner(0.8)) == doctest::Approx(0.7).epsilon(1e-12));
    // Werner family: C = max(0, (3p - 1)/2).
    for (int k = 0; k <= 20; ++k) {
        const double p = k / 20.0;
        CHECK(concurrence(qstate::TwoQubitState::werner(p)) ==
              doctest::Approx(std::max(0.0, (3.0 * p - 1.0) / 2.0)).scale(1.0).epsilon(1e-10));
    }
    // Pure states: C = 2|ad - bc| for a|00> + b|01> + c|10> + d|11>.
    for (std::uint64_t k = 0; k < 100; ++k) {
        const auto s = qstate::random_pure_state(2, {EnsembleKind::ComplexHaar, 8}, k);
        const auto rdm = qstate::partial_trace_pair(s, 0, 1);
        const auto& m = rdm.matrix();
        // Recover amplitudes up to phase from rank-one rho through column 0 or 1.
        const int col = std::abs(m(0, 0)) > 1e-3 ? 0 : 1;
        Eigen::Vector4cd psi = m.col(col) / std::sqrt(m(col, col).real());
        const double expected = 2.0 * std::abs(psi(0) * psi(3) - psi(1) * psi(2));
        // Three near-zero eigenvalues pass through sqrt, so ~1e-8 absolute is the floor.
        CHECK(std::abs(concurrence(rdm) - expected) < 1e-7);
    }
}

TEST_CASE("entangled yet local: concurrence above 0.3 without CHSH violation") {
    const auto w = qstate::TwoQubitState::werner(0.6);
    CHECK(concurrence(w) > 0.3);
    CHECK(horodecki_max(qstate::correlation_matrix(w)).value <= 2.0);
}

TEST_CASE("checked_sqrt clamps rounding residue only") {
    CHECK(checked_sqrt(-1e-11, "t") == 0.0);
    CHECK(checked_sqrt(4.0, "t") == 2.0);
    CHECK_THROWS_AS(checked_sqrt(-1e-6, "t"), DomainError);
}

TEST_CASE("BellValue JSON report") {
    const auto j = to_json(oracle_max(CorrelationMatrix::diagonal(-1, -1, -1)));
    CHECK(j.contains("value"));
    CHECK(j["u"].is_null());
    CHECK(j["setting"]["a"].size() == 3);
    const auto h = to_json(horodecki_max(CorrelationMatrix::diagonal(0, 0, 1)));
    CHECK(h["setting"].is_null());
    CHECK(h["u"].get<double>() == doctest::Approx(1.0));
}
