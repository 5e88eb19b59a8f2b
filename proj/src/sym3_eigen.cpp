#include "bellmono/sym3_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

namespace bellmono {

namespace {
constexpr double kDegenerateDiscriminant = 1e-14;

std::array<double, 3> sorted_desc(std::array<double, 3> e) {
    std::sort(e.begin(), e.end(), std::greater<>());
    return e;
}
}  // namespace

std::array<double, 3> symmetric3_eigenvalues_jacobi(const Eigen::Matrix3d& a) {
    Eigen::Matrix3d m = 0.5 * (a + a.transpose());
    for (int sweep = 0; sweep < 64; ++sweep) {
        const double off = m(0, 1) * m(0, 1) + m(0, 2) * m(0, 2) + m(1, 2) * m(1, 2);
        if (off < 1e-300) break;
        for (int p = 0; p < 2; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                const double apq = m(p, q);
                if (apq == 0.0) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
                rot(p, p) = c;
                rot(q, q) = c;
                rot(p, q) = s;
                rot(q, p) = -s;
                m = rot.transpose() * m * rot;
                m(p, q) = m(q, p) = 0.0;
            }
        }
    }
    return sorted_desc({m(0, 0), m(1, 1), m(2, 2)});
}

std::array<double, 3> symmetric3_eigenvalues(const Eigen::Matrix3d& a) {
    const double q = a.trace() / 3.0;
    const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
    const double d0 = a(0, 0) - q, d1 = a(1, 1) - q, d2 = a(2, 2) - q;
    const double p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    if (p == 0.0) return {q, q, q};

    const Eigen::Matrix3d b = (a - q * Eigen::Matrix3d::Identity()) / p;
    const double r = std::clamp(b.determinant() / 2.0, -1.0, 1.0);
    // Discriminant of the characteristic cubic: 108 p^6 (1 - r^2).
    const double p3 = p2 / 6.0 * p;
    const double disc = 108.0 * p3 * p3 * (1.0 - r * r);
    if (std::abs(disc) < kDegenerateDiscriminant) return symmetric3_eigenvalues_jacobi(a);

    const double phi = std::acos(r) / 3.0;
    const double e1 = q + 2.0 * p * std::cos(phi);
    const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
    const double e2 = 3.0 * q - e1 - e3;
    return sorted_desc({e1, e2, e3});
}

}  // namespace bellmono
