#pragma once

#include <array>

#include <Eigen/Dense>

namespace bellmono {

// Eigenvalues of a real symmetric 3x3 matrix, sorted descending.
// Closed-form trigonometric solution of the characteristic cubic; falls back
// to cyclic Jacobi rotations when the cubic discriminant is below 1e-14.
std::array<double, 3> symmetric3_eigenvalues(const Eigen::Matrix3d& a);

// Cyclic Jacobi sweep, exposed for tests. Sorted descending.
std::array<double, 3> symmetric3_eigenvalues_jacobi(const Eigen::Matrix3d& a);

}  // namespace bellmono
