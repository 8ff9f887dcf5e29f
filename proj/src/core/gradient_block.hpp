#pragma once

#include <Eigen/Dense>
#include <vector>

namespace gradcode {

// The interleaved layout couples vector components with workers: row v of the
// (dim/m) x (m k) matrix Z concatenates, for every subset j, the m-slice
// (g_j(vm), ..., g_j(vm+m-1)). Encoding a worker is then Z * B * V_col and
// decoding recovers the column sums Z * B * e.

/// All k gradients (each of length dim, with m | dim) -> Z.
Eigen::MatrixXd interleave_gradients(const std::vector<Eigen::VectorXd> &gradients, int m);

/// Inverse of interleave_gradients; exact round trip.
std::vector<Eigen::VectorXd> deinterleave_gradients(const Eigen::MatrixXd &z, int m);

}  // namespace gradcode
