#pragma once

#include <Eigen/Dense>
#include <vector>

#include "core/params.hpp"

namespace gradcode {

// Polynomial coefficient vectors are ascending-power: coeffs[j] multiplies x^j.

/// Horner evaluation.
double poly_eval(const Eigen::VectorXd &coeffs, double x);

/// The n base polynomials p_i(x) = prod_{j=1..n-d} (x - theta_{i (+) j}).
/// Each is monic of degree n - d (coefficient vector of length n - d + 1);
/// p_i vanishes at the evaluation points of the n - d workers that do NOT
/// hold subset i. Throws ConstructionError on repeated points.
std::vector<Eigen::VectorXd> base_polynomials(const std::vector<double> &theta, int n, int d);

/// Extends one monic base polynomial to the m polynomials
///
///   p^(1) = p,   p^(u) = x p^(u-1) - p^(u-1)[n-d-1] p^(1)
///
/// returned as an m x width row matrix of coefficients (width >= n - d + m).
/// Row u-1 is monic of degree n - d + u - 1 and carries exact zeros at
/// positions n-d .. n-d+u-2 and above its leading term.
Eigen::MatrixXd recursive_extend(const Eigen::VectorXd &base, int m, int width);

/// The (m n) x (n - s) encoding matrix assembled directly from the recursion:
/// row (i-1)m + u holds the coefficients of p_i^(u).
Eigen::MatrixXd build_matrix_b_naive(const std::vector<double> &theta, const CodingParams &params);

/// Same matrix computed by the in-place shift-and-subtract algorithm.
/// Agrees with build_matrix_b_naive entrywise (identical arithmetic).
Eigen::MatrixXd build_matrix_b_alg1(const std::vector<double> &theta, const CodingParams &params);

/// The (rows) x n evaluation matrix V with V(r, i) = theta_i^r.
Eigen::MatrixXd vandermonde_matrix(const std::vector<double> &theta, int rows);

void check_distinct_theta(const std::vector<double> &theta);

}  // namespace gradcode
