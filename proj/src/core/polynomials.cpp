#include "core/polynomials.hpp"

#include <string>

#include "core/cyclic.hpp"
#include "core/errors.hpp"

namespace gradcode {

double poly_eval(const Eigen::VectorXd &coeffs, double x) {
    double acc = 0.0;
    for (Eigen::Index j = coeffs.size() - 1; j >= 0; --j) acc = acc * x + coeffs[j];
    return acc;
}

void check_distinct_theta(const std::vector<double> &theta) {
    for (std::size_t i = 0; i < theta.size(); ++i)
        for (std::size_t j = i + 1; j < theta.size(); ++j)
            if (theta[i] == theta[j])
                throw ConstructionError("evaluation points must be pairwise distinct (theta[" +
                                        std::to_string(i) + "] == theta[" + std::to_string(j) +
                                        "])");
}

std::vector<Eigen::VectorXd> base_polynomials(const std::vector<double> &theta, int n, int d) {
    if (static_cast<int>(theta.size()) != n)
        throw ArgumentError("base_polynomials: need exactly n evaluation points");
    check_distinct_theta(theta);
    std::vector<Eigen::VectorXd> polys;
    polys.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
        Eigen::VectorXd p = Eigen::VectorXd::Zero(n - d + 1);
        p[0] = 1.0;  // empty product
        int degree = 0;
        for (int j = 1; j <= n - d; ++j) {
            const double root = theta[static_cast<std::size_t>(cyclic_add(i, j, n) - 1)];
            // multiply by (x - root)
            for (int c = degree + 1; c >= 1; --c) p[c] = p[c - 1] - root * p[c];
            p[0] = -root * p[0];
            ++degree;
        }
        polys.push_back(std::move(p));
    }
    return polys;
}

Eigen::MatrixXd recursive_extend(const Eigen::VectorXd &base, int m, int width) {
    const int deg = static_cast<int>(base.size()) - 1;  // n - d
    if (m < 1) throw ArgumentError("recursive_extend: m must be positive");
    if (width < deg + m) throw ArgumentError("recursive_extend: width too small for degree n-d+m-1");
    Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(m, width);
    rows.row(0).head(deg + 1) = base.transpose();
    for (int u = 1; u < m; ++u) {
        // x * p^(u-1)
        for (int j = width - 1; j >= 1; --j) rows(u, j) = rows(u - 1, j - 1);
        rows(u, 0) = 0.0;
        // minus p^(u-1)[deg-1] * p^(1); the coefficient below p's leading term
        // is zero for the empty product (deg == 0), where p^(u) = x^(u).
        const double factor = deg >= 1 ? rows(u - 1, deg - 1) : 0.0;
        if (factor != 0.0) rows.row(u).head(deg + 1) -= factor * rows.row(0).head(deg + 1);
    }
    return rows;
}

Eigen::MatrixXd build_matrix_b_naive(const std::vector<double> &theta, const CodingParams &params) {
    const int n = params.n, d = params.d, m = params.m;
    const int width = params.n - params.s;
    const auto polys = base_polynomials(theta, n, d);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m) * n, width);
    for (int i = 0; i < n; ++i)
        b.middleRows(static_cast<Eigen::Index>(i) * m, m) =
            recursive_extend(polys[static_cast<std::size_t>(i)], m, width);
    return b;
}

Eigen::MatrixXd build_matrix_b_alg1(const std::vector<double> &theta, const CodingParams &params) {
    const int n = params.n, d = params.d, m = params.m;
    const int width = params.n - params.s;
    const auto polys = base_polynomials(theta, n, d);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m) * n, width);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= n - d; ++j) b(static_cast<Eigen::Index>(i) * m, j) = polys[static_cast<std::size_t>(i)][j];
    for (int u = 2; u <= m; ++u) {
        for (int i = 0; i < n; ++i) {
            const Eigen::Index row = static_cast<Eigen::Index>(i) * m + (u - 1);
            const Eigen::Index base = static_cast<Eigen::Index>(i) * m;
            for (int j = n - d + u - 1; j >= 1; --j) b(row, j) = b(row - 1, j - 1);
            const double factor = b(row, n - d);
            for (int j = 0; j <= n - d; ++j) b(row, j) -= factor * b(base, j);
        }
    }
    return b;
}

Eigen::MatrixXd vandermonde_matrix(const std::vector<double> &theta, int rows) {
    const Eigen::Index n = static_cast<Eigen::Index>(theta.size());
    Eigen::MatrixXd v(rows, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double pw = 1.0;
        for (int r = 0; r < rows; ++r) {
            v(r, i) = pw;
            pw *= theta[static_cast<std::size_t>(i)];
        }
    }
    return v;
}

}  // namespace gradcode
