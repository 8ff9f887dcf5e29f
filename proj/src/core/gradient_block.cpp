#include "core/gradient_block.hpp"

#include "core/errors.hpp"

namespace gradcode {

Eigen::MatrixXd interleave_gradients(const std::vector<Eigen::VectorXd> &gradients, int m) {
    if (gradients.empty()) throw ArgumentError("interleave: no gradients");
    const Eigen::Index dim = gradients.front().size();
    if (m < 1 || dim % m != 0) throw ArgumentError("interleave: m must divide the gradient dimension");
    const Eigen::Index k = static_cast<Eigen::Index>(gradients.size());
    const Eigen::Index slices = dim / m;
    Eigen::MatrixXd z(slices, m * k);
    for (Eigen::Index j = 0; j < k; ++j) {
        const Eigen::VectorXd &g = gradients[static_cast<std::size_t>(j)];
        if (g.size() != dim) throw ArgumentError("interleave: inconsistent gradient dimensions");
        for (Eigen::Index v = 0; v < slices; ++v)
            z.row(v).segment(j * m, m) = g.segment(v * m, m).transpose();
    }
    return z;
}

std::vector<Eigen::VectorXd> deinterleave_gradients(const Eigen::MatrixXd &z, int m) {
    if (m < 1 || z.cols() % m != 0) throw ArgumentError("deinterleave: m must divide the column count");
    const Eigen::Index k = z.cols() / m;
    const Eigen::Index slices = z.rows();
    std::vector<Eigen::VectorXd> gradients(static_cast<std::size_t>(k));
    for (Eigen::Index j = 0; j < k; ++j) {
        Eigen::VectorXd g(slices * m);
        for (Eigen::Index v = 0; v < slices; ++v)
            g.segment(v * m, m) = z.row(v).segment(j * m, m).transpose();
        gradients[static_cast<std::size_t>(j)] = std::move(g);
    }
    return gradients;
}

}  // namespace gradcode
