#pragma once

#include <Eigen/Dense>

namespace gradcode {

/// Nesterov accelerated gradient state. `aux` is the auxiliary sequence y_t;
/// both start equal to the initial parameters.
struct NagState {
    Eigen::VectorXd beta;
    Eigen::VectorXd aux;
    int iteration = 0;

    static NagState init(const Eigen::VectorXd &beta0) { return {beta0, beta0, 0}; }
};

/// One NAG update with the gradient evaluated at beta_t:
///   y_{t+1} = beta_t - eta g_t
///   beta_{t+1} = y_{t+1} + mu (y_{t+1} - y_t)
/// mu = 0 reduces to plain gradient descent. Throws NumericalError on
/// non-finite inputs or when ||beta|| runs past 1e12 (divergence).
NagState nag_step(const NagState &state, const Eigen::VectorXd &gradient, double eta, double mu);

}  // namespace gradcode
