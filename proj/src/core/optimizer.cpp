#include "core/optimizer.hpp"

#include <string>

#include "core/errors.hpp"

namespace gradcode {

NagState nag_step(const NagState &state, const Eigen::VectorXd &gradient, double eta, double mu) {
    if (gradient.size() != state.beta.size())
        throw ArgumentError("nag_step: gradient dimension mismatch");
    if (!gradient.allFinite())
        throw NumericalError("nag_step: non-finite gradient at iteration " +
                                 std::to_string(state.iteration),
                             0.0);
    NagState next;
    next.aux = state.beta - eta * gradient;
    next.beta = next.aux + mu * (next.aux - state.aux);
    next.iteration = state.iteration + 1;
    if (!next.beta.allFinite() || next.beta.lpNorm<Eigen::Infinity>() > 1e12)
        throw NumericalError("nag_step: parameters diverged at iteration " +
                                 std::to_string(next.iteration),
                             next.beta.lpNorm<Eigen::Infinity>());
    return next;
}

}  // namespace gradcode
