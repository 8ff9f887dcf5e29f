#include "core/runtime_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace gradcode {

namespace {

constexpr double kQuadratureTarget = 1e-8;
constexpr double kTailThreshold = 1e-14;

void check_ranges(const RuntimeModel &model, int d, int s, int m) {
    if (d < 1 || d > model.n) throw ArgumentError("runtime model: d must be in [1, n]");
    if (m < 1 || m > d) throw ArgumentError("runtime model: m must be in [1, d]");
    if (s < 0 || s > model.n - 1) throw ArgumentError("runtime model: s must be in [0, n-1]");
}

/// Pr(at least s+1 of n exceed t) -- the survival function of the (n-s)th
/// order statistic.
class OrderStatSurvival {
public:
    OrderStatSurvival(const RuntimeModel &model, int d, int s, int m)
        : model_(model), d_(d), s_(s), m_(m), binom_(static_cast<std::size_t>(model.n - s)) {
        double c = 1.0;
        for (int j = 0; j < model.n - s; ++j) {
            binom_[static_cast<std::size_t>(j)] = c;
            c = c * (model.n - j) / (j + 1);
        }
    }

    double operator()(double t) const {
        const double f = worker_time_cdf(model_, t, d_, m_);
        const double g = 1.0 - f;
        double acc = 0.0;
        double fj = 1.0;  // f^j
        for (int j = 0; j < model_.n - s_; ++j) {
            acc += binom_[static_cast<std::size_t>(j)] * fj * std::pow(g, model_.n - j);
            fj *= f;
        }
        return acc;
    }

private:
    const RuntimeModel &model_;
    int d_, s_, m_;
    std::vector<double> binom_;
};

struct SimpsonState {
    double worst_interval_error = 0.0;
    bool converged = true;
};

double adaptive_simpson(const OrderStatSurvival &fn, double a, double b, double fa, double fm,
                        double fb, double whole, double tol, int depth, SimpsonState *state) {
    const double m1 = a + 0.25 * (b - a);
    const double m2 = a + 0.75 * (b - a);
    const double f1 = fn(m1);
    const double f2 = fn(m2);
    const double mid = 0.5 * (a + b);
    const double left = (mid - a) / 6.0 * (fa + 4.0 * f1 + fm);
    const double right = (b - mid) / 6.0 * (fm + 4.0 * f2 + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth <= 0) {
        state->converged = false;
        state->worst_interval_error = std::max(state->worst_interval_error, std::abs(delta) / 15.0);
        return left + right + delta / 15.0;
    }
    return adaptive_simpson(fn, a, mid, fa, f1, fm, left, 0.5 * tol, depth - 1, state) +
           adaptive_simpson(fn, mid, b, fm, f2, fb, right, 0.5 * tol, depth - 1, state);
}

}  // namespace

RuntimeModel RuntimeModel::make(double lambda1, double lambda2, double t1, double t2, int n) {
    if (!(lambda1 > 0.0) || !(lambda2 > 0.0) || !(t1 > 0.0) || !(t2 > 0.0))
        throw ArgumentError("runtime model: lambda1, lambda2, t1, t2 must be strictly positive");
    if (n < 1) throw ArgumentError("runtime model: n must be positive");
    return {lambda1, lambda2, t1, t2, n};
}

double worker_time_cdf(const RuntimeModel &model, double t, int d, int m) {
    if (d < 1 || m < 1) throw ArgumentError("worker_time_cdf: d and m must be positive");
    if (t <= 0.0) return 0.0;
    const double a = model.lambda1 / d;
    const double b = m * model.lambda2;
    if (std::abs(a - b) < 1e-9 * b) {
        // Erlang(2, b) when the two rates coincide.
        return 1.0 - std::exp(-b * t) * (1.0 + b * t);
    }
    const double x = (a - b) * t;
    if (std::abs(x) < 1.0) {
        // 1 - e^{-bt} (1 + b t phi(x)), phi(x) = (1 - e^{-x})/x; cancellation-free
        // continuation of the two-exponential mixture near a = b.
        const double phi = -std::expm1(-x) / x;
        return 1.0 - std::exp(-b * t) * (1.0 + b * t * phi);
    }
    return 1.0 - (a * std::exp(-b * t) - b * std::exp(-a * t)) / (a - b);
}

double expected_order_statistic(const RuntimeModel &model, int d, int s, int m) {
    check_ranges(model, d, s, m);
    const OrderStatSurvival survival(model, d, s, m);

    double upper = 1.0;
    while (survival(upper) > kTailThreshold) {
        upper *= 2.0;
        if (upper > 1e18)
            throw NumericalError("expected_order_statistic: tail cutoff search diverged",
                                 survival(upper));
    }

    SimpsonState state;
    const double fa = survival(0.0);
    const double fb = survival(upper);
    const double fm = survival(0.5 * upper);
    const double whole = upper / 6.0 * (fa + 4.0 * fm + fb);
    const double value =
        adaptive_simpson(survival, 0.0, upper, fa, fm, fb, whole, kQuadratureTarget, 48, &state);
    if (!state.converged)
        throw NumericalError("expected_order_statistic: quadrature did not reach target",
                             state.worst_interval_error);
    return value;
}

double expected_total_runtime(const RuntimeModel &model, int d, int s, int m) {
    check_ranges(model, d, s, m);
    // Anything past the frontier is unachievable; waiting for extra
    // workers (s below the frontier) is merely suboptimal.
    if (s > d - m)
        throw AchievabilityError("runtime model: s = " + std::to_string(s) +
                                 " exceeds the achievable frontier d - m = " +
                                 std::to_string(d - m));
    return d * model.t1 + model.t2 / m + expected_order_statistic(model, d, s, m);
}

OptimizeResult optimize_triple(const RuntimeModel &model) {
    OptimizeResult result;
    bool have_best = false;
    for (int d = 1; d <= model.n; ++d) {
        for (int m = 1; m <= d; ++m) {
            const int s = d - m;
            TripleEvaluation cell{d, s, m, expected_total_runtime(model, d, s, m)};
            result.table.push_back(cell);
            if (!have_best || cell.expected_total < result.best.expected_total) {
                result.best = cell;
                have_best = true;
            }
        }
    }
    return result;
}

double computation_dominant_expected(const RuntimeModel &model, int d) {
    if (d < 1 || d > model.n) throw ArgumentError("computation_dominant_expected: d out of [1, n]");
    double harmonic = 0.0;
    for (int i = 0; i <= model.n - d; ++i) harmonic += 1.0 / (model.n - i);
    return d * model.t1 + d / model.lambda1 * harmonic;
}

int prop1_bruteforce_argmin(const RuntimeModel &model) {
    int best_d = 1;
    double best = computation_dominant_expected(model, 1);
    for (int d = 2; d <= model.n; ++d) {
        const double e = computation_dominant_expected(model, d);
        if (e < best) {
            best = e;
            best_d = d;
        }
    }
    return best_d;
}

int prop1_optimal_d(const RuntimeModel &model) {
    double threshold = 0.0;
    for (int i = 2; i <= model.n; ++i) threshold += 1.0 / i;
    threshold /= model.n - 1;
    const int closed_form = model.lambda1 * model.t1 < threshold ? model.n : 1;
    const int brute = prop1_bruteforce_argmin(model);
    if (brute != 1 && brute != model.n)
        throw NumericalError("prop1: brute-force argmin fell outside {1, n}",
                             static_cast<double>(brute));
    return closed_form;
}

double prop2_optimal_alpha(const RuntimeModel &model) {
    const double target = model.lambda2 * model.t2;
    const auto g = [](double alpha) { return alpha / (1.0 - alpha) + std::log1p(-alpha); };
    double lo = 0.0, hi = 1.0 - 1e-15;
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < target ? lo : hi) = mid;
    }
    const double alpha = 0.5 * (lo + hi);
    // h'(alpha) changes sign from negative to positive at the root.
    const double eps = 1e-6;
    if (alpha > eps && alpha < 1.0 - eps && !(g(alpha - eps) < target && g(alpha + eps) > target))
        throw NumericalError("prop2: h' does not change sign at the computed root", alpha);
    return alpha;
}

MonteCarloResult monte_carlo_total(const RuntimeModel &model, int d, int s, int m,
                                   std::uint64_t trials, std::uint64_t seed) {
    check_ranges(model, d, s, m);
    if (trials < 1) throw ArgumentError("monte_carlo_total: need at least one trial");
    Rng rng(seed);
    const double base = d * model.t1 + model.t2 / m;
    std::vector<double> variable(static_cast<std::size_t>(model.n));
    double sum = 0.0, sum_sq = 0.0;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        for (auto &v : variable)
            v = d * rng.exponential(model.lambda1) + rng.exponential(model.lambda2) / m;
        std::nth_element(variable.begin(), variable.begin() + (model.n - s - 1), variable.end());
        const double total = base + variable[static_cast<std::size_t>(model.n - s - 1)];
        sum += total;
        sum_sq += total * total;
    }
    MonteCarloResult result;
    result.trials = trials;
    result.mean = sum / trials;
    const double var = std::max(0.0, sum_sq / trials - result.mean * result.mean);
    result.std_error = std::sqrt(var / trials);
    constexpr double z99 = 2.5758293035489004;
    result.ci_low = result.mean - z99 * result.std_error;
    result.ci_high = result.mean + z99 * result.std_error;
    return result;
}

}  // namespace gradcode
