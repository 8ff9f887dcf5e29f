#include "gradcode/gradcode.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "core/config_file.hpp"
#include "core/errors.hpp"
#include "core/matrix_io.hpp"
#include "core/runner.hpp"
#include "core/runtime_model.hpp"
#include "core/stable_scheme.hpp"
#include "core/vandermonde_scheme.hpp"

using namespace gradcode;

struct gc_scheme {
    std::optional<VandermondeScheme> vander;
    std::optional<StableScheme> stable;

    const CodingParams &params() const { return vander ? vander->params() : stable->params(); }
    const Eigen::MatrixXd &v() const {
        return vander ? vander->evaluation_matrix() : stable->evaluation_matrix();
    }
    const Eigen::MatrixXd &b() const {
        return vander ? vander->encoding_matrix() : stable->encoding_matrix();
    }
};

namespace {

thread_local std::string g_last_error;

gc_status capture(const std::exception &e, gc_status status) {
    g_last_error = e.what();
    return status;
}

template <typename Fn>
gc_status guarded(Fn &&fn) {
    try {
        fn();
        return GC_OK;
    } catch (const ArgumentError &e) {
        return capture(e, GC_ERROR_ARGUMENT);
    } catch (const AchievabilityError &e) {
        return capture(e, GC_ERROR_ACHIEVABILITY);
    } catch (const ConstructionError &e) {
        return capture(e, GC_ERROR_NUMERICAL);
    } catch (const ConditioningError &e) {
        return capture(e, GC_ERROR_CONDITIONING);
    } catch (const NumericalError &e) {
        return capture(e, GC_ERROR_NUMERICAL);
    } catch (const TimeoutError &e) {
        return capture(e, GC_ERROR_TIMEOUT);
    } catch (const ProtocolError &e) {
        return capture(e, GC_ERROR_PROTOCOL);
    } catch (const IoError &e) {
        return capture(e, GC_ERROR_IO);
    } catch (const std::exception &e) {
        return capture(e, GC_ERROR_INTERNAL);
    } catch (...) {
        g_last_error = "unknown failure";
        return GC_ERROR_INTERNAL;
    }
}

gc_status require(bool ok, const char *message) {
    if (ok) return GC_OK;
    g_last_error = message;
    return GC_ERROR_ARGUMENT;
}

RuntimeModel to_model(const gc_runtime_model *model) {
    if (!model) throw ArgumentError("model pointer is null");
    return RuntimeModel::make(model->lambda1, model->lambda2, model->t1, model->t2, model->n);
}

}  // namespace

extern "C" {

const char *gc_status_name(gc_status status) {
    switch (status) {
        case GC_OK: return "ok";
        case GC_ERROR_ARGUMENT: return "argument";
        case GC_ERROR_ACHIEVABILITY: return "achievability";
        case GC_ERROR_NUMERICAL: return "numerical";
        case GC_ERROR_CONDITIONING: return "conditioning";
        case GC_ERROR_TIMEOUT: return "timeout";
        case GC_ERROR_IO: return "io";
        case GC_ERROR_PROTOCOL: return "protocol";
        case GC_ERROR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char *gc_last_error(void) { return g_last_error.c_str(); }

const char *gc_version(void) { return "1.0.0"; }

gc_status gc_scheme_build_vandermonde(int32_t n, int32_t d, int32_t s, int32_t m,
                                      int32_t gradient_dim, const double *theta, gc_scheme **out) {
    if (gc_status bad = require(out != nullptr, "output pointer is null")) return bad;
    return guarded([&] {
        const CodingParams params = CodingParams::make(n, d, s, m, gradient_dim);
        std::vector<double> points;
        if (theta) points.assign(theta, theta + n);
        auto *scheme = new gc_scheme();
        try {
            scheme->vander = VandermondeScheme::build(params, std::move(points));
        } catch (...) {
            delete scheme;
            throw;
        }
        *out = scheme;
    });
}

gc_status gc_scheme_build_stable(int32_t n, int32_t d, int32_t s, int32_t m, int32_t gradient_dim,
                                 double kappa, uint64_t seed, gc_scheme **out) {
    if (gc_status bad = require(out != nullptr, "output pointer is null")) return bad;
    return guarded([&] {
        const CodingParams params = CodingParams::make(n, d, s, m, gradient_dim);
        auto *scheme = new gc_scheme();
        try {
            scheme->stable = StableScheme::build(params, kappa, seed);
        } catch (...) {
            delete scheme;
            throw;
        }
        *out = scheme;
    });
}

void gc_scheme_destroy(gc_scheme *scheme) { delete scheme; }

gc_status gc_scheme_info_get(const gc_scheme *scheme, gc_scheme_info *info) {
    if (gc_status bad = require(scheme && info, "null pointer")) return bad;
    return guarded([&] {
        const CodingParams &p = scheme->params();
        info->kind = scheme->vander ? GC_SCHEME_VANDERMONDE : GC_SCHEME_STABLE;
        info->n = p.n;
        info->k = p.k;
        info->d = p.d;
        info->s = p.s;
        info->m = p.m;
        info->gradient_dim = p.raw_dim;
        info->padded_dim = p.gradient_dim;
        info->payload_dim = p.payload_dim();
        info->messages_needed = p.messages_needed();
    });
}

gc_status gc_scheme_assignment(const gc_scheme *scheme, int32_t worker_id, int32_t *subset_ids) {
    if (gc_status bad = require(scheme && subset_ids, "null pointer")) return bad;
    return guarded([&] {
        const auto ids = scheme->vander ? scheme->vander->assignment(worker_id)
                                        : scheme->stable->assignment(worker_id);
        for (std::size_t i = 0; i < ids.size(); ++i) subset_ids[i] = ids[i];
    });
}

gc_status gc_scheme_matrix_v(const gc_scheme *scheme, double *out) {
    if (gc_status bad = require(scheme && out, "null pointer")) return bad;
    return guarded([&] {
        const Eigen::MatrixXd &v = scheme->v();
        for (Eigen::Index r = 0; r < v.rows(); ++r)
            for (Eigen::Index c = 0; c < v.cols(); ++c) *out++ = v(r, c);
    });
}

gc_status gc_scheme_matrix_b(const gc_scheme *scheme, double *out) {
    if (gc_status bad = require(scheme && out, "null pointer")) return bad;
    return guarded([&] {
        const Eigen::MatrixXd &b = scheme->b();
        for (Eigen::Index r = 0; r < b.rows(); ++r)
            for (Eigen::Index c = 0; c < b.cols(); ++c) *out++ = b(r, c);
    });
}

gc_status gc_scheme_encode(const gc_scheme *scheme, int32_t worker_id, const double *gradients,
                           double *payload) {
    if (gc_status bad = require(scheme && gradients && payload, "null pointer")) return bad;
    return guarded([&] {
        const CodingParams &p = scheme->params();
        std::vector<Eigen::VectorXd> assigned(static_cast<std::size_t>(p.d));
        for (int r = 0; r < p.d; ++r) {
            assigned[static_cast<std::size_t>(r)] =
                Eigen::Map<const Eigen::VectorXd>(gradients + static_cast<std::ptrdiff_t>(r) * p.raw_dim,
                                                  p.raw_dim);
        }
        const Eigen::VectorXd result = scheme->vander
                                           ? scheme->vander->encode(worker_id, assigned)
                                           : scheme->stable->encode(worker_id, assigned);
        std::memcpy(payload, result.data(), sizeof(double) * static_cast<std::size_t>(result.size()));
    });
}

gc_status gc_scheme_decode(const gc_scheme *scheme, int32_t count, const int32_t *worker_ids,
                           const double *payloads, double *sum) {
    if (gc_status bad = require(scheme && worker_ids && payloads && sum, "null pointer")) return bad;
    return guarded([&] {
        const CodingParams &p = scheme->params();
        if (count < 1) throw ArgumentError("decode: need at least one message");
        std::vector<EncodedMessage> messages(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) {
            messages[static_cast<std::size_t>(i)].worker_id = worker_ids[i];
            messages[static_cast<std::size_t>(i)].payload = Eigen::Map<const Eigen::VectorXd>(
                payloads + static_cast<std::ptrdiff_t>(i) * p.payload_dim(), p.payload_dim());
        }
        const Eigen::VectorXd result =
            scheme->vander ? scheme->vander->decode(messages) : scheme->stable->decode(messages);
        std::memcpy(sum, result.data(), sizeof(double) * static_cast<std::size_t>(result.size()));
    });
}

gc_status gc_scheme_save(const gc_scheme *scheme, const char *path) {
    if (gc_status bad = require(scheme && path, "null pointer")) return bad;
    return guarded([&] {
        if (scheme->vander)
            save_scheme(*scheme->vander, path);
        else
            save_scheme(*scheme->stable, path);
    });
}

gc_status gc_scheme_load(const char *path, gc_scheme **out) {
    if (gc_status bad = require(path && out, "null pointer")) return bad;
    return guarded([&] {
        auto *scheme = new gc_scheme();
        try {
            if (peek_scheme_kind(path) == SchemeFileKind::kVandermonde)
                scheme->vander = load_vandermonde_scheme(path);
            else
                scheme->stable = load_stable_scheme(path);
        } catch (...) {
            delete scheme;
            throw;
        }
        *out = scheme;
    });
}

gc_status gc_scheme_verify(const gc_scheme *scheme, uint64_t subset_budget, uint64_t seed,
                           double tolerance, gc_verify_report *report) {
    if (gc_status bad = require(scheme && report, "null pointer")) return bad;
    return guarded([&] {
        const VerifyReport r = scheme->vander
                                   ? verify_scheme(*scheme->vander, subset_budget, seed, tolerance)
                                   : verify_scheme(*scheme->stable, subset_budget, seed, tolerance);
        report->worst_rel_error = r.worst_rel_error;
        report->subsets_checked = r.subsets_checked;
        report->failures = r.failures;
        report->exhaustive = r.exhaustive ? 1 : 0;
    });
}

gc_status gc_scheme_condition_audit(const gc_scheme *scheme, int32_t subset_size, uint64_t budget,
                                    uint64_t seed, gc_condition_audit *audit) {
    if (gc_status bad = require(scheme && audit, "null pointer")) return bad;
    return guarded([&] {
        const ConditionAudit a = condition_audit(scheme->v(), subset_size, budget, seed);
        audit->worst_cond = a.worst_cond;
        audit->p95_cond = a.p95_cond;
        audit->subsets_checked = a.subsets_checked;
        audit->exhaustive = a.exhaustive ? 1 : 0;
    });
}

gc_status gc_estimate_gamma_gaussian(int32_t n, int32_t n1, int32_t n2, double kappa,
                                     uint64_t subset_budget, uint64_t seed,
                                     gc_gamma_estimate *estimate) {
    if (gc_status bad = require(estimate != nullptr, "null pointer")) return bad;
    return guarded([&] {
        const GammaEstimate g = estimate_gamma_gaussian(n, n1, n2, kappa, subset_budget, seed);
        estimate->n3 = g.n3;
        estimate->feasible = g.feasible ? 1 : 0;
        estimate->exhaustive = g.exhaustive ? 1 : 0;
    });
}

gc_status gc_rip_gamma_bound(int32_t n, int32_t n1, double kappa, double *bound) {
    if (gc_status bad = require(bound != nullptr, "null pointer")) return bad;
    return guarded([&] { *bound = rip_gamma_bound(n, n1, kappa); });
}

gc_status gc_worker_time_cdf(const gc_runtime_model *model, double t, int32_t d, int32_t m,
                             double *prob) {
    if (gc_status bad = require(prob != nullptr, "null pointer")) return bad;
    return guarded([&] { *prob = worker_time_cdf(to_model(model), t, d, m); });
}

gc_status gc_expected_total_runtime(const gc_runtime_model *model, int32_t d, int32_t s, int32_t m,
                                    double *expected) {
    if (gc_status bad = require(expected != nullptr, "null pointer")) return bad;
    return guarded([&] { *expected = expected_total_runtime(to_model(model), d, s, m); });
}

gc_status gc_optimize_triple(const gc_runtime_model *model, gc_triple *best, gc_triple *table,
                             int32_t *table_len) {
    if (gc_status bad = require(best != nullptr, "null pointer")) return bad;
    return guarded([&] {
        const OptimizeResult result = optimize_triple(to_model(model));
        best->d = result.best.d;
        best->s = result.best.s;
        best->m = result.best.m;
        best->expected_total = result.best.expected_total;
        if (table && table_len) {
            const int32_t count = std::min<int32_t>(*table_len,
                                                    static_cast<int32_t>(result.table.size()));
            for (int32_t i = 0; i < count; ++i) {
                table[i].d = result.table[static_cast<std::size_t>(i)].d;
                table[i].s = result.table[static_cast<std::size_t>(i)].s;
                table[i].m = result.table[static_cast<std::size_t>(i)].m;
                table[i].expected_total = result.table[static_cast<std::size_t>(i)].expected_total;
            }
            *table_len = count;
        } else if (table_len) {
            *table_len = static_cast<int32_t>(result.table.size());
        }
    });
}

gc_status gc_computation_dominant_expected(const gc_runtime_model *model, int32_t d,
                                           double *expected) {
    if (gc_status bad = require(expected != nullptr, "null pointer")) return bad;
    return guarded([&] { *expected = computation_dominant_expected(to_model(model), d); });
}

gc_status gc_prop1_optimal_d(const gc_runtime_model *model, int32_t *d) {
    if (gc_status bad = require(d != nullptr, "null pointer")) return bad;
    return guarded([&] { *d = prop1_optimal_d(to_model(model)); });
}

gc_status gc_prop2_optimal_alpha(const gc_runtime_model *model, double *alpha) {
    if (gc_status bad = require(alpha != nullptr, "null pointer")) return bad;
    return guarded([&] { *alpha = prop2_optimal_alpha(to_model(model)); });
}

gc_status gc_monte_carlo_total(const gc_runtime_model *model, int32_t d, int32_t s, int32_t m,
                               uint64_t trials, uint64_t seed, gc_mc_result *result) {
    if (gc_status bad = require(result != nullptr, "null pointer")) return bad;
    return guarded([&] {
        const MonteCarloResult r = monte_carlo_total(to_model(model), d, s, m, trials, seed);
        result->mean = r.mean;
        result->ci_low = r.ci_low;
        result->ci_high = r.ci_high;
        result->std_error = r.std_error;
    });
}

gc_status gc_train_run(const gc_train_config *config, const char *log_csv_path,
                       gc_train_stats *stats) {
    if (gc_status bad = require(config != nullptr, "null pointer")) return bad;
    return guarded([&] {
        TrainConfig cfg;
        switch (config->scheme) {
            case GC_TRAIN_NAIVE: cfg.scheme = SchemeKind::kNaive; break;
            case GC_TRAIN_VANDERMONDE: cfg.scheme = SchemeKind::kVandermonde; break;
            case GC_TRAIN_STABLE: cfg.scheme = SchemeKind::kStable; break;
            default: throw ArgumentError("train: unknown scheme kind");
        }
        cfg.n = config->n;
        cfg.d = config->d;
        cfg.s = config->s;
        cfg.m = config->m;
        cfg.dim = config->dim;
        cfg.eta = config->eta;
        cfg.momentum = config->momentum > 0.0 ? config->momentum : 0.9;
        cfg.iterations = config->iterations;
        if (config->csv_path && config->csv_path[0]) cfg.data.csv_path = config->csv_path;
        if (config->synthetic_samples > 0) cfg.data.synthetic_samples = config->synthetic_samples;
        cfg.holdout_fraction = config->holdout_fraction;
        cfg.seed = config->seed;
        if (config->timeout_sec > 0.0) cfg.timeout_floor_sec = config->timeout_sec;
        cfg.single_process = config->single_process != 0;
        for (int32_t i = 0; i < config->straggler_count; ++i) {
            const gc_straggler &in = config->stragglers[i];
            StragglerSpec spec;
            spec.worker_id = in.worker_id;
            spec.mode = in.mode == GC_STRAGGLER_DIE ? StragglerSpec::Mode::kDie
                                                    : StragglerSpec::Mode::kDelay;
            spec.amount = in.amount;
            cfg.stragglers.push_back(spec);
        }
        if (config->theta) cfg.theta.assign(config->theta, config->theta + config->n);
        if (config->kappa > 0.0) cfg.kappa = config->kappa;

        const TrainResult result = train(cfg);
        if (log_csv_path && log_csv_path[0]) write_log_csv(result.log, log_csv_path);
        if (stats) {
            stats->iterations_completed = static_cast<int32_t>(result.log.size());
            stats->final_loss = result.log.empty() ? 0.0 : result.log.back().loss;
            stats->final_auc = result.log.empty() ? 0.0 : result.log.back().auc;
            stats->median_iteration_ms = result.median_iteration_ms;
            stats->gradient_payload_bytes = result.gradient_payload_bytes;
            stats->gradient_frame_bytes = result.gradient_frame_bytes;
        }
        if (result.timed_out) throw TimeoutError(result.abort_reason);
    });
}

gc_status gc_scheme_config_load(const char *path, gc_scheme_config *config) {
    if (gc_status bad = require(path && config, "null pointer")) return bad;
    return guarded([&] {
        const SchemeConfig cfg = load_scheme_config(path);
        if (!cfg.theta_auto && cfg.n > GC_CONFIG_MAX_WORKERS)
            throw ArgumentError("config: explicit theta supports at most " +
                                std::to_string(GC_CONFIG_MAX_WORKERS) + " workers");
        config->n = cfg.n;
        config->d = cfg.d;
        config->s = cfg.s;
        config->m = cfg.m;
        config->l = cfg.l;
        config->theta_auto = cfg.theta_auto ? 1 : 0;
        for (int i = 0; i < GC_CONFIG_MAX_WORKERS; ++i) config->theta[i] = 0.0;
        for (std::size_t i = 0; i < cfg.theta.size(); ++i) config->theta[i] = cfg.theta[i];
    });
}

}  // extern "C"
