// gradcode command-line tool. Links the public C API only.

#include <gradcode/gradcode.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

// exit codes: 0 success, 2 usage, 3 achievability, 4 numerical/conditioning,
// 5 timeout, 1 anything else
int exit_code_for(gc_status status) {
    switch (status) {
        case GC_OK: return 0;
        case GC_ERROR_ARGUMENT: return 2;
        case GC_ERROR_ACHIEVABILITY: return 3;
        case GC_ERROR_NUMERICAL:
        case GC_ERROR_CONDITIONING: return 4;
        case GC_ERROR_TIMEOUT: return 5;
        default: return 1;
    }
}

int fail(gc_status status) {
    std::cerr << "error (" << gc_status_name(status) << "): " << gc_last_error() << "\n";
    return exit_code_for(status);
}

struct SchemeFlags {
    int n = 0, d = 0, s = -1, m = 1, l = 1;
    std::string scheme = "vandermonde";
    std::string theta;  // comma list or "auto"
    double kappa = 1e12;
    std::uint64_t seed = 1;
    std::string config;
};

void add_scheme_flags(CLI::App *cmd, SchemeFlags *flags) {
    cmd->add_option("--config", flags->config, "key=value scheme config file (n,d,s,m,l,theta)");
    cmd->add_option("--n", flags->n, "number of workers");
    cmd->add_option("--d", flags->d, "data subsets per worker");
    cmd->add_option("--s", flags->s, "straggler tolerance (default d - m)");
    cmd->add_option("--m", flags->m, "communication reduction factor")->capture_default_str();
    cmd->add_option("--l", flags->l, "gradient dimension")->capture_default_str();
    cmd->add_option("--scheme", flags->scheme, "vandermonde | stable")->capture_default_str()
        ->check(CLI::IsMember({"vandermonde", "stable"}));
    cmd->add_option("--theta", flags->theta, "comma-separated evaluation points or 'auto'");
    cmd->add_option("--kappa", flags->kappa, "condition ceiling for the stable scheme")->capture_default_str();
    cmd->add_option("--seed", flags->seed, "random seed")->capture_default_str();
}

/// Applies the config file (if any), then flag overrides, then defaults.
gc_status resolve_scheme_flags(SchemeFlags *flags, std::vector<double> *theta_out) {
    if (!flags->config.empty()) {
        gc_scheme_config cfg{};
        const gc_status rc = gc_scheme_config_load(flags->config.c_str(), &cfg);
        if (rc != GC_OK) return rc;
        if (flags->n == 0) flags->n = cfg.n;
        if (flags->d == 0) flags->d = cfg.d;
        if (flags->s < 0) flags->s = cfg.s;
        if (flags->m == 1) flags->m = cfg.m;
        if (flags->l == 1) flags->l = cfg.l;
        if (flags->theta.empty() && !cfg.theta_auto) {
            std::ostringstream list;
            for (int i = 0; i < cfg.n; ++i) list << (i ? "," : "") << cfg.theta[i];
            flags->theta = list.str();
        }
    }
    if (flags->s < 0) flags->s = flags->d - flags->m;
    theta_out->clear();
    if (!flags->theta.empty() && flags->theta != "auto") {
        std::stringstream ss(flags->theta);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                theta_out->push_back(std::stod(item));
            } catch (const std::exception &) {
                std::cerr << "error: invalid theta entry '" << item << "'\n";
                return GC_ERROR_ARGUMENT;
            }
        }
    }
    return GC_OK;
}

gc_status build_scheme(const SchemeFlags &flags, const std::vector<double> &theta,
                       gc_scheme **out) {
    if (flags.scheme == "stable")
        return gc_scheme_build_stable(flags.n, flags.d, flags.s, flags.m, flags.l, flags.kappa,
                                      flags.seed, out);
    return gc_scheme_build_vandermonde(flags.n, flags.d, flags.s, flags.m, flags.l,
                                       theta.empty() ? nullptr : theta.data(), out);
}

std::string out_path(const std::string &dir, const std::string &name) {
    std::filesystem::create_directories(dir);
    return (std::filesystem::path(dir) / name).string();
}

void warn_on_slack(const SchemeFlags &flags) {
    if (flags.d > flags.s + flags.m)
        std::cerr << "warning: d = " << flags.d << " exceeds s + m = " << flags.s + flags.m
                  << "; the extra computation load buys nothing\n";
}

// ---------------------------------------------------------------- build ----

int run_build(const SchemeFlags &flags_in, const std::string &out_dir) {
    SchemeFlags flags = flags_in;
    std::vector<double> theta;
    if (gc_status rc = resolve_scheme_flags(&flags, &theta)) return exit_code_for(rc);
    warn_on_slack(flags);

    gc_scheme *scheme = nullptr;
    if (gc_status rc = build_scheme(flags, theta, &scheme)) return fail(rc);

    const std::string path =
        out_path(out_dir, flags.scheme == "stable" ? "scheme.gcs" : "scheme.gcm");
    const gc_status rc = gc_scheme_save(scheme, path.c_str());
    gc_scheme_info info{};
    gc_scheme_info_get(scheme, &info);
    gc_scheme_destroy(scheme);
    if (rc != GC_OK) return fail(rc);

    std::printf("scheme: %s  n=%d d=%d s=%d m=%d l=%d (padded %d)\n",
                flags.scheme.c_str(), info.n, info.d, info.s, info.m, info.gradient_dim,
                info.padded_dim);
    std::printf("V: %d x %d, B: %d x %d, payload %d doubles, survivors needed %d\n",
                info.messages_needed, info.n, info.m * info.n, info.messages_needed,
                info.payload_dim, info.messages_needed);
    std::printf("wrote %s\n", path.c_str());
    return 0;
}

// --------------------------------------------------------------- verify ----

int run_verify(const SchemeFlags &flags_in, std::uint64_t budget, double tolerance,
               const std::string &out_dir) {
    SchemeFlags flags = flags_in;
    std::vector<double> theta;
    if (gc_status rc = resolve_scheme_flags(&flags, &theta)) return exit_code_for(rc);
    warn_on_slack(flags);

    gc_scheme *scheme = nullptr;
    if (gc_status rc = build_scheme(flags, theta, &scheme)) return fail(rc);

    gc_verify_report report{};
    const gc_status rc = gc_scheme_verify(scheme, budget, flags.seed, tolerance, &report);
    gc_scheme_destroy(scheme);
    if (rc != GC_OK) return fail(rc);

    const std::string path = out_path(out_dir, "verify_report.txt");
    std::ofstream out(path);
    out << "scheme=" << flags.scheme << " n=" << flags.n << " d=" << flags.d
        << " s=" << flags.s << " m=" << flags.m << " l=" << flags.l << "\n"
        << "subsets_checked=" << report.subsets_checked << "\n"
        << "exhaustive=" << (report.exhaustive ? "yes" : "no") << "\n"
        << "worst_rel_error=" << report.worst_rel_error << "\n"
        << "tolerance=" << tolerance << "\n"
        << "failures=" << report.failures << "\n";
    out.close();

    std::printf("verified %llu survivor subsets (%s): worst relative error %.3e, %llu over %g\n",
                static_cast<unsigned long long>(report.subsets_checked),
                report.exhaustive ? "exhaustive" : "sampled", report.worst_rel_error,
                static_cast<unsigned long long>(report.failures), tolerance);
    std::printf("wrote %s\n", path.c_str());
    return report.failures == 0 ? 0 : 4;
}

// ---------------------------------------------------------------- audit ----

int run_audit(const SchemeFlags &flags_in, std::uint64_t budget, int subset_size,
              const std::string &out_dir) {
    SchemeFlags flags = flags_in;
    std::vector<double> theta;
    if (gc_status rc = resolve_scheme_flags(&flags, &theta)) return exit_code_for(rc);

    gc_scheme *scheme = nullptr;
    if (gc_status rc = build_scheme(flags, theta, &scheme)) return fail(rc);
    gc_scheme_info info{};
    gc_scheme_info_get(scheme, &info);
    if (subset_size <= 0) subset_size = info.messages_needed;

    gc_condition_audit audit{};
    const gc_status rc =
        gc_scheme_condition_audit(scheme, subset_size, budget, flags.seed, &audit);
    gc_scheme_destroy(scheme);
    if (rc != GC_OK) return fail(rc);

    // gamma arguments for this scheme: n1 = n - d + m rows, n2 = n - d
    gc_gamma_estimate gamma{};
    const int n1 = flags.n - flags.d + flags.m;
    const int n2 = flags.n - flags.d;
    const bool gamma_ok =
        n1 > n2 && flags.n > n1 &&
        gc_estimate_gamma_gaussian(flags.n, n1, n2, flags.kappa, budget, flags.seed, &gamma) ==
            GC_OK;

    double rip = 0.0;
    const bool rip_ok = gc_rip_gamma_bound(flags.n, n1, flags.kappa, &rip) == GC_OK;

    const std::string path = out_path(out_dir, "audit.csv");
    std::ofstream out(path);
    out << "metric,value\n";
    out << "subset_size," << subset_size << "\n";
    out << "subsets_checked," << audit.subsets_checked << "\n";
    out << "exhaustive," << (audit.exhaustive ? 1 : 0) << "\n";
    out << "worst_cond," << audit.worst_cond << "\n";
    out << "p95_cond," << audit.p95_cond << "\n";
    if (gamma_ok) {
        out << "gamma_feasible," << gamma.feasible << "\n";
        if (gamma.feasible) out << "gamma_n3," << gamma.n3 << "\n";
    }
    if (rip_ok) out << "rip_gamma_bound," << rip << "\n";
    out.close();

    std::printf("condition of V_F V_F^T over %llu subsets of size %d (%s):\n",
                static_cast<unsigned long long>(audit.subsets_checked), subset_size,
                audit.exhaustive ? "exhaustive" : "sampled");
    std::printf("  worst %.4e   95th percentile %.4e   kappa %.1e\n", audit.worst_cond,
                audit.p95_cond, flags.kappa);
    if (gamma_ok) {
        if (gamma.feasible)
            std::printf("  empirical gamma(n=%d, n1=%d, n2=%d, kappa): %d (s_kappa <= %d)\n",
                        flags.n, n1, n2, gamma.n3, flags.n - gamma.n3);
        else
            std::printf("  empirical gamma: infeasible at this kappa\n");
    }
    if (rip_ok) std::printf("  concentration bound on gamma: %.2f\n", rip);
    std::printf("wrote %s\n", path.c_str());
    return 0;
}

// ------------------------------------------------------------- optimize ----

/// key=value model file: lambda1, lambda2, t1, t2, n
int load_model_config(const std::string &path, double *lambda1, double *lambda2, double *t1,
                      double *t2, int *n) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot open model config " << path << "\n";
        return 1;
    }
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::cerr << "error: model config line " << line_no << " is not key=value\n";
            return 2;
        }
        std::stringstream key_ss(line.substr(0, eq)), value_ss(line.substr(eq + 1));
        std::string key, value;
        key_ss >> key;
        value_ss >> value;
        try {
            if (key == "lambda1") *lambda1 = std::stod(value);
            else if (key == "lambda2") *lambda2 = std::stod(value);
            else if (key == "t1") *t1 = std::stod(value);
            else if (key == "t2") *t2 = std::stod(value);
            else if (key == "n") *n = std::stoi(value);
            else {
                std::cerr << "error: model config: unknown key '" << key << "'\n";
                return 2;
            }
        } catch (const std::exception &) {
            std::cerr << "error: model config: bad value for " << key << "\n";
            return 2;
        }
    }
    return 0;
}

int run_optimize(double lambda1, double lambda2, double t1, double t2, int n,
                 std::uint64_t mc_trials, std::uint64_t seed, const std::string &out_dir) {
    const gc_runtime_model model = {lambda1, lambda2, t1, t2, n};
    gc_triple best{};
    std::vector<gc_triple> table(static_cast<std::size_t>(n) * (n + 1) / 2);
    int32_t len = static_cast<int32_t>(table.size());
    if (gc_status rc = gc_optimize_triple(&model, &best, table.data(), &len)) return fail(rc);

    const std::string path = out_path(out_dir, "runtime_table.csv");
    std::ofstream out(path);
    out << "d,m,s,expected_total\n";
    for (int32_t i = 0; i < len; ++i) {
        char line[96];
        std::snprintf(line, sizeof line, "%d,%d,%d,%.6f\n", table[static_cast<std::size_t>(i)].d,
                      table[static_cast<std::size_t>(i)].m, table[static_cast<std::size_t>(i)].s,
                      table[static_cast<std::size_t>(i)].expected_total);
        out << line;
    }
    out.close();

    // aligned table, d across, m down
    std::printf("E[T_tot] for lambda1=%g lambda2=%g t1=%g t2=%g n=%d (s = d - m)\n", lambda1,
                lambda2, t1, t2, n);
    std::printf("m\\d ");
    for (int d = 1; d <= n; ++d) std::printf("%9d", d);
    std::printf("\n");
    for (int m = 1; m <= n; ++m) {
        std::printf("%3d ", m);
        for (int d = 1; d <= n; ++d) {
            bool found = false;
            for (int32_t i = 0; i < len; ++i)
                if (table[static_cast<std::size_t>(i)].d == d &&
                    table[static_cast<std::size_t>(i)].m == m) {
                    std::printf("%9.4f", table[static_cast<std::size_t>(i)].expected_total);
                    found = true;
                    break;
                }
            if (!found) std::printf("%9s", "");
        }
        std::printf("\n");
    }
    std::printf("optimal triple (d,s,m) = (%d,%d,%d), E[T_tot] = %.4f\n", best.d, best.s, best.m,
                best.expected_total);

    if (mc_trials > 0) {
        gc_mc_result mc{};
        if (gc_status rc =
                gc_monte_carlo_total(&model, best.d, best.s, best.m, mc_trials, seed, &mc))
            return fail(rc);
        std::printf("monte carlo cross-check (%llu trials): %.4f in [%.4f, %.4f] (99%%)\n",
                    static_cast<unsigned long long>(mc_trials), mc.mean, mc.ci_low, mc.ci_high);
    }
    std::printf("wrote %s\n", path.c_str());
    return 0;
}

// ---------------------------------------------------------------- train ----

struct TrainFlags {
    std::string scheme = "vandermonde";
    int n = 10, d = 1, s = -1, m = 1, l = 100;
    double eta = 1e-3, momentum = 0.9;
    int iterations = 50;
    std::string dataset;
    int samples = 2000;
    double holdout = 0.2;
    std::uint64_t seed = 1;
    double timeout = 10.0;
    bool sim = false;
    std::vector<std::string> stragglers;
    std::string theta;
    double kappa = 1e12;
};

int parse_stragglers(const std::vector<std::string> &specs, std::vector<gc_straggler> *out) {
    for (const std::string &spec : specs) {
        // id:mode:amount, e.g. 3:die:0 or 5:delay:0.25
        const auto c1 = spec.find(':');
        const auto c2 = spec.find(':', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) {
            std::cerr << "error: straggler spec '" << spec << "' is not id:mode:amount\n";
            return 2;
        }
        gc_straggler s{};
        const std::string mode = spec.substr(c1 + 1, c2 - c1 - 1);
        try {
            s.worker_id = std::stoi(spec.substr(0, c1));
            s.amount = std::stod(spec.substr(c2 + 1));
        } catch (const std::exception &) {
            std::cerr << "error: straggler spec '" << spec << "' has bad numbers\n";
            return 2;
        }
        if (mode == "die")
            s.mode = GC_STRAGGLER_DIE;
        else if (mode == "delay")
            s.mode = GC_STRAGGLER_DELAY;
        else {
            std::cerr << "error: straggler mode '" << mode << "' (want delay or die)\n";
            return 2;
        }
        out->push_back(s);
    }
    return 0;
}

int run_train_once(const TrainFlags &flags, const std::string &log_path, gc_train_stats *stats,
                   bool quiet) {
    std::vector<gc_straggler> stragglers;
    if (int rc = parse_stragglers(flags.stragglers, &stragglers)) return rc;
    std::vector<double> theta;
    if (!flags.theta.empty() && flags.theta != "auto") {
        std::stringstream ss(flags.theta);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                theta.push_back(std::stod(item));
            } catch (const std::exception &) {
                std::cerr << "error: invalid theta entry '" << item << "'\n";
                return 2;
            }
        }
    }

    gc_train_config cfg{};
    cfg.scheme = flags.scheme == "naive"    ? GC_TRAIN_NAIVE
                 : flags.scheme == "stable" ? GC_TRAIN_STABLE
                                            : GC_TRAIN_VANDERMONDE;
    cfg.n = flags.n;
    cfg.d = flags.d;
    cfg.s = flags.s >= 0 ? flags.s : flags.d - flags.m;
    cfg.m = flags.m;
    cfg.dim = flags.l;
    cfg.eta = flags.eta;
    cfg.momentum = flags.momentum;
    cfg.iterations = flags.iterations;
    cfg.csv_path = flags.dataset.empty() ? nullptr : flags.dataset.c_str();
    cfg.synthetic_samples = flags.samples;
    cfg.holdout_fraction = flags.holdout;
    cfg.seed = flags.seed;
    cfg.timeout_sec = flags.timeout;
    cfg.single_process = flags.sim ? 1 : 0;
    cfg.stragglers = stragglers.empty() ? nullptr : stragglers.data();
    cfg.straggler_count = static_cast<int32_t>(stragglers.size());
    cfg.theta = theta.empty() ? nullptr : theta.data();
    cfg.kappa = flags.kappa;

    const gc_status rc = gc_train_run(&cfg, log_path.empty() ? nullptr : log_path.c_str(), stats);
    if (rc != GC_OK && rc != GC_ERROR_TIMEOUT) return fail(rc);
    if (!quiet) {
        std::printf("%s: %d iterations, final loss %.6f, holdout AUC %.4f, median %.2f ms/iter, "
                    "payload %llu B/worker/iter\n",
                    flags.scheme.c_str(), stats->iterations_completed, stats->final_loss,
                    stats->final_auc, stats->median_iteration_ms,
                    static_cast<unsigned long long>(stats->gradient_payload_bytes));
        if (!log_path.empty()) std::printf("wrote %s\n", log_path.c_str());
    }
    if (rc == GC_ERROR_TIMEOUT) {
        std::cerr << "error (timeout): " << gc_last_error() << "\n";
        return 5;
    }
    return 0;
}

// ---------------------------------------------------------------- bench ----

int run_bench(const TrainFlags &flags, const std::string &out_dir) {
    // naive, the m = 1 coded scheme at the same d, and the requested m > 1
    // scheme; median-of-5 of the per-run median iteration time
    struct Row {
        std::string label;
        TrainFlags cfg;
    };
    std::vector<Row> rows;
    rows.push_back({"naive", flags});
    rows.back().cfg.scheme = "naive";
    if (flags.d >= 1) {
        rows.push_back({"coded m=1 (d=" + std::to_string(flags.d) + ")", flags});
        rows.back().cfg.scheme = flags.scheme == "naive" ? "vandermonde" : flags.scheme;
        rows.back().cfg.m = 1;
        rows.back().cfg.s = flags.d - 1;
    }
    if (flags.m > 1) {
        rows.push_back({"coded m=" + std::to_string(flags.m) + " (d=" + std::to_string(flags.d) +
                            ")",
                        flags});
        rows.back().cfg.scheme = flags.scheme == "naive" ? "vandermonde" : flags.scheme;
        rows.back().cfg.s = flags.d - flags.m;
    }

    const std::string path = out_path(out_dir, "bench.csv");
    std::ofstream out(path);
    out << "scheme,run,median_iteration_ms,payload_bytes\n";
    std::printf("%-24s %14s %16s\n", "scheme", "median ms/iter", "payload B/worker");
    for (const Row &row : rows) {
        std::vector<double> medians;
        std::uint64_t payload = 0;
        for (int run = 0; run < 5; ++run) {
            gc_train_stats stats{};
            const int rc = run_train_once(row.cfg, "", &stats, true);
            if (rc != 0) return rc;
            medians.push_back(stats.median_iteration_ms);
            payload = stats.gradient_payload_bytes;
            char line[128];
            std::snprintf(line, sizeof line, "%s,%d,%.3f,%llu\n", row.label.c_str(), run,
                          stats.median_iteration_ms, static_cast<unsigned long long>(payload));
            out << line;
        }
        std::sort(medians.begin(), medians.end());
        std::printf("%-24s %14.3f %16llu\n", row.label.c_str(), medians[2],
                    static_cast<unsigned long long>(payload));
    }
    out.close();
    std::printf("wrote %s\n", path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"communication-computation efficient gradient coding toolkit"};
    app.require_subcommand(1);

    std::string out_dir = ".";
    app.add_option("--out", out_dir, "output directory")->capture_default_str();

    SchemeFlags scheme_flags;
    std::uint64_t budget = 100000;
    double tolerance = 1e-6;
    int subset_size = 0;

    auto *build_cmd = app.add_subcommand("build", "construct and save the V/B matrices");
    add_scheme_flags(build_cmd, &scheme_flags);

    auto *verify_cmd =
        app.add_subcommand("verify", "encode/decode every survivor subset against the direct sum");
    add_scheme_flags(verify_cmd, &scheme_flags);
    verify_cmd->add_option("--budget", budget, "subset budget before sampling kicks in")->capture_default_str();
    verify_cmd->add_option("--tolerance", tolerance, "failure threshold (relative l-inf)")->capture_default_str();

    auto *audit_cmd =
        app.add_subcommand("audit", "condition numbers, empirical gamma, concentration bound");
    add_scheme_flags(audit_cmd, &scheme_flags);
    audit_cmd->add_option("--budget", budget, "subset budget")->capture_default_str();
    audit_cmd->add_option("--subset-size", subset_size, "audited subset size (default n - s)");

    double lambda1 = 0.8, lambda2 = 0.1, t1 = 1.6, t2 = 6.0;
    int model_n = 8;
    std::uint64_t mc_trials = 0, model_seed = 1;
    std::string model_config;
    auto *optimize_cmd =
        app.add_subcommand("optimize", "scan E[T_tot] over (d, s=d-m, m) and report the optimum");
    optimize_cmd->add_option("--config", model_config,
                             "key=value model file (lambda1, lambda2, t1, t2, n)");
    optimize_cmd->add_option("--lambda1", lambda1, "computation straggle rate")->capture_default_str();
    optimize_cmd->add_option("--lambda2", lambda2, "communication straggle rate")->capture_default_str();
    optimize_cmd->add_option("--t1", t1, "minimum per-subset computation time")->capture_default_str();
    optimize_cmd->add_option("--t2", t2, "minimum full-vector communication time")->capture_default_str();
    optimize_cmd->add_option("--n", model_n, "number of workers")->capture_default_str();
    optimize_cmd->add_option("--mc-trials", mc_trials, "Monte Carlo cross-check trials");
    optimize_cmd->add_option("--seed", model_seed, "Monte Carlo seed")->capture_default_str();

    TrainFlags train_flags;
    auto add_train_flags = [&](CLI::App *cmd) {
        cmd->add_option("--scheme", train_flags.scheme, "naive | vandermonde | stable")->capture_default_str()
            ->check(CLI::IsMember({"naive", "vandermonde", "stable"}));
        cmd->add_option("--n", train_flags.n, "workers")->capture_default_str();
        cmd->add_option("--d", train_flags.d, "subsets per worker")->capture_default_str();
        cmd->add_option("--s", train_flags.s, "straggler tolerance (default d - m)");
        cmd->add_option("--m", train_flags.m, "communication reduction")->capture_default_str();
        cmd->add_option("--l", train_flags.l, "model dimension")->capture_default_str();
        cmd->add_option("--eta", train_flags.eta, "step size")->capture_default_str();
        cmd->add_option("--momentum", train_flags.momentum, "NAG momentum")->capture_default_str();
        cmd->add_option("--iters", train_flags.iterations, "iterations")->capture_default_str();
        cmd->add_option("--dataset", train_flags.dataset, "CSV dataset (default: synthetic)");
        cmd->add_option("--samples", train_flags.samples, "synthetic training rows")->capture_default_str();
        cmd->add_option("--holdout", train_flags.holdout, "held-out fraction for AUC")->capture_default_str();
        cmd->add_option("--seed", train_flags.seed, "seed")->capture_default_str();
        cmd->add_option("--timeout", train_flags.timeout, "collection deadline floor (s)")->capture_default_str();
        cmd->add_flag("--sim", train_flags.sim, "single-process simulation instead of processes");
        cmd->add_option("--straggler", train_flags.stragglers,
                        "inject straggler, id:mode:amount (mode delay|die); repeatable");
        cmd->add_option("--theta", train_flags.theta, "evaluation points override");
        cmd->add_option("--kappa", train_flags.kappa, "stable-scheme condition ceiling")->capture_default_str();
    };
    auto *train_cmd = app.add_subcommand("train", "run master + workers on one host");
    add_train_flags(train_cmd);
    auto *bench_cmd =
        app.add_subcommand("bench", "compare naive / m=1 / m>1 per-iteration wall time");
    add_train_flags(bench_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return 2;  // any usage problem, including unknown flags
    }

    try {
        if (build_cmd->parsed()) return run_build(scheme_flags, out_dir);
        if (verify_cmd->parsed()) return run_verify(scheme_flags, budget, tolerance, out_dir);
        if (audit_cmd->parsed()) return run_audit(scheme_flags, budget, subset_size, out_dir);
        if (optimize_cmd->parsed()) {
            if (!model_config.empty())
                if (int rc = load_model_config(model_config, &lambda1, &lambda2, &t1, &t2,
                                               &model_n))
                    return rc;
            // explicit flags override the file
            for (const auto &pair : std::vector<std::pair<const CLI::Option *, double *>>{
                     {optimize_cmd->get_option("--lambda1"), &lambda1},
                     {optimize_cmd->get_option("--lambda2"), &lambda2},
                     {optimize_cmd->get_option("--t1"), &t1},
                     {optimize_cmd->get_option("--t2"), &t2}})
                if (pair.first->count()) *pair.second = std::stod(pair.first->as<std::string>());
            if (optimize_cmd->get_option("--n")->count())
                model_n = optimize_cmd->get_option("--n")->as<int>();
            return run_optimize(lambda1, lambda2, t1, t2, model_n, mc_trials, model_seed, out_dir);
        }
        if (train_cmd->parsed()) {
            gc_train_stats stats{};
            return run_train_once(train_flags, out_path(out_dir, "train_log.csv"), &stats, false);
        }
        if (bench_cmd->parsed()) return run_bench(train_flags, out_dir);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
