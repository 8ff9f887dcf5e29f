#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/dataset.hpp"
#include "core/params.hpp"
#include "core/stable_scheme.hpp"
#include "core/vandermonde_scheme.hpp"

namespace gradcode {

enum class SchemeKind { kNaive, kVandermonde, kStable };

struct StragglerSpec {
    enum class Mode { kDelay, kDie };
    int worker_id = 0;
    Mode mode = Mode::kDelay;
    /// kDelay: seconds of sleep before each gradient send.
    /// kDie: iteration index at which the worker exits (0 = before any reply).
    double amount = 0.0;
};

struct DatasetSpec {
    std::string csv_path;         ///< non-empty selects CSV input
    int synthetic_samples = 2000; ///< training rows for the generator
};

struct TrainConfig {
    SchemeKind scheme = SchemeKind::kVandermonde;
    int n = 0;
    int d = 1, s = 0, m = 1;  ///< naive forces (1, 0, 1); coded requires d = s + m
    int dim = 0;              ///< model dimension; overridden by CSV column count
    double eta = 1e-3;
    double momentum = 0.9;
    int iterations = 10;
    std::vector<StragglerSpec> stragglers;
    DatasetSpec data;
    double holdout_fraction = 0.2;
    std::uint64_t seed = 1;
    /// The per-iteration collection deadline is max(timeout_floor_sec,
    /// 30 x median healthy iteration time so far).
    double timeout_floor_sec = 10.0;
    bool single_process = false;  ///< simulate workers in-process (CI mode)
    bool record_trajectory = false;
    std::vector<double> theta;  ///< Vandermonde override; empty = default grid
    double kappa = StableScheme::kDefaultKappa;
};

struct IterationLog {
    int iteration = 0;
    double wall_ms = 0.0;
    double loss = 0.0;
    double auc = 0.0;
    std::uint64_t bytes_rx = 0;  ///< gradient frames accepted this iteration
};

struct TrainResult {
    std::vector<IterationLog> log;
    Eigen::VectorXd beta;
    std::vector<Eigen::VectorXd> trajectory;   ///< per-iteration beta when recorded
    std::uint64_t gradient_payload_bytes = 0;  ///< per worker per iteration
    std::uint64_t gradient_frame_bytes = 0;    ///< payload plus framing overhead
    double median_iteration_ms = 0.0;
    bool timed_out = false;      ///< run aborted early; log holds the completed part
    std::string abort_reason;
};

/// Runs synchronous gradient descent with the configured coding scheme.
/// Multiprocess mode forks one OS process per worker on loopback TCP; the
/// master waits for the first n - s gradient frames per iteration, decodes,
/// applies NAG, and discards late frames. A collection deadline miss aborts
/// the run and returns the partial log with timed_out set.
TrainResult train(const TrainConfig &config);

void write_log_csv(const std::vector<IterationLog> &log, const std::string &path);

}  // namespace gradcode
