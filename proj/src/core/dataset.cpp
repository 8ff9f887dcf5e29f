#include "core/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace gradcode {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

std::vector<std::vector<int>> partition_rows(int train_count, int k, int *tail_out) {
    std::vector<std::vector<int>> subsets(static_cast<std::size_t>(k));
    const int base = train_count / k;
    const int tail = train_count % k;
    int row = 0;
    for (int j = 0; j < k; ++j)
        for (int c = 0; c < base; ++c) subsets[static_cast<std::size_t>(j)].push_back(row++);
    // leftover rows go round-robin across the first `tail` subsets
    for (int j = 0; j < tail; ++j) subsets[static_cast<std::size_t>(j)].push_back(row++);
    *tail_out = tail;
    return subsets;
}

}  // namespace

Dataset synth_data(int samples, int dim, int k, double holdout_fraction, std::uint64_t seed) {
    if (samples < 1 || dim < 1 || k < 1) throw ArgumentError("synth_data: bad sizes");
    if (holdout_fraction < 0.0 || holdout_fraction >= 1.0)
        throw ArgumentError("synth_data: holdout fraction must lie in [0, 1)");
    Rng rng(seed);
    const int holdout = static_cast<int>(std::ceil(holdout_fraction * samples));
    const int total = samples + holdout;

    Dataset data;
    data.planted_beta.resize(dim);
    for (int c = 0; c < dim; ++c) data.planted_beta[c] = rng.normal();
    data.planted_beta *= 4.0 / data.planted_beta.norm();  // crisp but noisy labels

    data.features.resize(total, dim);
    data.labels.resize(total);
    for (int r = 0; r < total; ++r) {
        for (int c = 0; c < dim; ++c) data.features(r, c) = rng.normal();
        const double p = sigmoid(data.features.row(r).dot(data.planted_beta));
        data.labels[r] = rng.uniform() < p ? 1.0 : -1.0;
    }
    data.train_count = samples;
    data.subsets = partition_rows(samples, k, &data.round_robin_tail);
    return data;
}

Dataset load_csv_dataset(const std::string &path, int k, double holdout_fraction,
                         std::uint64_t seed) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset: " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("dataset CSV is empty: " + path);

    std::vector<std::vector<double>> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception &) {
                throw ArgumentError("dataset CSV line " + std::to_string(line_no) +
                                    ": invalid number '" + cell + "'");
            }
        }
        if (row.size() < 2)
            throw ArgumentError("dataset CSV line " + std::to_string(line_no) +
                                ": need at least one feature and a label");
        if (!rows.empty() && row.size() != rows.front().size())
            throw ArgumentError("dataset CSV line " + std::to_string(line_no) +
                                ": inconsistent column count");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ArgumentError("dataset CSV has no data rows: " + path);

    const int total = static_cast<int>(rows.size());
    const int dim = static_cast<int>(rows.front().size()) - 1;
    std::vector<int> order(rows.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    for (int i = total - 1; i > 0; --i)
        std::swap(order[static_cast<std::size_t>(i)],
                  order[rng.integer(static_cast<std::uint64_t>(i + 1))]);

    Dataset data;
    data.features.resize(total, dim);
    data.labels.resize(total);
    for (int r = 0; r < total; ++r) {
        const auto &src = rows[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])];
        for (int c = 0; c < dim; ++c) data.features(r, c) = src[static_cast<std::size_t>(c)];
        const double label = src.back();
        if (label == 1.0)
            data.labels[r] = 1.0;
        else if (label == -1.0 || label == 0.0)
            data.labels[r] = -1.0;
        else
            throw ArgumentError("dataset CSV: label must be -1, 0 or 1, got " +
                                std::to_string(label));
    }
    const int holdout = static_cast<int>(std::floor(holdout_fraction * total));
    data.train_count = total - holdout;
    if (data.train_count < k) throw ArgumentError("dataset CSV: fewer training rows than subsets");
    data.subsets = partition_rows(data.train_count, k, &data.round_robin_tail);
    return data;
}

Eigen::VectorXd partial_gradient(const Eigen::MatrixXd &features, const Eigen::VectorXd &labels,
                                 const std::vector<int> &rows, const Eigen::VectorXd &beta) {
    if (beta.size() != features.cols())
        throw ArgumentError("partial_gradient: beta dimension mismatch");
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(beta.size());
    for (int r : rows) {
        const double y = labels[r];
        const double margin = y * features.row(r).dot(beta);
        grad -= y * sigmoid(-margin) * features.row(r).transpose();
    }
    return grad;
}

double mean_logistic_loss(const Dataset &data, const Eigen::VectorXd &beta) {
    double loss = 0.0;
    for (int r = 0; r < data.train_count; ++r) {
        const double margin = data.labels[r] * data.features.row(r).dot(beta);
        // ln(1 + e^{-margin}) without overflow
        loss += margin > 0.0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
    }
    return loss / data.train_count;
}

double auc_score(const Eigen::VectorXd &scores, const Eigen::VectorXd &labels) {
    const int count = static_cast<int>(scores.size());
    std::vector<int> order(static_cast<std::size_t>(count));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return scores[a] < scores[b]; });

    double positive_rank_sum = 0.0;
    int positives = 0;
    int i = 0;
    while (i < count) {
        int j = i;
        while (j < count && scores[order[static_cast<std::size_t>(j)]] ==
                                scores[order[static_cast<std::size_t>(i)]])
            ++j;
        const double avg_rank = 0.5 * (i + j - 1) + 1.0;  // average 1-based rank of the tie group
        for (int t = i; t < j; ++t) {
            if (labels[order[static_cast<std::size_t>(t)]] > 0.0) {
                positive_rank_sum += avg_rank;
                ++positives;
            }
        }
        i = j;
    }
    const int negatives = count - positives;
    if (positives == 0 || negatives == 0) return 0.5;
    return (positive_rank_sum - 0.5 * positives * (positives + 1.0)) /
           (static_cast<double>(positives) * negatives);
}

double holdout_auc(const Dataset &data, const Eigen::VectorXd &beta) {
    const int holdout = static_cast<int>(data.labels.size()) - data.train_count;
    if (holdout <= 0) return 0.5;
    Eigen::VectorXd scores(holdout);
    Eigen::VectorXd labels(holdout);
    for (int i = 0; i < holdout; ++i) {
        scores[i] = data.features.row(data.train_count + i).dot(beta);
        labels[i] = data.labels[data.train_count + i];
    }
    return auc_score(scores, labels);
}

}  // namespace gradcode
