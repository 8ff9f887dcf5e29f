#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace gradcode {

/// Binary-classification dataset partitioned for distributed training.
/// Rows [0, train_count) are training samples split into `subsets`; rows
/// [train_count, end) form the held-out split used for the AUC metric.
struct Dataset {
    Eigen::MatrixXd features;  ///< one sample per row
    Eigen::VectorXd labels;    ///< -1 or +1
    int train_count = 0;
    std::vector<std::vector<int>> subsets;  ///< k lists of training row indices
    int round_robin_tail = 0;               ///< training rows assigned round-robin
    Eigen::VectorXd planted_beta;           ///< generator only; empty for CSV data

    int dim() const { return static_cast<int>(features.cols()); }
};

/// Gaussian features with labels drawn from a planted logistic model. Exactly
/// `samples` training rows split into k subsets (equal when k | samples,
/// trailing remainder round-robin) plus ceil(holdout_fraction * samples)
/// extra held-out rows.
Dataset synth_data(int samples, int dim, int k, double holdout_fraction, std::uint64_t seed);

/// CSV with a header row; the last column is the label in {-1, +1} or {0, 1}
/// (0 maps to -1). Rows are shuffled with the seed, then split like
/// synth_data: the holdout fraction is carved off the end.
Dataset load_csv_dataset(const std::string &path, int k, double holdout_fraction,
                         std::uint64_t seed);

/// Partial gradient of the logistic loss sum_{rows} ln(1 + exp(-y <x, beta>)):
/// sum over the rows of -y x sigma(-y <x, beta>).
Eigen::VectorXd partial_gradient(const Eigen::MatrixXd &features, const Eigen::VectorXd &labels,
                                 const std::vector<int> &rows, const Eigen::VectorXd &beta);

/// Mean logistic loss over the training rows.
double mean_logistic_loss(const Dataset &data, const Eigen::VectorXd &beta);

/// Area under the ROC curve by the rank statistic (ties get average ranks);
/// 0.5 when one class is absent.
double auc_score(const Eigen::VectorXd &scores, const Eigen::VectorXd &labels);

/// AUC of <x, beta> on the held-out split.
double holdout_auc(const Dataset &data, const Eigen::VectorXd &beta);

}  // namespace gradcode
