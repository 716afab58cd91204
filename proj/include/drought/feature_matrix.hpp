#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "drought/dataset.hpp"

namespace drought {

struct RowKey {
    std::string district;
    int year = 0;
    int doy = 0;
    double latitude = 0.0;
    double longitude = 0.0;
};

struct FeatureMatrix {
    Eigen::MatrixXd values;  // n_rows x n_features
    std::vector<std::string> feature_names;
    std::vector<RowKey> row_keys;
    bool scaled = false;
    Eigen::VectorXd means;  // valid when scaled
    Eigen::VectorXd stds;   // valid when scaled; 1 for constant columns

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
};

struct SplitIndices {
    std::vector<Eigen::Index> train_rows;
    std::vector<Eigen::Index> test_rows;
    std::uint64_t seed = 0;
    double ratio = 0.0;
};

// Default feature set is the 11 weather parameters; identifiers (lat, lon,
// year, doy) are carried in row_keys and become features only when requested.
FeatureMatrix select_features(const Dataset& dataset, bool include_identifiers = false);

FeatureMatrix standardize(const FeatureMatrix& matrix);
Eigen::MatrixXd inverse_transform(const FeatureMatrix& scaled);

// Scale a raw query row with a fitted matrix's (mean, std) pairs.
Eigen::VectorXd apply_scaling(const FeatureMatrix& scaled, const Eigen::VectorXd& raw);

// Pearson correlation; constant columns correlate 0 with everything, 1 with
// themselves.
Eigen::MatrixXd correlation_matrix(const FeatureMatrix& matrix);

SplitIndices split_train_test(Eigen::Index n_rows, double ratio, std::uint64_t seed);

void write_correlation_csv(const Eigen::MatrixXd& corr,
                           const std::vector<std::string>& names,
                           const std::string& path);

}  // namespace drought
