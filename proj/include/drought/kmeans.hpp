#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

namespace drought {

struct KMeansModel {
    int k = 0;
    Eigen::MatrixXd centroids;  // k x n_features
    double inertia = 0.0;
    std::vector<int> assignments;
    int iterations_run = 0;
    std::uint64_t seed = 0;
};

struct KMeansParams {
    int n_init = 10;
    int max_iter = 300;
    double tol = 1e-4;  // relative inertia change
};

KMeansModel kmeans_fit(const Eigen::MatrixXd& X, int k, std::uint64_t seed,
                       const KMeansParams& params = {});

// Nearest centroid by squared Euclidean distance; ties go to the lowest index.
int assign(const Eigen::VectorXd& point, const Eigen::MatrixXd& centroids);

double wcss(const Eigen::MatrixXd& X, const std::vector<int>& assignments,
            const Eigen::MatrixXd& centroids);

std::vector<std::pair<int, double>> elbow_sweep(const Eigen::MatrixXd& X, int k_min,
                                                int k_max, std::uint64_t seed,
                                                const KMeansParams& params = {});

// k with maximal second difference of inertia; ties go to the smallest k.
int detect_elbow(const std::vector<std::pair<int, double>>& pairs);

double silhouette_score(const Eigen::MatrixXd& X, const std::vector<int>& assignments,
                        std::size_t sample_cap = 10000, std::uint64_t seed = 0);

}  // namespace drought
