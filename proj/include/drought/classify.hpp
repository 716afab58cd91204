#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace drought {

// ---- K-nearest neighbours (lazy learner) ----
struct KnnModel {
    Eigen::MatrixXd train;  // n x d
    std::vector<int> labels;
    int k_neighbors = 5;
    int class_count = 0;
};

KnnModel knn_fit(const Eigen::MatrixXd& train, const std::vector<int>& labels,
                 int k_neighbors);
int knn_predict(const KnnModel& model, const Eigen::VectorXd& query);
std::vector<int> knn_predict_batch(const KnnModel& model, const Eigen::MatrixXd& queries);

// ---- Gaussian naive Bayes ----
struct GnbModel {
    Eigen::MatrixXd means;      // class_count x d
    Eigen::MatrixXd variances;  // class_count x d, smoothed
    Eigen::VectorXd log_priors;
    int class_count = 0;
};

GnbModel gnb_fit(const Eigen::MatrixXd& train, const std::vector<int>& labels);
int gnb_predict(const GnbModel& model, const Eigen::VectorXd& query);
// Per-class log posterior up to the shared evidence term.
Eigen::VectorXd gnb_log_posterior(const GnbModel& model, const Eigen::VectorXd& query);

// ---- Decision tree ----
struct TreeNode {
    int feature = -1;          // -1 marks a leaf
    double threshold = 0.0;    // left subtree holds rows with value <= threshold
    int left = -1;
    int right = -1;
    int leaf_class = -1;
    std::vector<int> class_counts;
};

struct TreeParams {
    int max_depth = -1;  // -1 = unlimited
    int min_samples_split = 2;
    int min_samples_leaf = 1;
};

struct TreeModel {
    std::vector<TreeNode> nodes;  // node 0 is the root
    int class_count = 0;
};

double gini(const std::vector<int>& class_counts);

TreeModel dtree_fit(const Eigen::MatrixXd& train, const std::vector<int>& labels,
                    const TreeParams& params = {});
int dtree_predict(const TreeModel& model, const Eigen::VectorXd& query);

// ---- Random forest ----
struct ForestParams {
    int n_trees = 100;
    int max_features = -1;  // -1 = ceil(sqrt(d))
    bool bootstrap = true;
    TreeParams tree;
};

struct ForestModel {
    std::vector<TreeModel> trees;
    int class_count = 0;
    std::uint64_t seed = 0;
};

ForestModel rf_fit(const Eigen::MatrixXd& train, const std::vector<int>& labels,
                   std::uint64_t seed, const ForestParams& params = {});
int rf_predict(const ForestModel& model, const Eigen::VectorXd& query);

// ---- Shared predict contract ----
struct ClassifierModel {
    std::string variant;  // knn | gaussian_nb | decision_tree | random_forest
    std::variant<KnnModel, GnbModel, TreeModel, ForestModel> model;

    int predict(const Eigen::VectorXd& query) const;
    int class_count() const;
};

// ---- Evaluation ----
struct ConfusionMatrix {
    Eigen::MatrixXi counts;  // rows = actual, columns = predicted

    long total() const { return counts.sum(); }
    long trace() const { return counts.diagonal().sum(); }
    double accuracy() const;
};

ConfusionMatrix evaluate(const ClassifierModel& model, const Eigen::MatrixXd& test,
                         const std::vector<int>& labels);

}  // namespace drought
