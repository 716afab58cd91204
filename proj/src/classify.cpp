#include "drought/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "drought/error.hpp"
#include "drought/rng.hpp"

namespace drought {

namespace {

constexpr double kLn2Pi = 1.8378770664093454835606594728112;

int count_classes(const std::vector<int>& labels) {
    int k = 0;
    for (int y : labels) {
        if (y < 0) throw NumericError("negative class label");
        k = std::max(k, y + 1);
    }
    return k;
}

int majority_class(const std::vector<int>& votes) {
    // ties go to the smallest class id
    int best = -1;
    int best_count = 0;
    for (std::size_t c = 0; c < votes.size(); ++c) {
        if (votes[c] > best_count) {
            best_count = votes[c];
            best = static_cast<int>(c);
        }
    }
    return best;
}

}  // namespace

// ---------------------------------------------------------------- KNN

KnnModel knn_fit(const Eigen::MatrixXd& train, const std::vector<int>& labels, int k_neighbors) {
    if (static_cast<Eigen::Index>(labels.size()) != train.rows()) {
        throw NumericError("label count mismatch");
    }
    if (k_neighbors < 1 || static_cast<Eigen::Index>(k_neighbors) > train.rows()) {
        throw ConfigError("k_neighbors out of range [1, n_train]");
    }
    KnnModel m;
    m.train = train;
    m.labels = labels;
    m.k_neighbors = k_neighbors;
    m.class_count = count_classes(labels);
    return m;
}

namespace {

int knn_vote(const KnnModel& model, const Eigen::VectorXd& d2) {
    const auto n = model.train.rows();
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    const auto cmp = [&](Eigen::Index a, Eigen::Index b) {
        if (d2(a) != d2(b)) return d2(a) < d2(b);
        return a < b;  // distance ties resolved by lower row index
    };
    const auto k = static_cast<std::size_t>(model.k_neighbors);
    std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k) - 1, idx.end(), cmp);

    std::vector<int> votes(static_cast<std::size_t>(model.class_count), 0);
    for (std::size_t i = 0; i < k; ++i) {
        votes[static_cast<std::size_t>(model.labels[static_cast<std::size_t>(idx[i])])]++;
    }
    return majority_class(votes);
}

}  // namespace

int knn_predict(const KnnModel& model, const Eigen::VectorXd& query) {
    if (query.size() != model.train.cols()) throw NumericError("query dimension mismatch");
    Eigen::VectorXd d2 = (model.train.rowwise() - query.transpose()).rowwise().squaredNorm();
    return knn_vote(model, d2);
}

std::vector<int> knn_predict_batch(const KnnModel& model, const Eigen::MatrixXd& queries) {
    if (queries.cols() != model.train.cols()) throw NumericError("query dimension mismatch");
    const Eigen::Index nq = queries.rows();
    std::vector<int> out(static_cast<std::size_t>(nq));

    const Eigen::VectorXd tn = model.train.rowwise().squaredNorm();
    const Eigen::Index chunk = 256;
    for (Eigen::Index b = 0; b < nq; b += chunk) {
        const Eigen::Index len = std::min(chunk, nq - b);
        Eigen::MatrixXd d2 = -2.0 * (model.train * queries.middleRows(b, len).transpose());
        d2.colwise() += tn;
        Eigen::VectorXd qn = queries.middleRows(b, len).rowwise().squaredNorm();
        d2.rowwise() += qn.transpose();
        for (Eigen::Index j = 0; j < len; ++j) {
            out[static_cast<std::size_t>(b + j)] = knn_vote(model, d2.col(j).cwiseMax(0.0));
        }
    }
    return out;
}

// ---------------------------------------------------------------- Gaussian NB

GnbModel gnb_fit(const Eigen::MatrixXd& train, const std::vector<int>& labels) {
    if (static_cast<Eigen::Index>(labels.size()) != train.rows()) {
        throw NumericError("label count mismatch");
    }
    const int k = count_classes(labels);
    const Eigen::Index n = train.rows();
    const Eigen::Index d = train.cols();

    std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
    for (int y : labels) counts[static_cast<std::size_t>(y)]++;
    for (int c = 0; c < k; ++c) {
        if (counts[static_cast<std::size_t>(c)] < 2) {
            throw NumericError("insufficient data: class " + std::to_string(c) +
                               " has fewer than 2 training rows");
        }
    }

    GnbModel m;
    m.class_count = k;
    m.means = Eigen::MatrixXd::Zero(k, d);
    m.variances = Eigen::MatrixXd::Zero(k, d);
    m.log_priors.resize(k);

    for (Eigen::Index i = 0; i < n; ++i) m.means.row(labels[static_cast<std::size_t>(i)]) += train.row(i);
    for (int c = 0; c < k; ++c) m.means.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int c = labels[static_cast<std::size_t>(i)];
        m.variances.row(c) += (train.row(i) - m.means.row(c)).array().square().matrix();
    }
    for (int c = 0; c < k; ++c) m.variances.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);

    // variance smoothing keyed to the largest overall feature variance
    Eigen::VectorXd global_mean = train.colwise().mean();
    const double max_var =
        (train.rowwise() - global_mean.transpose()).array().square().colwise().mean().maxCoeff();
    m.variances.array() += 1e-9 * std::max(max_var, 1.0e-300);

    for (int c = 0; c < k; ++c) {
        m.log_priors(c) = std::log(static_cast<double>(counts[static_cast<std::size_t>(c)]) /
                                   static_cast<double>(n));
    }
    return m;
}

Eigen::VectorXd gnb_log_posterior(const GnbModel& model, const Eigen::VectorXd& query) {
    if (query.size() != model.means.cols()) throw NumericError("query dimension mismatch");
    Eigen::VectorXd lp(model.class_count);
    for (int c = 0; c < model.class_count; ++c) {
        const auto mu = model.means.row(c).transpose().array();
        const auto var = model.variances.row(c).transpose().array();
        lp(c) = model.log_priors(c) -
                0.5 * ((kLn2Pi + var.log()) + (query.array() - mu).square() / var).sum();
    }
    return lp;
}

int gnb_predict(const GnbModel& model, const Eigen::VectorXd& query) {
    Eigen::VectorXd lp = gnb_log_posterior(model, query);
    int best = 0;
    for (int c = 1; c < model.class_count; ++c) {
        if (lp(c) > lp(best)) best = c;  // ties keep the smallest class id
    }
    return best;
}

// ---------------------------------------------------------------- Decision tree

double gini(const std::vector<int>& class_counts) {
    long total = 0;
    for (int c : class_counts) {
        if (c < 0) throw NumericError("negative class count");
        total += c;
    }
    if (total == 0) throw NumericError("gini of empty node");
    double sum_sq = 0.0;
    for (int c : class_counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

namespace {

struct TreeBuilder {
    const Eigen::MatrixXd& X;
    const std::vector<int>& y;
    const TreeParams& params;
    int class_count;
    TreeModel& model;
    Rng* feature_rng = nullptr;  // set for forest trees
    int max_features = -1;

    int build(std::vector<Eigen::Index>& rows, int depth) {
        std::vector<int> counts(static_cast<std::size_t>(class_count), 0);
        for (Eigen::Index r : rows) counts[static_cast<std::size_t>(y[static_cast<std::size_t>(r)])]++;

        const auto n = static_cast<long>(rows.size());
        int majority = 0;
        for (int c = 1; c < class_count; ++c) {
            if (counts[static_cast<std::size_t>(c)] > counts[static_cast<std::size_t>(majority)]) {
                majority = c;
            }
        }
        const bool pure =
            counts[static_cast<std::size_t>(majority)] == n;

        if (pure || n < params.min_samples_split ||
            (params.max_depth >= 0 && depth >= params.max_depth)) {
            return make_leaf(majority, std::move(counts));
        }

        const auto [feature, threshold, found] = best_split(rows);
        if (!found) return make_leaf(majority, std::move(counts));

        std::vector<Eigen::Index> left, right;
        for (Eigen::Index r : rows) {
            (X(r, feature) <= threshold ? left : right).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        const int node = static_cast<int>(model.nodes.size());
        model.nodes.emplace_back();
        model.nodes[static_cast<std::size_t>(node)].feature = feature;
        model.nodes[static_cast<std::size_t>(node)].threshold = threshold;
        model.nodes[static_cast<std::size_t>(node)].class_counts = std::move(counts);
        const int l = build(left, depth + 1);
        const int r = build(right, depth + 1);
        model.nodes[static_cast<std::size_t>(node)].left = l;
        model.nodes[static_cast<std::size_t>(node)].right = r;
        return node;
    }

    int make_leaf(int cls, std::vector<int>&& counts) {
        const int node = static_cast<int>(model.nodes.size());
        model.nodes.emplace_back();
        model.nodes[static_cast<std::size_t>(node)].leaf_class = cls;
        model.nodes[static_cast<std::size_t>(node)].class_counts = std::move(counts);
        return node;
    }

    std::tuple<int, double, bool> best_split(const std::vector<Eigen::Index>& rows) {
        const int d = static_cast<int>(X.cols());
        std::vector<int> features;
        if (feature_rng && max_features < d) {
            // distinct random features, ascending for the split tie rule
            std::vector<int> all(static_cast<std::size_t>(d));
            std::iota(all.begin(), all.end(), 0);
            for (int i = 0; i < max_features; ++i) {
                const auto j = i + static_cast<int>(feature_rng->bounded(
                                       static_cast<std::uint64_t>(d - i)));
                std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(j)]);
            }
            features.assign(all.begin(), all.begin() + max_features);
            std::sort(features.begin(), features.end());
        } else {
            features.resize(static_cast<std::size_t>(d));
            std::iota(features.begin(), features.end(), 0);
        }

        const auto n = static_cast<long>(rows.size());
        double best_impurity = std::numeric_limits<double>::infinity();
        int best_feature = -1;
        double best_threshold = 0.0;

        std::vector<std::pair<double, int>> vals;
        vals.reserve(rows.size());
        std::vector<long> left_counts(static_cast<std::size_t>(class_count));

        for (int f : features) {
            vals.clear();
            for (Eigen::Index r : rows) {
                vals.emplace_back(X(r, f), y[static_cast<std::size_t>(r)]);
            }
            std::sort(vals.begin(), vals.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });

            std::fill(left_counts.begin(), left_counts.end(), 0L);
            double left_sq = 0.0;   // sum over classes of count^2, left side
            double right_sq = 0.0;
            std::vector<long> right_counts(static_cast<std::size_t>(class_count), 0);
            for (const auto& [v, cls] : vals) right_counts[static_cast<std::size_t>(cls)]++;
            for (long c : right_counts) right_sq += static_cast<double>(c) * static_cast<double>(c);

            long nl = 0;
            for (long i = 0; i + 1 < n; ++i) {
                const int cls = vals[static_cast<std::size_t>(i)].second;
                auto& lc = left_counts[static_cast<std::size_t>(cls)];
                auto& rc = right_counts[static_cast<std::size_t>(cls)];
                left_sq += 2.0 * static_cast<double>(lc) + 1.0;
                right_sq -= 2.0 * static_cast<double>(rc) - 1.0;
                ++lc;
                --rc;
                ++nl;
                const double v = vals[static_cast<std::size_t>(i)].first;
                const double next = vals[static_cast<std::size_t>(i) + 1].first;
                if (v == next) continue;  // only split between distinct values
                const long nr = n - nl;
                if (nl < params.min_samples_leaf || nr < params.min_samples_leaf) continue;
                // child-count-weighted Gini, scaled by n (constant per node)
                const double impurity = (static_cast<double>(nl) - left_sq / static_cast<double>(nl)) +
                                        (static_cast<double>(nr) - right_sq / static_cast<double>(nr));
                if (impurity < best_impurity) {
                    best_impurity = impurity;
                    best_feature = f;
                    best_threshold = 0.5 * (v + next);
                }
            }
        }
        return {best_feature, best_threshold, best_feature >= 0};
    }
};

}  // namespace

TreeModel dtree_fit(const Eigen::MatrixXd& train, const std::vector<int>& labels,
                    const TreeParams& params) {
    if (train.rows() == 0) throw NumericError("empty training set");
    if (static_cast<Eigen::Index>(labels.size()) != train.rows()) {
        throw NumericError("label count mismatch");
    }
    TreeModel model;
    model.class_count = count_classes(labels);
    TreeBuilder builder{train, labels, params, model.class_count, model};
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(train.rows()));
    std::iota(rows.begin(), rows.end(), Eigen::Index{0});
    builder.build(rows, 0);
    return model;
}

int dtree_predict(const TreeModel& model, const Eigen::VectorXd& query) {
    if (model.nodes.empty()) throw NumericError("empty tree");
    int node = 0;
    for (;;) {
        const TreeNode& t = model.nodes[static_cast<std::size_t>(node)];
        if (t.feature < 0) return t.leaf_class;
        if (t.feature >= query.size()) throw NumericError("query dimension mismatch");
        node = query(t.feature) <= t.threshold ? t.left : t.right;
    }
}

// ---------------------------------------------------------------- Random forest

ForestModel rf_fit(const Eigen::MatrixXd& train, const std::vector<int>& labels,
                   std::uint64_t seed, const ForestParams& params) {
    if (train.rows() == 0) throw NumericError("empty training set");
    if (params.n_trees < 1) throw ConfigError("n_trees must be at least 1");

    ForestModel forest;
    forest.class_count = count_classes(labels);
    forest.seed = seed;

    const int d = static_cast<int>(train.cols());
    const int max_features =
        params.max_features > 0
            ? std::min(params.max_features, d)
            : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))));

    Rng master(seed);
    const Eigen::Index n = train.rows();
    for (int t = 0; t < params.n_trees; ++t) {
        Rng tree_rng(master.derive(static_cast<std::uint64_t>(t)));

        Eigen::MatrixXd sample_x;
        std::vector<int> sample_y;
        if (params.bootstrap) {
            sample_x.resize(n, train.cols());
            sample_y.resize(static_cast<std::size_t>(n));
            for (Eigen::Index i = 0; i < n; ++i) {
                const auto pick =
                    static_cast<Eigen::Index>(tree_rng.bounded(static_cast<std::uint64_t>(n)));
                sample_x.row(i) = train.row(pick);
                sample_y[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(pick)];
            }
        } else {
            sample_x = train;
            sample_y = labels;
        }

        TreeModel tree;
        tree.class_count = forest.class_count;
        TreeBuilder builder{sample_x, sample_y, params.tree, forest.class_count, tree,
                            &tree_rng, max_features};
        std::vector<Eigen::Index> rows(static_cast<std::size_t>(sample_x.rows()));
        std::iota(rows.begin(), rows.end(), Eigen::Index{0});
        builder.build(rows, 0);
        forest.trees.push_back(std::move(tree));
    }
    return forest;
}

int rf_predict(const ForestModel& model, const Eigen::VectorXd& query) {
    std::vector<int> votes(static_cast<std::size_t>(model.class_count), 0);
    for (const auto& tree : model.trees) {
        votes[static_cast<std::size_t>(dtree_predict(tree, query))]++;
    }
    return majority_class(votes);
}

// ---------------------------------------------------------------- Shared contract

int ClassifierModel::predict(const Eigen::VectorXd& query) const {
    return std::visit(
        [&](const auto& m) -> int {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, KnnModel>) return knn_predict(m, query);
            else if constexpr (std::is_same_v<T, GnbModel>) return gnb_predict(m, query);
            else if constexpr (std::is_same_v<T, TreeModel>) return dtree_predict(m, query);
            else return rf_predict(m, query);
        },
        model);
}

int ClassifierModel::class_count() const {
    return std::visit(
        [](const auto& m) -> int {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, TreeModel> || std::is_same_v<T, ForestModel> ||
                          std::is_same_v<T, KnnModel> || std::is_same_v<T, GnbModel>) {
                return m.class_count;
            }
        },
        model);
}

double ConfusionMatrix::accuracy() const {
    const long t = total();
    if (t == 0) return 0.0;
    return static_cast<double>(trace()) / static_cast<double>(t);
}

ConfusionMatrix evaluate(const ClassifierModel& model, const Eigen::MatrixXd& test,
                         const std::vector<int>& labels) {
    if (test.rows() == 0) throw NumericError("empty test set");
    if (static_cast<Eigen::Index>(labels.size()) != test.rows()) {
        throw NumericError("label count mismatch");
    }
    const int k = model.class_count();

    std::vector<int> predictions;
    if (const auto* knn = std::get_if<KnnModel>(&model.model)) {
        predictions = knn_predict_batch(*knn, test);
    } else {
        predictions.resize(static_cast<std::size_t>(test.rows()));
        for (Eigen::Index i = 0; i < test.rows(); ++i) {
            predictions[static_cast<std::size_t>(i)] = model.predict(test.row(i).transpose());
        }
    }

    ConfusionMatrix cm;
    cm.counts = Eigen::MatrixXi::Zero(k, k);
    for (Eigen::Index i = 0; i < test.rows(); ++i) {
        const int a = labels[static_cast<std::size_t>(i)];
        const int p = predictions[static_cast<std::size_t>(i)];
        if (a < 0 || a >= k) throw NumericError("test label out of class range");
        cm.counts(a, p)++;
    }
    return cm;
}

}  // namespace drought
