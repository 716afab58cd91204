#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "drought/classify.hpp"
#include "drought/error.hpp"
#include "drought/feature_matrix.hpp"
#include "drought/rng.hpp"
#include "drought/synth.hpp"

using namespace drought;

namespace {

// brute-force reference: full sort by (squared distance, row index), majority
// vote with smallest class id on ties
int knn_reference(const Eigen::MatrixXd& train, const std::vector<int>& labels, int k,
                  const Eigen::VectorXd& query) {
    std::vector<std::pair<double, Eigen::Index>> dist;
    for (Eigen::Index i = 0; i < train.rows(); ++i) {
        dist.emplace_back((train.row(i).transpose() - query).squaredNorm(), i);
    }
    std::sort(dist.begin(), dist.end());
    std::map<int, int> votes;
    for (int i = 0; i < k; ++i) ++votes[labels[static_cast<std::size_t>(dist[static_cast<std::size_t>(i)].second)]];
    int best = -1, best_count = -1;
    for (const auto& [cls, count] : votes) {
        if (count > best_count) {
            best = cls;
            best_count = count;
        }
    }
    return best;
}

struct LabeledData {
    Eigen::MatrixXd x;
    std::vector<int> y;
};

LabeledData gaussian_classes(int n_per, int classes, int dims, double sep, std::uint64_t seed) {
    Rng rng(seed);
    LabeledData d;
    d.x.resize(n_per * classes, dims);
    d.y.resize(static_cast<std::size_t>(n_per) * static_cast<std::size_t>(classes));
    for (int c = 0; c < classes; ++c) {
        for (int i = 0; i < n_per; ++i) {
            const Eigen::Index row = c * n_per + i;
            for (int j = 0; j < dims; ++j) d.x(row, j) = sep * c + rng.normal();
            d.y[static_cast<std::size_t>(row)] = c;
        }
    }
    return d;
}

}  // namespace

TEST_CASE("knn matches the brute-force reference over 100 random queries") {
    auto data = gaussian_classes(40, 3, 4, 2.0, 2);
    auto model = knn_fit(data.x, data.y, 5);
    Rng rng(8);
    for (int q = 0; q < 100; ++q) {
        Eigen::VectorXd query(4);
        for (int j = 0; j < 4; ++j) query(j) = 4.0 * rng.normal() + 2.0;
        CHECK(knn_predict(model, query) == knn_reference(data.x, data.y, 5, query));
    }
}

TEST_CASE("knn batch prediction equals one-by-one prediction") {
    auto data = gaussian_classes(50, 3, 5, 1.5, 4);
    auto model = knn_fit(data.x, data.y, 7);
    Eigen::MatrixXd queries(300, 5);
    Rng rng(6);
    for (Eigen::Index i = 0; i < queries.size(); ++i) queries.data()[i] = 3.0 * rng.normal();
    auto batch = knn_predict_batch(model, queries);
    REQUIRE(batch.size() == 300);
    for (Eigen::Index i = 0; i < queries.rows(); ++i) {
        CHECK(batch[static_cast<std::size_t>(i)] == knn_predict(model, queries.row(i).transpose()));
    }
}

TEST_CASE("knn k = 1 returns the nearest point's label; distance ties pick the lower row") {
    Eigen::MatrixXd train(3, 1);
    train << 0.0, 2.0, 2.0;
    auto model = knn_fit(train, {0, 1, 2}, 1);
    CHECK(knn_predict(model, Eigen::VectorXd::Constant(1, 1.9)) == 1);
    CHECK(knn_predict(model, Eigen::VectorXd::Constant(1, 1.0)) == 0);  // 0 vs 1 equidistant
}

TEST_CASE("knn vote ties break toward the smallest class id") {
    Eigen::MatrixXd train(4, 1);
    train << 0.0, 0.0, 1.0, 1.0;
    auto model = knn_fit(train, {2, 2, 1, 1}, 4);
    CHECK(knn_predict(model, Eigen::VectorXd::Constant(1, 0.5)) == 1);
}

TEST_CASE("knn rejects bad k and dimension mismatches") {
    Eigen::MatrixXd train(2, 2);
    train.setZero();
    CHECK_THROWS_AS(knn_fit(train, {0, 1}, 0), ConfigError);
    CHECK_THROWS_AS(knn_fit(train, {0, 1}, 3), ConfigError);
    auto model = knn_fit(train, {0, 1}, 1);
    CHECK_THROWS_AS(knn_predict(model, Eigen::VectorXd::Zero(3)), NumericError);
}

TEST_CASE("gaussian nb recovers class statistics") {
    Eigen::MatrixXd train(4, 1);
    train << 0.0, 2.0, 10.0, 12.0;
    auto model = gnb_fit(train, {0, 0, 1, 1});
    CHECK(model.means(0, 0) == doctest::Approx(1.0));
    CHECK(model.means(1, 0) == doctest::Approx(11.0));
    CHECK(model.variances(0, 0) == doctest::Approx(1.0).epsilon(1e-6));  // population variance
    CHECK(gnb_predict(model, Eigen::VectorXd::Constant(1, 1.5)) == 0);
    CHECK(gnb_predict(model, Eigen::VectorXd::Constant(1, 9.0)) == 1);
}

TEST_CASE("gnb log posterior matches a direct evaluation") {
    Eigen::MatrixXd train(6, 1);
    train << 0.0, 1.0, 2.0, 8.0, 9.0, 10.0;
    std::vector<int> y{0, 0, 0, 1, 1, 1};
    auto model = gnb_fit(train, y);
    const double q = 4.0;
    auto lp = gnb_log_posterior(model, Eigen::VectorXd::Constant(1, q));
    for (int c = 0; c < 2; ++c) {
        const double mu = model.means(c, 0);
        const double var = model.variances(c, 0);
        const double expect = std::log(0.5) - 0.5 * std::log(2.0 * M_PI * var) -
                              (q - mu) * (q - mu) / (2.0 * var);
        CHECK(lp(c) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("gnb priors follow the class frequencies") {
    Eigen::MatrixXd train(4, 1);
    train << 0.0, 0.1, 0.2, 10.0;
    CHECK_THROWS_WITH_AS(gnb_fit(train, {0, 0, 0, 1}), doctest::Contains("class 1"),
                         NumericError);  // classes need two rows for a variance
    Eigen::MatrixXd train6(6, 1);
    train6 << 0.0, 0.1, 0.2, 0.3, 10.0, 11.0;
    auto model = gnb_fit(train6, {0, 0, 0, 0, 1, 1});
    CHECK(std::exp(model.log_priors(0)) == doctest::Approx(2.0 / 3.0));
    CHECK(std::exp(model.log_priors(1)) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("gnb survives a zero-variance feature through smoothing") {
    Eigen::MatrixXd train(4, 2);
    train << 1.0, 0.0, 1.0, 1.0, 1.0, 9.0, 1.0, 10.0;
    auto model = gnb_fit(train, {0, 0, 1, 1});
    CHECK(model.variances.minCoeff() > 0.0);
    CHECK(gnb_predict(model, (Eigen::VectorXd(2) << 1.0, 0.5).finished()) == 0);
}

TEST_CASE("gini impurity hand values") {
    CHECK(gini({4, 0}) == doctest::Approx(0.0));
    CHECK(gini({2, 2}) == doctest::Approx(0.5));
    CHECK(gini({1, 1, 1}) == doctest::Approx(2.0 / 3.0));
    CHECK(gini({3, 1}) == doctest::Approx(0.375));
}

TEST_CASE("decision tree learns a 1-D threshold exactly") {
    Eigen::MatrixXd train(6, 1);
    train << 0.0, 1.0, 2.0, 5.0, 6.0, 7.0;
    std::vector<int> y{0, 0, 0, 1, 1, 1};
    auto model = dtree_fit(train, y);
    REQUIRE(!model.nodes.empty());
    CHECK(model.nodes[0].feature == 0);
    CHECK(model.nodes[0].threshold == doctest::Approx(3.5));  // midpoint of 2 and 5
    for (Eigen::Index i = 0; i < 6; ++i) {
        CHECK(dtree_predict(model, train.row(i).transpose()) == y[static_cast<std::size_t>(i)]);
    }
}

TEST_CASE("unrestricted tree reaches zero training error on consistent data") {
    auto data = gaussian_classes(30, 3, 3, 1.0, 12);
    auto model = dtree_fit(data.x, data.y);
    for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
        CHECK(dtree_predict(model, data.x.row(i).transpose()) ==
              data.y[static_cast<std::size_t>(i)]);
    }
}

TEST_CASE("max_depth 0 yields a single majority leaf") {
    Eigen::MatrixXd train(5, 1);
    train << 0, 1, 2, 3, 4;
    TreeParams p;
    p.max_depth = 0;
    auto model = dtree_fit(train, {1, 1, 1, 0, 0}, p);
    REQUIRE(model.nodes.size() == 1);
    CHECK(model.nodes[0].feature == -1);
    CHECK(model.nodes[0].leaf_class == 1);
}

TEST_CASE("leaf class ties break to the smallest class id") {
    Eigen::MatrixXd train(2, 1);
    train << 0.0, 0.0;  // unsplittable
    auto model = dtree_fit(train, {3, 1});
    REQUIRE(model.nodes.size() == 1);
    CHECK(model.nodes[0].leaf_class == 1);
}

TEST_CASE("min_samples_leaf bounds every leaf") {
    auto data = gaussian_classes(25, 2, 2, 0.5, 31);
    TreeParams p;
    p.min_samples_leaf = 5;
    auto model = dtree_fit(data.x, data.y, p);
    for (const auto& node : model.nodes) {
        if (node.feature == -1) {
            int total = 0;
            for (int c : node.class_counts) total += c;
            CHECK(total >= 5);
        }
    }
}

TEST_CASE("tree split matches an exhaustive best-split search on a small case") {
    Rng rng(40);
    Eigen::MatrixXd train(20, 2);
    std::vector<int> y(20);
    for (Eigen::Index i = 0; i < 20; ++i) {
        train(i, 0) = rng.uniform();
        train(i, 1) = rng.uniform();
        y[static_cast<std::size_t>(i)] = static_cast<int>(rng.bounded(2));
    }
    TreeParams p;
    p.max_depth = 1;
    auto model = dtree_fit(train, y, p);
    REQUIRE(model.nodes[0].feature != -1);

    // brute-force every midpoint split, weighted Gini, ties to lowest feature/threshold
    double best_score = std::numeric_limits<double>::infinity();
    int best_feature = -1;
    double best_threshold = 0.0;
    for (int f = 0; f < 2; ++f) {
        std::vector<double> vals;
        for (Eigen::Index i = 0; i < 20; ++i) vals.push_back(train(i, f));
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        for (std::size_t t = 0; t + 1 < vals.size(); ++t) {
            const double thr = 0.5 * (vals[t] + vals[t + 1]);
            std::vector<int> lc(2, 0), rc(2, 0);
            for (Eigen::Index i = 0; i < 20; ++i) {
                (train(i, f) <= thr ? lc : rc)[static_cast<std::size_t>(
                    y[static_cast<std::size_t>(i)])]++;
            }
            const double nl = lc[0] + lc[1], nr = rc[0] + rc[1];
            const double score = (nl * gini(lc) + nr * gini(rc)) / 20.0;
            if (score < best_score - 1e-12) {
                best_score = score;
                best_feature = f;
                best_threshold = thr;
            }
        }
    }
    CHECK(model.nodes[0].feature == best_feature);
    CHECK(model.nodes[0].threshold == doctest::Approx(best_threshold).epsilon(1e-12));
}

TEST_CASE("random forest is deterministic and at least as good as a shallow tree") {
    auto data = gaussian_classes(80, 3, 4, 1.2, 50);
    auto holdout = gaussian_classes(40, 3, 4, 1.2, 51);

    ForestParams fp;
    fp.n_trees = 30;
    auto forest_a = rf_fit(data.x, data.y, 7, fp);
    auto forest_b = rf_fit(data.x, data.y, 7, fp);

    TreeParams shallow;
    shallow.max_depth = 3;
    auto tree = dtree_fit(data.x, data.y, shallow);

    int forest_hits = 0, tree_hits = 0;
    for (Eigen::Index i = 0; i < holdout.x.rows(); ++i) {
        const Eigen::VectorXd q = holdout.x.row(i).transpose();
        const int truth = holdout.y[static_cast<std::size_t>(i)];
        const int pf = rf_predict(forest_a, q);
        CHECK(pf == rf_predict(forest_b, q));  // determinism
        forest_hits += (pf == truth);
        tree_hits += (dtree_predict(tree, q) == truth);
    }
    CHECK(forest_hits >= tree_hits);
}

TEST_CASE("single-tree forest without bootstrap equals the plain tree") {
    auto data = gaussian_classes(40, 2, 3, 2.0, 60);
    ForestParams fp;
    fp.n_trees = 1;
    fp.bootstrap = false;
    fp.max_features = 3;  // all features
    auto forest = rf_fit(data.x, data.y, 1, fp);
    auto tree = dtree_fit(data.x, data.y);
    Rng rng(61);
    for (int q = 0; q < 50; ++q) {
        Eigen::VectorXd query(3);
        for (int j = 0; j < 3; ++j) query(j) = 3.0 * rng.normal() + 1.0;
        CHECK(rf_predict(forest, query) == dtree_predict(tree, query));
    }
}

TEST_CASE("confusion matrix accounting is exact") {
    Eigen::MatrixXd train(8, 1);
    train << 0, 1, 2, 3, 10, 11, 12, 13;
    std::vector<int> y{0, 0, 0, 0, 1, 1, 1, 1};
    ClassifierModel clf{"knn", knn_fit(train, y, 3)};
    Eigen::MatrixXd test(4, 1);
    test << 1.5, 2.5, 11.5, 2.0;  // last one is labeled 1 but lands in class 0
    auto cm = evaluate(clf, test, {0, 0, 1, 1});
    CHECK(cm.total() == 4);
    CHECK(cm.trace() == 3);
    CHECK(cm.counts(1, 0) == 1);
    CHECK(cm.accuracy() == doctest::Approx(0.75));
    long row_sum = cm.counts.row(1).sum();
    CHECK(row_sum == 2);  // row sums equal actual class counts
}

TEST_CASE("all four classifiers clear 80 percent on the synthetic regimes") {
    auto synth = generate(2, 2022, 2022, default_regimes(), 5);
    auto scaled = standardize(select_features(synth.dataset));
    auto split = split_train_test(scaled.rows(), 0.8, 5);

    const auto take = [&](const std::vector<Eigen::Index>& rows) {
        Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), scaled.cols());
        std::vector<int> y(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            x.row(static_cast<Eigen::Index>(i)) = scaled.values.row(rows[i]);
            y[i] = synth.regime_tags[static_cast<std::size_t>(rows[i])];
        }
        return std::make_pair(x, y);
    };
    auto [xtr, ytr] = take(split.train_rows);
    auto [xte, yte] = take(split.test_rows);

    ForestParams fp;
    fp.n_trees = 20;
    std::vector<ClassifierModel> models;
    models.push_back({"knn", knn_fit(xtr, ytr, 5)});
    models.push_back({"gaussian_nb", gnb_fit(xtr, ytr)});
    models.push_back({"decision_tree", dtree_fit(xtr, ytr)});
    models.push_back({"random_forest", rf_fit(xtr, ytr, 5, fp)});
    for (const auto& m : models) {
        auto cm = evaluate(m, xte, yte);
        INFO(m.variant);
        CHECK(cm.accuracy() >= 0.80);
    }
}
