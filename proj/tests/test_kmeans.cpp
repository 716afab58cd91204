#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "drought/error.hpp"
#include "drought/feature_matrix.hpp"
#include "drought/kmeans.hpp"
#include "drought/labeling.hpp"
#include "drought/rng.hpp"
#include "drought/synth.hpp"

using namespace drought;

namespace {

Eigen::MatrixXd points_1d(std::initializer_list<double> xs) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(xs.size()), 1);
    Eigen::Index i = 0;
    for (double x : xs) m(i++, 0) = x;
    return m;
}

// fraction of rows where assignments agree with tags under the best label map
double best_match_agreement(const std::vector<int>& assignments, const std::vector<int>& tags,
                            int k) {
    std::vector<int> perm(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) perm[static_cast<std::size_t>(i)] = i;
    std::size_t best = 0;
    do {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < assignments.size(); ++i) {
            if (perm[static_cast<std::size_t>(assignments[i])] == tags[i]) ++hits;
        }
        best = std::max(best, hits);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(best) / static_cast<double>(assignments.size());
}

}  // namespace

TEST_CASE("forced optimal partition on 1-D points") {
    auto model = kmeans_fit(points_1d({0, 1, 9, 10}), 2, 0);
    std::vector<double> centers{model.centroids(0, 0), model.centroids(1, 0)};
    std::sort(centers.begin(), centers.end());
    CHECK(centers[0] == doctest::Approx(0.5));
    CHECK(centers[1] == doctest::Approx(9.5));
    CHECK(model.inertia == doctest::Approx(1.0));
}

TEST_CASE("k equal to n gives zero inertia") {
    auto model = kmeans_fit(points_1d({0, 1, 9, 10}), 4, 0);
    CHECK(model.inertia == doctest::Approx(0.0));
}

TEST_CASE("every cluster is non-empty after fit") {
    Rng rng(21);
    Eigen::MatrixXd x(30, 2);
    for (Eigen::Index i = 0; i < 30; ++i) {
        x(i, 0) = rng.normal();
        x(i, 1) = rng.normal();
    }
    auto model = kmeans_fit(x, 7, 3);
    std::set<int> seen(model.assignments.begin(), model.assignments.end());
    CHECK(seen.size() == 7);
}

TEST_CASE("k greater than n is rejected, as is non-finite input") {
    CHECK_THROWS_AS(kmeans_fit(points_1d({0, 1}), 3, 0), NumericError);
    Eigen::MatrixXd bad = points_1d({0, 1});
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(kmeans_fit(bad, 1, 0), NumericError);
}

TEST_CASE("assign picks the nearest centroid with the low-index tie rule") {
    Eigen::MatrixXd centroids = points_1d({0, 10});
    CHECK(assign(Eigen::VectorXd::Constant(1, 1.0), centroids) == 0);
    CHECK(assign(Eigen::VectorXd::Constant(1, 5.0), centroids) == 0);  // tie
    CHECK(assign(Eigen::VectorXd::Constant(1, 8.0), centroids) == 1);
    CHECK_THROWS_AS(assign(Eigen::VectorXd::Zero(2), centroids), NumericError);
}

TEST_CASE("assign matches an exhaustive nearest search") {
    Rng rng(17);
    Eigen::MatrixXd centroids(5, 3);
    for (Eigen::Index i = 0; i < centroids.size(); ++i) centroids.data()[i] = rng.normal();
    for (int q = 0; q < 100; ++q) {
        Eigen::VectorXd point(3);
        for (int j = 0; j < 3; ++j) point(j) = rng.normal();
        int brute = 0;
        double best = std::numeric_limits<double>::infinity();
        for (int c = 0; c < 5; ++c) {
            const double d = (centroids.row(c).transpose() - point).squaredNorm();
            if (d < best) {
                best = d;
                brute = c;
            }
        }
        CHECK(assign(point, centroids) == brute);
    }
}

TEST_CASE("wcss basics") {
    CHECK(wcss(points_1d({0, 2}), {0, 0}, points_1d({1})) == doctest::Approx(2.0));
    CHECK(wcss(points_1d({3, 7}), {0, 1}, points_1d({3, 7})) == doctest::Approx(0.0));
}

TEST_CASE("wcss equals naive two-loop recomputation") {
    Rng rng(29);
    Eigen::MatrixXd x(50, 4);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
    Eigen::MatrixXd centroids(3, 4);
    for (Eigen::Index i = 0; i < centroids.size(); ++i) centroids.data()[i] = rng.normal();
    std::vector<int> assignments(50);
    for (auto& a : assignments) a = static_cast<int>(rng.bounded(3));

    double naive = 0.0;
    for (int i = 0; i < 50; ++i) {
        for (int j = 0; j < 4; ++j) {
            const double diff = x(i, j) - centroids(assignments[static_cast<std::size_t>(i)], j);
            naive += diff * diff;
        }
    }
    CHECK(wcss(x, assignments, centroids) == doctest::Approx(naive).epsilon(1e-12));
}

TEST_CASE("elbow sweep inertia is non-increasing and hits zero at k = n") {
    auto pairs = elbow_sweep(points_1d({0, 1, 9, 10}), 1, 4, 0);
    REQUIRE(pairs.size() == 4);
    for (std::size_t i = 1; i < pairs.size(); ++i) CHECK(pairs[i].second <= pairs[i - 1].second);
    CHECK(pairs.back().second == doctest::Approx(0.0));
}

TEST_CASE("elbow sweep is deterministic for a fixed seed") {
    auto a = elbow_sweep(points_1d({0, 1, 2, 9, 10, 11}), 1, 4, 5);
    auto b = elbow_sweep(points_1d({0, 1, 2, 9, 10, 11}), 1, 4, 5);
    CHECK(a == b);
}

TEST_CASE("detect_elbow picks the maximal second difference") {
    // second differences: k=2 -> 15, k=3 -> 33, k=4 -> 1
    CHECK(detect_elbow({{1, 100}, {2, 50}, {3, 15}, {4, 13}, {5, 12}}) == 3);
}

TEST_CASE("detect_elbow tie rule picks the smallest interior k") {
    CHECK(detect_elbow({{1, 40}, {2, 30}, {3, 20}, {4, 10}}) == 2);
    CHECK_THROWS_AS(detect_elbow({{1, 2.0}, {2, 1.0}}), NumericError);
}

TEST_CASE("Lloyd never increases inertia across iterations") {
    // indirect check: the final wcss never exceeds any single-run inertia bound
    Rng rng(31);
    Eigen::MatrixXd x(60, 2);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
    KMeansParams one_iter;
    one_iter.n_init = 1;
    one_iter.max_iter = 1;
    KMeansParams many;
    many.n_init = 1;
    many.max_iter = 50;
    CHECK(kmeans_fit(x, 4, 7, many).inertia <= kmeans_fit(x, 4, 7, one_iter).inertia + 1e-12);
}

TEST_CASE("kmeans is deterministic and row-order invariant up to relabeling") {
    auto synth = generate(3, 2022, 2022, default_regimes(), 9);
    auto scaled = standardize(select_features(synth.dataset));

    auto a = kmeans_fit(scaled.values, 3, 123);
    auto b = kmeans_fit(scaled.values, 3, 123);
    CHECK(a.assignments == b.assignments);
    CHECK(a.inertia == doctest::Approx(b.inertia).epsilon(1e-15));

    // reverse row order
    Eigen::MatrixXd rev = scaled.values.colwise().reverse();
    auto c = kmeans_fit(rev, 3, 123);
    Dataset ds_fwd = synth.dataset;
    Dataset ds_rev = synth.dataset;
    std::reverse(ds_rev.records.begin(), ds_rev.records.end());
    std::reverse(ds_rev.source_labels.begin(), ds_rev.source_labels.end());
    auto canon_fwd = canonicalize_labels(a.assignments, ds_fwd).apply_all(a.assignments);
    auto canon_rev = canonicalize_labels(c.assignments, ds_rev).apply_all(c.assignments);
    std::reverse(canon_rev.begin(), canon_rev.end());
    CHECK(canon_fwd == canon_rev);
}

TEST_CASE("3-regime synthetic blobs are recovered exactly at k = 3") {
    auto synth = generate(5, 2022, 2023, default_regimes(), 42);
    auto scaled = standardize(select_features(synth.dataset));
    auto model = kmeans_fit(scaled.values, 3, 42);
    CHECK(best_match_agreement(model.assignments, synth.regime_tags, 3) >= 0.999);
}

TEST_CASE("elbow on the 3-regime synthetic detects 3") {
    auto synth = generate(3, 2022, 2022, default_regimes(), 42);
    auto scaled = standardize(select_features(synth.dataset));
    KMeansParams fast;
    fast.n_init = 3;
    auto pairs = elbow_sweep(scaled.values, 1, 8, 42, fast);
    CHECK(detect_elbow(pairs) == 3);
}

TEST_CASE("silhouette matches the pairwise definition on two 1-D clusters") {
    auto x = points_1d({0, 1, 10, 11});
    CHECK(silhouette_score(x, {0, 0, 1, 1}) == doctest::Approx(0.8997).epsilon(1e-3));
}

TEST_CASE("identical points in different clusters score non-positive") {
    auto x = points_1d({0, 0, 5});
    std::vector<int> assignments{0, 1, 1};
    // point 0 and point 1 coincide but sit in different clusters
    CHECK(silhouette_score(x, assignments) <= 0.5);  // dragged down by the pair
}

TEST_CASE("silhouette rejects a single cluster") {
    CHECK_THROWS_AS(silhouette_score(points_1d({0, 1, 2}), {0, 0, 0}), NumericError);
}

TEST_CASE("well separated blobs score high, arbitrary splits score low") {
    Rng rng(77);
    Eigen::MatrixXd blobs(100, 2);
    std::vector<int> labels(100);
    for (Eigen::Index i = 0; i < 100; ++i) {
        const int c = i < 50 ? 0 : 1;
        labels[static_cast<std::size_t>(i)] = c;
        blobs(i, 0) = 20.0 * c + rng.normal();
        blobs(i, 1) = rng.normal();
    }
    CHECK(silhouette_score(blobs, labels) > 0.9);

    std::vector<int> arbitrary(100);
    for (std::size_t i = 0; i < 100; ++i) arbitrary[i] = static_cast<int>(i % 2);
    Eigen::MatrixXd single(100, 2);
    for (Eigen::Index i = 0; i < single.size(); ++i) single.data()[i] = rng.normal();
    CHECK(silhouette_score(single, arbitrary) < 0.3);
}

TEST_CASE("sampled silhouette stays close to the full score") {
    Rng rng(55);
    Eigen::MatrixXd blobs(400, 2);
    std::vector<int> labels(400);
    for (Eigen::Index i = 0; i < 400; ++i) {
        const int c = i < 200 ? 0 : 1;
        labels[static_cast<std::size_t>(i)] = c;
        blobs(i, 0) = 8.0 * c + rng.normal();
        blobs(i, 1) = rng.normal();
    }
    const double full = silhouette_score(blobs, labels);
    const double sampled = silhouette_score(blobs, labels, 100, 7);
    CHECK(sampled == doctest::Approx(full).epsilon(0.05));
}
