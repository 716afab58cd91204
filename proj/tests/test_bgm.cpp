#include <doctest.h>

#include <algorithm>
#include <set>

#include "drought/bgm.hpp"
#include "drought/error.hpp"
#include "drought/feature_matrix.hpp"
#include "drought/rng.hpp"
#include "drought/synth.hpp"

using namespace drought;

namespace {

Eigen::MatrixXd two_blobs(int n_per, double sep, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd x(2 * n_per, 2);
    for (int i = 0; i < n_per; ++i) {
        x(i, 0) = rng.normal();
        x(i, 1) = rng.normal();
        x(n_per + i, 0) = sep + rng.normal();
        x(n_per + i, 1) = rng.normal();
    }
    return x;
}

}  // namespace

TEST_CASE("responsibilities are a valid soft assignment") {
    auto x = two_blobs(60, 8.0, 1);
    auto model = bgm_fit(x, 4, 1.0, 1);
    REQUIRE(model.responsibilities.rows() == x.rows());
    REQUIRE(model.responsibilities.cols() == 4);
    CHECK(model.responsibilities.minCoeff() >= 0.0);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        CHECK(model.responsibilities.row(i).sum() == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(model.weights.sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(model.weights.minCoeff() >= 0.0);
}

TEST_CASE("ELBO trace is monotonically non-decreasing across seeds") {
    auto x = two_blobs(50, 6.0, 3);
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        auto model = bgm_fit(x, 5, 1.0, seed);
        REQUIRE(model.elbo_trace.size() >= 2);
        for (std::size_t i = 1; i < model.elbo_trace.size(); ++i) {
            CHECK(model.elbo_trace[i] >= model.elbo_trace[i - 1] - 1e-8);
        }
    }
}

TEST_CASE("surplus components are starved on well separated blobs") {
    auto x = two_blobs(120, 10.0, 7);
    auto model = bgm_fit(x, 6, 1.0, 7);
    CHECK(model.effective_components(0.02) == 2);
}

TEST_CASE("three synthetic regimes survive at k_max = 8") {
    auto synth = generate(3, 2022, 2022, default_regimes(), 42);
    auto scaled = standardize(select_features(synth.dataset));
    auto model = bgm_fit(scaled.values, 8, 1.0, 42);
    CHECK(model.effective_components(0.02) == 3);
}

TEST_CASE("hard assignments agree with the argmax of responsibilities") {
    auto x = two_blobs(40, 7.0, 11);
    auto model = bgm_fit(x, 3, 1.0, 11);
    auto hard = model.hard_assignments();
    REQUIRE(hard.size() == static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        Eigen::Index best;
        model.responsibilities.row(i).maxCoeff(&best);
        CHECK(hard[static_cast<std::size_t>(i)] == static_cast<int>(best));
    }
}

TEST_CASE("posterior means of live components sit near the blob centers") {
    auto x = two_blobs(150, 9.0, 5);
    auto model = bgm_fit(x, 4, 1.0, 5);
    std::vector<double> live_centers;
    for (int k = 0; k < 4; ++k) {
        if (model.weights(k) >= 0.02) live_centers.push_back(model.means(k, 0));
    }
    REQUIRE(live_centers.size() == 2);
    std::sort(live_centers.begin(), live_centers.end());
    CHECK(live_centers[0] == doctest::Approx(0.0).epsilon(0.5).scale(1.0));
    CHECK(live_centers[1] == doctest::Approx(9.0).epsilon(0.1));
}

TEST_CASE("covariances are symmetric positive definite") {
    auto x = two_blobs(80, 6.0, 13);
    auto model = bgm_fit(x, 4, 1.0, 13);
    for (const auto& cov : model.covariances) {
        CHECK((cov - cov.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        Eigen::LLT<Eigen::MatrixXd> llt(cov);
        CHECK(llt.info() == Eigen::Success);
    }
}

TEST_CASE("fit is deterministic for a fixed seed") {
    auto x = two_blobs(60, 5.0, 17);
    auto a = bgm_fit(x, 4, 1.0, 99);
    auto b = bgm_fit(x, 4, 1.0, 99);
    CHECK(a.elbo_trace == b.elbo_trace);
    CHECK((a.responsibilities - b.responsibilities).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.weights == b.weights);
}

TEST_CASE("degenerate inputs are rejected") {
    Eigen::MatrixXd x(2, 1);
    x << 0.0, 1.0;
    CHECK_THROWS_AS(bgm_fit(x, 3, 1.0, 0), NumericError);
    Eigen::MatrixXd bad = two_blobs(10, 4.0, 0);
    bad(0, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(bgm_fit(bad, 2, 1.0, 0), NumericError);
    CHECK_THROWS_AS(bgm_fit(two_blobs(10, 4.0, 0), 2, 0.0, 0), ConfigError);
}

TEST_CASE("duplicated points stay numerically stable via covariance regularization") {
    Eigen::MatrixXd x(30, 2);
    for (Eigen::Index i = 0; i < 30; ++i) {
        x(i, 0) = (i < 15) ? 0.0 : 5.0;  // two exact point masses
        x(i, 1) = (i < 15) ? 0.0 : 5.0;
    }
    auto model = bgm_fit(x, 3, 1.0, 21);
    for (double e : model.elbo_trace) CHECK(std::isfinite(e));
    CHECK(model.weights.sum() == doctest::Approx(1.0).epsilon(1e-9));
}
