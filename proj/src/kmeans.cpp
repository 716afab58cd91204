#include "drought/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "drought/error.hpp"
#include "drought/rng.hpp"

namespace drought {

namespace {

void check_finite(const Eigen::MatrixXd& X) {
    if (!X.allFinite()) throw NumericError("matrix contains non-finite values");
}

// squared distances of every row of X to every centroid, n x k
Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& X, const Eigen::MatrixXd& C) {
    Eigen::VectorXd xn = X.rowwise().squaredNorm();
    Eigen::VectorXd cn = C.rowwise().squaredNorm();
    Eigen::MatrixXd d2 = -2.0 * (X * C.transpose());
    d2.colwise() += xn;
    d2.rowwise() += cn.transpose();
    return d2.cwiseMax(0.0);
}

Eigen::MatrixXd kmeanspp_init(const Eigen::MatrixXd& X, int k, Rng& rng) {
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd centroids(k, X.cols());
    centroids.row(0) = X.row(static_cast<Eigen::Index>(rng.bounded(static_cast<std::uint64_t>(n))));

    Eigen::VectorXd d2 =
        (X.rowwise() - centroids.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        double total = d2.sum();
        Eigen::Index pick = 0;
        if (total > 0.0) {
            double target = rng.uniform() * total;
            double acc = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                acc += d2(i);
                if (acc >= target) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<Eigen::Index>(rng.bounded(static_cast<std::uint64_t>(n)));
        }
        centroids.row(c) = X.row(pick);
        d2 = d2.cwiseMin((X.rowwise() - centroids.row(c)).rowwise().squaredNorm());
    }
    return centroids;
}

struct LloydResult {
    Eigen::MatrixXd centroids;
    std::vector<int> assignments;
    double inertia = 0.0;
    int iterations = 0;
};

LloydResult lloyd_run(const Eigen::MatrixXd& X, int k, Rng& rng, const KMeansParams& params) {
    const Eigen::Index n = X.rows();
    const Eigen::Index d = X.cols();

    LloydResult res;
    res.centroids = kmeanspp_init(X, k, rng);
    res.assignments.assign(static_cast<std::size_t>(n), 0);

    double prev_inertia = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < params.max_iter; ++iter) {
        Eigen::MatrixXd d2 = squared_distances(X, res.centroids);

        double inertia = 0.0;
        std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::Index best = 0;
            double best_d = d2(i, 0);
            for (int c = 1; c < k; ++c) {
                if (d2(i, c) < best_d) {
                    best_d = d2(i, c);
                    best = c;
                }
            }
            res.assignments[static_cast<std::size_t>(i)] = static_cast<int>(best);
            counts[static_cast<std::size_t>(best)]++;
            inertia += best_d;
        }

        // repair empty clusters by seizing the point farthest from its centroid
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) continue;
            Eigen::Index worst = 0;
            double worst_d = -1.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const int a = res.assignments[static_cast<std::size_t>(i)];
                if (counts[static_cast<std::size_t>(a)] <= 1) continue;
                if (d2(i, a) > worst_d) {
                    worst_d = d2(i, a);
                    worst = i;
                }
            }
            const int old = res.assignments[static_cast<std::size_t>(worst)];
            counts[static_cast<std::size_t>(old)]--;
            counts[static_cast<std::size_t>(c)]++;
            res.assignments[static_cast<std::size_t>(worst)] = c;
            inertia -= d2(worst, old);
        }

        res.iterations = iter + 1;

        // centroid update
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, d);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.row(res.assignments[static_cast<std::size_t>(i)]) += X.row(i);
        }
        for (int c = 0; c < k; ++c) {
            res.centroids.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
        }

        const double rel = prev_inertia == std::numeric_limits<double>::infinity()
                               ? 1.0
                               : (prev_inertia - inertia) / std::max(prev_inertia, 1e-300);
        prev_inertia = inertia;
        if (rel < params.tol) break;
    }

    // final inertia against the updated centroids
    res.inertia = wcss(X, res.assignments, res.centroids);
    return res;
}

}  // namespace

KMeansModel kmeans_fit(const Eigen::MatrixXd& X, int k, std::uint64_t seed,
                       const KMeansParams& params) {
    check_finite(X);
    if (k < 1 || static_cast<Eigen::Index>(k) > X.rows()) {
        throw NumericError("k must be in [1, n_rows]");
    }

    Rng master(seed);
    LloydResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int run = 0; run < params.n_init; ++run) {
        Rng rng(master.derive(static_cast<std::uint64_t>(run)));
        LloydResult r = lloyd_run(X, k, rng, params);
        if (r.inertia < best.inertia) best = std::move(r);
    }

    KMeansModel model;
    model.k = k;
    model.centroids = std::move(best.centroids);
    model.inertia = best.inertia;
    model.assignments = std::move(best.assignments);
    model.iterations_run = best.iterations;
    model.seed = seed;
    return model;
}

int assign(const Eigen::VectorXd& point, const Eigen::MatrixXd& centroids) {
    if (point.size() != centroids.cols()) throw NumericError("point dimension mismatch");
    int best = 0;
    double best_d = (centroids.row(0).transpose() - point).squaredNorm();
    for (Eigen::Index c = 1; c < centroids.rows(); ++c) {
        const double d = (centroids.row(c).transpose() - point).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(c);
        }
    }
    return best;
}

double wcss(const Eigen::MatrixXd& X, const std::vector<int>& assignments,
            const Eigen::MatrixXd& centroids) {
    if (static_cast<Eigen::Index>(assignments.size()) != X.rows() ||
        X.cols() != centroids.cols()) {
        throw NumericError("wcss shape mismatch");
    }
    double total = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        total += (X.row(i) - centroids.row(assignments[static_cast<std::size_t>(i)])).squaredNorm();
    }
    return total;
}

std::vector<std::pair<int, double>> elbow_sweep(const Eigen::MatrixXd& X, int k_min, int k_max,
                                                std::uint64_t seed, const KMeansParams& params) {
    if (k_min < 1 || static_cast<Eigen::Index>(k_max) > X.rows() || k_min > k_max) {
        throw NumericError("invalid elbow sweep range");
    }
    std::vector<std::pair<int, double>> pairs;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = k_min; k <= k_max; ++k) {
        KMeansModel m = kmeans_fit(X, k, seed, params);
        // best-of-n_init keeps the curve non-increasing; clamp residual noise
        pairs.emplace_back(k, std::min(m.inertia, prev));
        prev = pairs.back().second;
    }
    return pairs;
}

int detect_elbow(const std::vector<std::pair<int, double>>& pairs) {
    if (pairs.size() < 3) throw NumericError("elbow detection needs at least 3 (k, inertia) pairs");
    for (std::size_t i = 1; i < pairs.size(); ++i) {
        if (pairs[i].first != pairs[i - 1].first + 1) {
            throw NumericError("elbow detection needs consecutive k values");
        }
    }
    int best_k = pairs[1].first;
    double best_curv = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < pairs.size(); ++i) {
        const double curv = pairs[i - 1].second - 2.0 * pairs[i].second + pairs[i + 1].second;
        if (curv > best_curv) {
            best_curv = curv;
            best_k = pairs[i].first;
        }
    }
    return best_k;
}

double silhouette_score(const Eigen::MatrixXd& X, const std::vector<int>& assignments,
                        std::size_t sample_cap, std::uint64_t seed) {
    const Eigen::Index n = X.rows();
    if (n < 3) throw NumericError("silhouette needs at least 3 rows");
    if (static_cast<Eigen::Index>(assignments.size()) != n) {
        throw NumericError("assignment length mismatch");
    }

    int k = 0;
    for (int a : assignments) k = std::max(k, a + 1);
    std::vector<Eigen::Index> cluster_sizes(static_cast<std::size_t>(k), 0);
    for (int a : assignments) cluster_sizes[static_cast<std::size_t>(a)]++;
    int nonempty = 0;
    for (Eigen::Index c : cluster_sizes) nonempty += c > 0 ? 1 : 0;
    if (nonempty < 2) throw NumericError("silhouette undefined for a single cluster");

    std::vector<std::size_t> sample;
    if (static_cast<std::size_t>(n) > sample_cap) {
        sample = sample_without_replacement(static_cast<std::size_t>(n), sample_cap, seed);
    } else {
        sample.resize(static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < sample.size(); ++i) sample[i] = i;
    }

    double score_sum = 0.0;
    std::vector<double> cluster_dist(static_cast<std::size_t>(k));
    for (std::size_t idx : sample) {
        const auto i = static_cast<Eigen::Index>(idx);
        const int own = assignments[idx];
        if (cluster_sizes[static_cast<std::size_t>(own)] <= 1) continue;  // singleton scores 0

        Eigen::VectorXd dist =
            (X.rowwise() - X.row(i)).rowwise().norm();
        std::fill(cluster_dist.begin(), cluster_dist.end(), 0.0);
        for (Eigen::Index j = 0; j < n; ++j) {
            cluster_dist[static_cast<std::size_t>(assignments[static_cast<std::size_t>(j)])] +=
                dist(j);
        }

        const double a = cluster_dist[static_cast<std::size_t>(own)] /
                         static_cast<double>(cluster_sizes[static_cast<std::size_t>(own)] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            if (c == own || cluster_sizes[static_cast<std::size_t>(c)] == 0) continue;
            b = std::min(b, cluster_dist[static_cast<std::size_t>(c)] /
                                static_cast<double>(cluster_sizes[static_cast<std::size_t>(c)]));
        }
        const double denom = std::max(a, b);
        score_sum += denom > 0.0 ? (b - a) / denom : 0.0;
    }
    return score_sum / static_cast<double>(sample.size());
}

}  // namespace drought
