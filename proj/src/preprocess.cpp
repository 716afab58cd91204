#include "drought/feature_matrix.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>

#include "drought/error.hpp"
#include "drought/rng.hpp"

namespace drought {

FeatureMatrix select_features(const Dataset& dataset, bool include_identifiers) {
    if (dataset.records.empty()) throw InputError("empty-input: dataset has no records");

    const Eigen::Index n = static_cast<Eigen::Index>(dataset.records.size());
    const Eigen::Index d = kWeatherParamCount + (include_identifiers ? 4 : 0);

    FeatureMatrix fm;
    fm.values.resize(n, d);
    for (const char* name : kWeatherParamNames) fm.feature_names.emplace_back(name);
    if (include_identifiers) {
        for (const char* name : kIdentifierNames) fm.feature_names.emplace_back(name);
    }
    fm.row_keys.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = dataset.records[static_cast<std::size_t>(i)];
        for (int p = 0; p < kWeatherParamCount; ++p) fm.values(i, p) = weather_param(r, p);
        if (include_identifiers) {
            fm.values(i, kWeatherParamCount + 0) = r.latitude;
            fm.values(i, kWeatherParamCount + 1) = r.longitude;
            fm.values(i, kWeatherParamCount + 2) = r.year;
            fm.values(i, kWeatherParamCount + 3) = r.doy;
        }
        fm.row_keys.push_back({dataset.source_labels[static_cast<std::size_t>(i)], r.year,
                               r.doy, r.latitude, r.longitude});
    }
    return fm;
}

FeatureMatrix standardize(const FeatureMatrix& matrix) {
    if (matrix.scaled) throw NumericError("matrix is already scaled");
    const Eigen::Index n = matrix.rows();
    if (n < 2) throw NumericError("insufficient data: standardize needs at least 2 rows");

    FeatureMatrix out = matrix;
    out.means = matrix.values.colwise().mean();
    // population standard deviation; constant columns keep std 1 so they are
    // centered but not divided
    out.stds.resize(matrix.cols());
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
        const double var =
            (matrix.values.col(j).array() - out.means(j)).square().sum() / static_cast<double>(n);
        const double sd = std::sqrt(var);
        out.stds(j) = sd > 0.0 ? sd : 1.0;
    }
    out.values = (matrix.values.rowwise() - out.means.transpose()).array().rowwise() /
                 out.stds.transpose().array();
    out.scaled = true;
    return out;
}

Eigen::MatrixXd inverse_transform(const FeatureMatrix& scaled) {
    if (!scaled.scaled) throw NumericError("matrix is not scaled");
    return (scaled.values.array().rowwise() * scaled.stds.transpose().array()).rowwise() +
           scaled.means.transpose().array();
}

Eigen::VectorXd apply_scaling(const FeatureMatrix& scaled, const Eigen::VectorXd& raw) {
    if (!scaled.scaled) throw NumericError("matrix is not scaled");
    if (raw.size() != scaled.cols()) throw NumericError("query dimension mismatch");
    return (raw - scaled.means).cwiseQuotient(scaled.stds);
}

Eigen::MatrixXd correlation_matrix(const FeatureMatrix& matrix) {
    const Eigen::Index n = matrix.rows();
    const Eigen::Index d = matrix.cols();
    if (n < 2) throw NumericError("correlation needs at least 2 rows");

    Eigen::MatrixXd centered = matrix.values.rowwise() - matrix.values.colwise().mean();
    Eigen::VectorXd norms(d);
    for (Eigen::Index j = 0; j < d; ++j) norms(j) = centered.col(j).norm();

    Eigen::MatrixXd corr(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            double c;
            if (i == j) {
                c = 1.0;
            } else if (norms(i) == 0.0 || norms(j) == 0.0) {
                c = 0.0;  // constant column convention
            } else {
                c = centered.col(i).dot(centered.col(j)) / (norms(i) * norms(j));
                c = std::clamp(c, -1.0, 1.0);
            }
            corr(i, j) = c;
            corr(j, i) = c;
        }
    }
    return corr;
}

SplitIndices split_train_test(Eigen::Index n_rows, double ratio, std::uint64_t seed) {
    if (ratio <= 0.0 || ratio >= 1.0) throw ConfigError("split ratio must be in (0, 1)");
    if (n_rows < 2) throw NumericError("insufficient data: split needs at least 2 rows");

    const auto n_train = static_cast<Eigen::Index>(std::llround(ratio * static_cast<double>(n_rows)));
    if (n_train < 1 || n_train >= n_rows) {
        throw NumericError("degenerate split: one side would be empty");
    }

    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n_rows));
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    Rng rng(seed);
    rng.shuffle(perm);

    SplitIndices s;
    s.seed = seed;
    s.ratio = ratio;
    s.train_rows.assign(perm.begin(), perm.begin() + n_train);
    s.test_rows.assign(perm.begin() + n_train, perm.end());
    return s;
}

void write_correlation_csv(const Eigen::MatrixXd& corr, const std::vector<std::string>& names,
                           const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write file: " + path);
    out << "FEATURE";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    for (Eigen::Index i = 0; i < corr.rows(); ++i) {
        out << names[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < corr.cols(); ++j) {
            char buf[32];
            auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), corr(i, j));
            (void)ec;
            out << ',' << std::string_view(buf, static_cast<std::size_t>(p - buf));
        }
        out << '\n';
    }
}

}  // namespace drought

namespace drought {

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                    std::uint64_t seed) {
    if (k >= n) {
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), std::size_t{0});
        return all;
    }
    // partial Fisher-Yates on an index vector
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.bounded(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace drought
