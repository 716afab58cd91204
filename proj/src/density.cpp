#include "drought/density.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "drought/error.hpp"

namespace drought {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;

double gaussian_kernel(double u) { return kInvSqrt2Pi * std::exp(-0.5 * u * u); }

// quantile with linear interpolation between order statistics
double quantile_sorted(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double pos = p * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, n - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

double population_std(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    return std::sqrt(var / n);
}

int cluster_count_of(const std::vector<int>& assignments) {
    int k = 0;
    for (int a : assignments) k = std::max(k, a + 1);
    return k;
}

}  // namespace

double scott_bandwidth(const std::vector<double>& samples, int n_dims) {
    const double sd = population_std(samples);
    const double n = static_cast<double>(samples.size());
    return sd * std::pow(n, -1.0 / (n_dims + 4.0));
}

ClusterProfile profile_clusters(const Dataset& dataset, const std::vector<int>& assignments,
                                const FeatureMatrix& scaled) {
    if (assignments.size() != dataset.records.size()) {
        throw NumericError("assignments not aligned with dataset");
    }
    if (!scaled.scaled || scaled.rows() != static_cast<Eigen::Index>(dataset.records.size())) {
        throw NumericError("scaled matrix not aligned with dataset");
    }
    const int k = cluster_count_of(assignments);

    ClusterProfile profile;
    profile.stats.resize(static_cast<std::size_t>(k));
    profile.member_counts.assign(static_cast<std::size_t>(k), 0);
    profile.radar.assign(static_cast<std::size_t>(k),
                         Eigen::VectorXd::Zero(scaled.cols()));

    std::vector<std::array<std::vector<double>, kWeatherParamCount>> values(
        static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        const auto c = static_cast<std::size_t>(assignments[i]);
        profile.member_counts[c]++;
        for (int p = 0; p < kWeatherParamCount; ++p) {
            values[c][static_cast<std::size_t>(p)].push_back(
                weather_param(dataset.records[i], p));
        }
        profile.radar[c] += scaled.values.row(static_cast<Eigen::Index>(i)).transpose();
    }

    for (int c = 0; c < k; ++c) {
        const auto cs = static_cast<std::size_t>(c);
        if (profile.member_counts[cs] == 0) {
            throw NumericError("empty cluster " + std::to_string(c));
        }
        profile.radar[cs] /= static_cast<double>(profile.member_counts[cs]);
        for (int p = 0; p < kWeatherParamCount; ++p) {
            auto& v = values[cs][static_cast<std::size_t>(p)];
            std::sort(v.begin(), v.end());
            auto& s = profile.stats[cs][static_cast<std::size_t>(p)];
            s.min = v.front();
            s.max = v.back();
            s.q1 = quantile_sorted(v, 0.25);
            s.median = quantile_sorted(v, 0.5);
            s.q3 = quantile_sorted(v, 0.75);
            double mean = 0.0;
            for (double x : v) mean += x;
            s.mean = mean / static_cast<double>(v.size());
        }
    }
    return profile;
}

std::map<int, std::pair<std::string, std::string>> default_severity_mapping() {
    return {{0, {"Lower", "Monsoon"}},
            {1, {"Higher", "Winter"}},
            {2, {"Moderate", "Transitional/Dry Season"}}};
}

std::vector<double> kde_1d(const std::vector<double>& samples, const std::vector<double>& grid,
                           std::optional<double> bandwidth) {
    if (samples.size() < 2 && !bandwidth) {
        throw NumericError("kde_1d needs at least 2 samples or an explicit bandwidth");
    }
    double h = bandwidth ? *bandwidth : scott_bandwidth(samples, 1);
    if (h <= 0.0) {
        if (!bandwidth) throw NumericError("kde_1d: zero sample spread without explicit bandwidth");
        throw NumericError("kde_1d: bandwidth must be positive");
    }
    const double inv_nh = 1.0 / (static_cast<double>(samples.size()) * h);
    std::vector<double> density(grid.size(), 0.0);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double sum = 0.0;
        for (double x : samples) sum += gaussian_kernel((grid[g] - x) / h);
        density[g] = sum * inv_nh;
    }
    return density;
}

Eigen::MatrixXd kde_2d(const std::vector<std::pair<double, double>>& samples,
                       const std::vector<double>& grid_x, const std::vector<double>& grid_y,
                       std::optional<std::pair<double, double>> bandwidths) {
    if (samples.size() < 2 && !bandwidths) {
        throw NumericError("kde_2d needs at least 2 samples or explicit bandwidths");
    }
    double hx, hy;
    if (bandwidths) {
        hx = bandwidths->first;
        hy = bandwidths->second;
    } else {
        std::vector<double> xs, ys;
        xs.reserve(samples.size());
        ys.reserve(samples.size());
        for (const auto& [x, y] : samples) {
            xs.push_back(x);
            ys.push_back(y);
        }
        hx = scott_bandwidth(xs, 2);
        hy = scott_bandwidth(ys, 2);
    }
    if (hx <= 0.0 || hy <= 0.0) {
        if (!bandwidths) throw NumericError("kde_2d: degenerate spread without explicit bandwidths");
        throw NumericError("kde_2d: bandwidths must be positive");
    }

    const double inv = 1.0 / (static_cast<double>(samples.size()) * hx * hy);
    Eigen::MatrixXd density(grid_x.size(), grid_y.size());
    // separable kernel: precompute per-axis kernel tables
    Eigen::MatrixXd kx(grid_x.size(), samples.size());
    Eigen::MatrixXd ky(grid_y.size(), samples.size());
    for (std::size_t s = 0; s < samples.size(); ++s) {
        for (std::size_t i = 0; i < grid_x.size(); ++i) {
            kx(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(s)) =
                gaussian_kernel((grid_x[i] - samples[s].first) / hx);
        }
        for (std::size_t j = 0; j < grid_y.size(); ++j) {
            ky(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(s)) =
                gaussian_kernel((grid_y[j] - samples[s].second) / hy);
        }
    }
    density = inv * (kx * ky.transpose());
    return density;
}

namespace {

std::vector<std::vector<std::pair<int, int>>> dominant_runs(const Eigen::MatrixXd& densities,
                                                            const std::vector<double>& grid) {
    const Eigen::Index n = densities.rows();
    const Eigen::Index k = densities.cols();
    std::vector<std::vector<std::pair<int, int>>> out(static_cast<std::size_t>(k));
    int run_cluster = -1;
    int run_start = 0;
    for (Eigen::Index g = 0; g <= n; ++g) {
        int winner = -1;
        if (g < n) {
            Eigen::Index best = 0;
            densities.row(g).maxCoeff(&best);
            winner = static_cast<int>(best);
            // dominance requires strictly exceeding every other cluster
            for (Eigen::Index c = 0; c < k; ++c) {
                if (c != best && densities(g, c) >= densities(g, best)) {
                    winner = -1;
                    break;
                }
            }
        }
        if (winner != run_cluster) {
            if (run_cluster >= 0) {
                out[static_cast<std::size_t>(run_cluster)].emplace_back(
                    static_cast<int>(std::lround(grid[static_cast<std::size_t>(run_start)])),
                    static_cast<int>(std::lround(grid[static_cast<std::size_t>(g - 1)])));
            }
            run_cluster = winner;
            run_start = static_cast<int>(g);
        }
    }
    return out;
}

}  // namespace

DensityGrid daywise_density(const Dataset& dataset, const std::vector<int>& assignments,
                            int grid_step) {
    if (assignments.size() != dataset.records.size()) {
        throw NumericError("assignments not aligned with dataset");
    }
    if (grid_step < 1) throw ConfigError("grid step must be at least 1 day");
    const int k = cluster_count_of(assignments);

    DensityGrid grid;
    grid.axis = DensityGrid::Axis::day_of_year;
    for (int day = 1; day <= 366; day += grid_step) grid.grid_x.push_back(day);

    std::vector<std::vector<double>> doy(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        doy[static_cast<std::size_t>(assignments[i])].push_back(dataset.records[i].doy);
    }

    grid.densities.resize(static_cast<Eigen::Index>(grid.grid_x.size()), k);
    for (int c = 0; c < k; ++c) {
        const auto& samples = doy[static_cast<std::size_t>(c)];
        grid.bandwidths.push_back(scott_bandwidth(samples, 1));
        const auto density = kde_1d(samples, grid.grid_x);
        for (std::size_t g = 0; g < density.size(); ++g) {
            grid.densities(static_cast<Eigen::Index>(g), c) = density[g];
        }
    }
    grid.dominant_intervals = dominant_runs(grid.densities, grid.grid_x);
    return grid;
}

DensityGrid geospatial_density(const Dataset& dataset, const std::vector<int>& assignments,
                               double lat_min, double lat_max, double lon_min, double lon_max,
                               int grid_n) {
    if (assignments.size() != dataset.records.size()) {
        throw NumericError("assignments not aligned with dataset");
    }
    if (grid_n < 2) throw ConfigError("grid_n must be at least 2");
    const int k = cluster_count_of(assignments);

    DensityGrid grid;
    grid.axis = DensityGrid::Axis::lat_lon;
    for (int i = 0; i < grid_n; ++i) {
        grid.grid_x.push_back(lat_min + (lat_max - lat_min) * i / (grid_n - 1));
        grid.grid_y.push_back(lon_min + (lon_max - lon_min) * i / (grid_n - 1));
    }

    std::vector<std::vector<std::pair<double, double>>> coords(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        coords[static_cast<std::size_t>(assignments[i])].emplace_back(
            dataset.records[i].latitude, dataset.records[i].longitude);
    }

    grid.densities.resize(static_cast<Eigen::Index>(grid.grid_x.size() * grid.grid_y.size()), k);
    for (int c = 0; c < k; ++c) {
        const auto& samples = coords[static_cast<std::size_t>(c)];
        std::vector<double> xs, ys;
        for (const auto& [x, y] : samples) {
            xs.push_back(x);
            ys.push_back(y);
        }
        const double hx = scott_bandwidth(xs, 2);
        const double hy = scott_bandwidth(ys, 2);
        grid.bandwidths.push_back(hx);
        grid.bandwidths.push_back(hy);
        Eigen::MatrixXd density = kde_2d(samples, grid.grid_x, grid.grid_y);
        for (std::size_t i = 0; i < grid.grid_x.size(); ++i) {
            for (std::size_t j = 0; j < grid.grid_y.size(); ++j) {
                grid.densities(static_cast<Eigen::Index>(i * grid.grid_y.size() + j), c) =
                    density(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            }
        }
    }
    return grid;
}

std::vector<SeverityLabel> label_severity(
    const ClusterProfile& profile,
    const std::map<int, std::pair<std::string, std::string>>& mapping,
    const DensityGrid& daywise) {
    std::vector<SeverityLabel> labels;
    for (int c = 0; c < profile.cluster_count(); ++c) {
        const auto it = mapping.find(c);
        if (it == mapping.end()) {
            throw ConfigError("severity mapping missing cluster " + std::to_string(c));
        }
        SeverityLabel label;
        label.cluster = c;
        label.extremity = it->second.first;
        label.season = it->second.second;
        if (c < static_cast<int>(daywise.dominant_intervals.size())) {
            label.day_ranges = daywise.dominant_intervals[static_cast<std::size_t>(c)];
        }
        labels.push_back(std::move(label));
    }
    return labels;
}

void write_membership_shares_csv(const Dataset& dataset, const std::vector<int>& assignments,
                                 const std::string& path) {
    const int k = cluster_count_of(assignments);
    struct DistrictTally {
        double lat = 0, lon = 0;
        std::vector<long> counts;
    };
    std::map<std::string, DistrictTally> tallies;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        auto& t = tallies[dataset.source_labels[i]];
        if (t.counts.empty()) {
            t.counts.assign(static_cast<std::size_t>(k), 0);
            t.lat = dataset.records[i].latitude;
            t.lon = dataset.records[i].longitude;
        }
        t.counts[static_cast<std::size_t>(assignments[i])]++;
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write file: " + path);
    out << "DISTRICT,LAT,LON,TOTAL";
    for (int c = 0; c < k; ++c) out << ",SHARE_" << c;
    out << '\n';
    for (const auto& [name, t] : tallies) {
        long total = 0;
        for (long c : t.counts) total += c;
        out << name << ',' << t.lat << ',' << t.lon << ',' << total;
        for (long c : t.counts) out << ',' << static_cast<double>(c) / static_cast<double>(total);
        out << '\n';
    }
}

void write_density_grid_csv(const DensityGrid& grid, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write file: " + path);
    const Eigen::Index k = grid.densities.cols();
    if (grid.axis == DensityGrid::Axis::day_of_year) {
        out << "DOY";
        for (Eigen::Index c = 0; c < k; ++c) out << ",CLUSTER_" << c;
        out << '\n';
        for (std::size_t g = 0; g < grid.grid_x.size(); ++g) {
            out << grid.grid_x[g];
            for (Eigen::Index c = 0; c < k; ++c) {
                out << ',' << grid.densities(static_cast<Eigen::Index>(g), c);
            }
            out << '\n';
        }
    } else {
        out << "LAT,LON";
        for (Eigen::Index c = 0; c < k; ++c) out << ",CLUSTER_" << c;
        out << '\n';
        for (std::size_t i = 0; i < grid.grid_x.size(); ++i) {
            for (std::size_t j = 0; j < grid.grid_y.size(); ++j) {
                out << grid.grid_x[i] << ',' << grid.grid_y[j];
                const auto row = static_cast<Eigen::Index>(i * grid.grid_y.size() + j);
                for (Eigen::Index c = 0; c < k; ++c) out << ',' << grid.densities(row, c);
                out << '\n';
            }
        }
    }
}

void write_boxplot_csv(const ClusterProfile& profile, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write file: " + path);
    out << "CLUSTER,PARAMETER,MIN,Q1,MEDIAN,Q3,MAX,MEAN\n";
    for (int c = 0; c < profile.cluster_count(); ++c) {
        for (int p = 0; p < kWeatherParamCount; ++p) {
            const auto& s = profile.stats[static_cast<std::size_t>(c)][static_cast<std::size_t>(p)];
            out << c << ',' << kWeatherParamNames[p] << ',' << s.min << ',' << s.q1 << ','
                << s.median << ',' << s.q3 << ',' << s.max << ',' << s.mean << '\n';
        }
    }
}

}  // namespace drought
