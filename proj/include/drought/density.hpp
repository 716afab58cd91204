#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "drought/dataset.hpp"
#include "drought/feature_matrix.hpp"

namespace drought {

struct ParamStats {
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0;
};

struct ClusterProfile {
    // [cluster][parameter] statistics of raw (unscaled) values
    std::vector<std::array<ParamStats, kWeatherParamCount>> stats;
    std::vector<std::size_t> member_counts;
    // [cluster][parameter] mean of standardized values (radar axes)
    std::vector<Eigen::VectorXd> radar;

    int cluster_count() const { return static_cast<int>(stats.size()); }
};

ClusterProfile profile_clusters(const Dataset& dataset, const std::vector<int>& assignments,
                                const FeatureMatrix& scaled);

struct SeverityLabel {
    int cluster = 0;
    std::string extremity;  // Lower | Moderate | Higher
    std::string season;
    std::vector<std::pair<int, int>> day_ranges;  // dominant DOY intervals
};

// canonical id -> (extremity, season); defaults mirror the three-regime table
std::map<int, std::pair<std::string, std::string>> default_severity_mapping();

struct DensityGrid {
    enum class Axis { day_of_year, lat_lon };
    Axis axis = Axis::day_of_year;
    std::vector<double> grid_x;
    std::vector<double> grid_y;            // empty for 1-D
    Eigen::MatrixXd densities;             // grid points x clusters
    std::vector<double> bandwidths;        // per cluster (1-D) or flattened pairs (2-D)
    // maximal runs where one cluster's density exceeds every other's
    std::vector<std::vector<std::pair<int, int>>> dominant_intervals;
};

// Gaussian-kernel estimates; default bandwidth is Scott's rule.
std::vector<double> kde_1d(const std::vector<double>& samples,
                           const std::vector<double>& grid,
                           std::optional<double> bandwidth = std::nullopt);
double scott_bandwidth(const std::vector<double>& samples, int n_dims = 1);

Eigen::MatrixXd kde_2d(const std::vector<std::pair<double, double>>& samples,
                       const std::vector<double>& grid_x,
                       const std::vector<double>& grid_y,
                       std::optional<std::pair<double, double>> bandwidths = std::nullopt);

DensityGrid daywise_density(const Dataset& dataset, const std::vector<int>& assignments,
                            int grid_step = 1);

DensityGrid geospatial_density(const Dataset& dataset, const std::vector<int>& assignments,
                               double lat_min, double lat_max, double lon_min,
                               double lon_max, int grid_n = 50);

std::vector<SeverityLabel> label_severity(
    const ClusterProfile& profile,
    const std::map<int, std::pair<std::string, std::string>>& mapping,
    const DensityGrid& daywise);

// Per-district per-cluster membership shares backing the geospatial narrative.
void write_membership_shares_csv(const Dataset& dataset, const std::vector<int>& assignments,
                                 const std::string& path);

void write_density_grid_csv(const DensityGrid& grid, const std::string& path);
void write_boxplot_csv(const ClusterProfile& profile, const std::string& path);

}  // namespace drought
