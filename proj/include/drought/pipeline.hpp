#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "drought/bgm.hpp"
#include "drought/classify.hpp"
#include "drought/dataset.hpp"
#include "drought/density.hpp"
#include "drought/feature_matrix.hpp"
#include "drought/kmeans.hpp"
#include "drought/labeling.hpp"
#include "drought/synth.hpp"

namespace drought {

// Full pipeline configuration with defaults; every field is echoed into the
// run manifest so omissions in the config file stay auditable.
struct PipelineConfig {
    std::uint64_t seed = 42;
    std::string out_dir = "out";
    bool strict = false;
    double fill_value = -999.0;
    bool include_identifiers = false;
    double split_ratio = 0.8;

    std::vector<std::string> inputs;  // district CSV files

    struct Cluster {
        int k_min = 1;
        int k_max = 8;
        int n_init = 10;
        int max_iter = 300;
        double tol = 1e-4;
        int fixed_k = 0;  // 0 = use the detected elbow
        double bgm_alpha = 1.0;
        int bgm_max_iter = 200;
        double bgm_tol = 1e-5;
        double reg_covar = 1e-6;
        double weight_floor = 0.02;
        std::size_t silhouette_sample_cap = 10000;
        std::string model = "auto";  // auto | kmeans | bgm
    } cluster;

    struct Classify {
        int k_neighbors = 5;
        int n_trees = 100;
        int max_features = -1;
        int max_depth = -1;
        int min_samples_split = 2;
        int min_samples_leaf = 1;
    } classify;

    struct Analyze {
        int day_grid_step = 1;
        int geo_grid_n = 50;
        double lat_min = 20.5, lat_max = 26.7;
        double lon_min = 88.0, lon_max = 92.7;
        std::map<int, std::pair<std::string, std::string>> severity_mapping =
            default_severity_mapping();
    } analyze;

    struct Synth {
        std::string preset = "ci";  // ci | full
        int districts = 5;
        int year_begin = 2022;
        int year_end = 2023;
        std::string regime_spec;  // optional JSON path
    } synth;

    nlohmann::json to_json() const;
    static PipelineConfig from_json(const nlohmann::json& j);
    static PipelineConfig load(const std::string& path);
};

std::string fnv1a_digest_file(const std::string& path);

class RunManifest {
public:
    explicit RunManifest(const PipelineConfig& config);

    void add_input(const std::string& path);
    void add_output(const std::string& path);  // digested at write time
    void add_timing(const std::string& stage, double seconds);
    void write(const std::string& path);  // also lists itself as an output

    const nlohmann::json& json() const { return j_; }

private:
    nlohmann::json j_;
};

struct ClusterResult {
    std::vector<std::pair<int, double>> elbow;
    int detected_k = 0;
    KMeansModel kmeans;
    BgmModel bgm;
    double silhouette_kmeans = 0.0;
    double silhouette_bgm = 0.0;
    std::string selected;  // kmeans | bgm
    ClusterLabeling labeling;
    std::vector<int> canonical_assignments;
    FeatureMatrix scaled;
};

struct ClassifyResult {
    struct Entry {
        std::string name;
        ConfusionMatrix confusion;
        double accuracy = 0.0;
    };
    std::vector<Entry> entries;
    SplitIndices split;
};

// Stage drivers shared by the CLI subcommands and the tests.
Dataset run_ingest(const PipelineConfig& cfg, RunManifest& manifest);
ClusterResult run_cluster(const PipelineConfig& cfg, const Dataset& dataset,
                          RunManifest& manifest);
ClassifyResult run_classify(const PipelineConfig& cfg, const Dataset& dataset,
                            const std::vector<int>& assignments, RunManifest& manifest);
void run_analyze(const PipelineConfig& cfg, const Dataset& dataset,
                 const std::vector<int>& assignments, RunManifest& manifest);
SynthResult run_synth(const PipelineConfig& cfg, RunManifest& manifest);
void run_all(const PipelineConfig& cfg, RunManifest& manifest);

// Flags a mismatch between the trace/total accuracy of a confusion matrix and
// an externally reported rounded percentage; empty when they agree.
std::string accuracy_divergence_note(const ConfusionMatrix& cm, double reported_percent);

// Model artifact serialization (scaling, clustering state, canonical map,
// seeds, hyperparameters, silhouettes).
nlohmann::json model_artifact_json(const PipelineConfig& cfg, const ClusterResult& result);

}  // namespace drought
