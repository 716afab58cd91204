#include "drought/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>

#include "drought/error.hpp"

namespace drought {

namespace fs = std::filesystem;

namespace {

class StageTimer {
public:
    StageTimer(RunManifest& manifest, std::string name)
        : manifest_(manifest), name_(std::move(name)),
          start_(std::chrono::steady_clock::now()) {}
    ~StageTimer() {
        const auto end = std::chrono::steady_clock::now();
        manifest_.add_timing(name_, std::chrono::duration<double>(end - start_).count());
    }

private:
    RunManifest& manifest_;
    std::string name_;
    std::chrono::steady_clock::time_point start_;
};

std::string out_path(const PipelineConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.out_dir);
    return (fs::path(cfg.out_dir) / name).string();
}

nlohmann::json confusion_to_json(const ConfusionMatrix& cm) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < cm.counts.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < cm.counts.cols(); ++j) row.push_back(cm.counts(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

// ---------------------------------------------------------------- config

nlohmann::json PipelineConfig::to_json() const {
    nlohmann::json j;
    j["seed"] = seed;
    j["out_dir"] = out_dir;
    j["strict"] = strict;
    j["fill_value"] = fill_value;
    j["include_identifiers"] = include_identifiers;
    j["split_ratio"] = split_ratio;
    j["inputs"] = inputs;
    j["cluster"] = {{"k_min", cluster.k_min},
                    {"k_max", cluster.k_max},
                    {"n_init", cluster.n_init},
                    {"max_iter", cluster.max_iter},
                    {"tol", cluster.tol},
                    {"fixed_k", cluster.fixed_k},
                    {"bgm_alpha", cluster.bgm_alpha},
                    {"bgm_max_iter", cluster.bgm_max_iter},
                    {"bgm_tol", cluster.bgm_tol},
                    {"reg_covar", cluster.reg_covar},
                    {"weight_floor", cluster.weight_floor},
                    {"silhouette_sample_cap", cluster.silhouette_sample_cap},
                    {"model", cluster.model}};
    j["classify"] = {{"k_neighbors", classify.k_neighbors},
                     {"n_trees", classify.n_trees},
                     {"max_features", classify.max_features},
                     {"max_depth", classify.max_depth},
                     {"min_samples_split", classify.min_samples_split},
                     {"min_samples_leaf", classify.min_samples_leaf}};
    nlohmann::json mapping = nlohmann::json::object();
    for (const auto& [id, val] : analyze.severity_mapping) {
        mapping[std::to_string(id)] = {val.first, val.second};
    }
    j["analyze"] = {{"day_grid_step", analyze.day_grid_step},
                    {"geo_grid_n", analyze.geo_grid_n},
                    {"bbox", {analyze.lat_min, analyze.lat_max, analyze.lon_min, analyze.lon_max}},
                    {"severity_mapping", mapping}};
    j["synth"] = {{"preset", synth.preset},
                  {"districts", synth.districts},
                  {"year_begin", synth.year_begin},
                  {"year_end", synth.year_end},
                  {"regime_spec", synth.regime_spec}};
    return j;
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) {
    PipelineConfig cfg;
    try {
        cfg.seed = j.value("seed", cfg.seed);
        cfg.out_dir = j.value("out_dir", cfg.out_dir);
        cfg.strict = j.value("strict", cfg.strict);
        cfg.fill_value = j.value("fill_value", cfg.fill_value);
        cfg.include_identifiers = j.value("include_identifiers", cfg.include_identifiers);
        cfg.split_ratio = j.value("split_ratio", cfg.split_ratio);
        cfg.inputs = j.value("inputs", cfg.inputs);
        if (j.contains("cluster")) {
            const auto& c = j.at("cluster");
            cfg.cluster.k_min = c.value("k_min", cfg.cluster.k_min);
            cfg.cluster.k_max = c.value("k_max", cfg.cluster.k_max);
            cfg.cluster.n_init = c.value("n_init", cfg.cluster.n_init);
            cfg.cluster.max_iter = c.value("max_iter", cfg.cluster.max_iter);
            cfg.cluster.tol = c.value("tol", cfg.cluster.tol);
            cfg.cluster.fixed_k = c.value("fixed_k", cfg.cluster.fixed_k);
            cfg.cluster.bgm_alpha = c.value("bgm_alpha", cfg.cluster.bgm_alpha);
            cfg.cluster.bgm_max_iter = c.value("bgm_max_iter", cfg.cluster.bgm_max_iter);
            cfg.cluster.bgm_tol = c.value("bgm_tol", cfg.cluster.bgm_tol);
            cfg.cluster.reg_covar = c.value("reg_covar", cfg.cluster.reg_covar);
            cfg.cluster.weight_floor = c.value("weight_floor", cfg.cluster.weight_floor);
            cfg.cluster.silhouette_sample_cap =
                c.value("silhouette_sample_cap", cfg.cluster.silhouette_sample_cap);
            cfg.cluster.model = c.value("model", cfg.cluster.model);
        }
        if (j.contains("classify")) {
            const auto& c = j.at("classify");
            cfg.classify.k_neighbors = c.value("k_neighbors", cfg.classify.k_neighbors);
            cfg.classify.n_trees = c.value("n_trees", cfg.classify.n_trees);
            cfg.classify.max_features = c.value("max_features", cfg.classify.max_features);
            cfg.classify.max_depth = c.value("max_depth", cfg.classify.max_depth);
            cfg.classify.min_samples_split =
                c.value("min_samples_split", cfg.classify.min_samples_split);
            cfg.classify.min_samples_leaf =
                c.value("min_samples_leaf", cfg.classify.min_samples_leaf);
        }
        if (j.contains("analyze")) {
            const auto& a = j.at("analyze");
            cfg.analyze.day_grid_step = a.value("day_grid_step", cfg.analyze.day_grid_step);
            cfg.analyze.geo_grid_n = a.value("geo_grid_n", cfg.analyze.geo_grid_n);
            if (a.contains("bbox")) {
                const auto& b = a.at("bbox");
                cfg.analyze.lat_min = b.at(0).get<double>();
                cfg.analyze.lat_max = b.at(1).get<double>();
                cfg.analyze.lon_min = b.at(2).get<double>();
                cfg.analyze.lon_max = b.at(3).get<double>();
            }
            if (a.contains("severity_mapping")) {
                cfg.analyze.severity_mapping.clear();
                for (const auto& [key, val] : a.at("severity_mapping").items()) {
                    cfg.analyze.severity_mapping[std::stoi(key)] = {
                        val.at(0).get<std::string>(), val.at(1).get<std::string>()};
                }
            }
        }
        if (j.contains("synth")) {
            const auto& s = j.at("synth");
            cfg.synth.preset = s.value("preset", cfg.synth.preset);
            cfg.synth.districts = s.value("districts", cfg.synth.districts);
            cfg.synth.year_begin = s.value("year_begin", cfg.synth.year_begin);
            cfg.synth.year_end = s.value("year_end", cfg.synth.year_end);
            cfg.synth.regime_spec = s.value("regime_spec", cfg.synth.regime_spec);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("invalid config: " + std::string(e.what()));
    }
    return cfg;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("invalid config JSON in " + path + ": " + e.what());
    }
    return from_json(j);
}

// ---------------------------------------------------------------- manifest

std::string fnv1a_digest_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file for digest: " + path);
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const auto n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
    return hex;
}

RunManifest::RunManifest(const PipelineConfig& config) {
    j_["config"] = config.to_json();
    j_["seed"] = config.seed;
    j_["inputs"] = nlohmann::json::array();
    j_["outputs"] = nlohmann::json::array();
    j_["timings"] = nlohmann::json::array();
}

void RunManifest::add_input(const std::string& path) {
    j_["inputs"].push_back({{"path", path}, {"digest", fnv1a_digest_file(path)}});
}

void RunManifest::add_output(const std::string& path) {
    for (const auto& o : j_["outputs"]) {
        if (o.at("path") == path) return;
    }
    j_["outputs"].push_back({{"path", path}});
}

void RunManifest::add_timing(const std::string& stage, double seconds) {
    j_["timings"].push_back({{"stage", stage}, {"seconds", seconds}});
}

void RunManifest::write(const std::string& path) {
    for (auto& o : j_["outputs"]) {
        o["digest"] = fnv1a_digest_file(o.at("path").get<std::string>());
    }
    add_output(path);  // the manifest itself, listed without a digest
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write manifest: " + path);
    out << j_.dump(2) << '\n';
}

// ---------------------------------------------------------------- stages

Dataset run_ingest(const PipelineConfig& cfg, RunManifest& manifest) {
    StageTimer timer(manifest, "ingest");
    if (cfg.inputs.empty()) throw ConfigError("missing config key: inputs");

    std::vector<DistrictPart> parts;
    for (const auto& path : cfg.inputs) {
        manifest.add_input(path);
        parts.push_back(parse_power_csv(path, cfg.fill_value));
    }
    IngestOptions opts;
    opts.fill_value = cfg.fill_value;
    opts.strict = cfg.strict;
    Dataset ds = merge_and_clean(parts, opts);

    const auto path = out_path(cfg, "dataset.csv");
    write_dataset_csv(ds, path);
    manifest.add_output(path);
    return ds;
}

nlohmann::json model_artifact_json(const PipelineConfig& cfg, const ClusterResult& result) {
    nlohmann::json j;
    j["seed"] = cfg.seed;
    j["selected_model"] = result.selected;
    j["detected_k"] = result.detected_k;
    j["silhouette"] = {{"kmeans", result.silhouette_kmeans}, {"bgm", result.silhouette_bgm}};
    j["silhouette_sample_cap"] = cfg.cluster.silhouette_sample_cap;
    j["include_identifiers"] = cfg.include_identifiers;

    j["scaling"] = nlohmann::json::object();
    j["scaling"]["feature_names"] = result.scaled.feature_names;
    j["scaling"]["means"] =
        std::vector<double>(result.scaled.means.data(),
                            result.scaled.means.data() + result.scaled.means.size());
    j["scaling"]["stds"] = std::vector<double>(
        result.scaled.stds.data(), result.scaled.stds.data() + result.scaled.stds.size());

    nlohmann::json centroids = nlohmann::json::array();
    for (Eigen::Index c = 0; c < result.kmeans.centroids.rows(); ++c) {
        centroids.push_back(std::vector<double>(
            result.kmeans.centroids.row(c).begin(), result.kmeans.centroids.row(c).end()));
    }
    j["kmeans"] = {{"k", result.kmeans.k},
                   {"centroids", centroids},
                   {"inertia", result.kmeans.inertia},
                   {"iterations_run", result.kmeans.iterations_run},
                   {"n_init", cfg.cluster.n_init},
                   {"max_iter", cfg.cluster.max_iter},
                   {"tol", cfg.cluster.tol}};

    nlohmann::json bgm_means = nlohmann::json::array();
    for (Eigen::Index c = 0; c < result.bgm.means.rows(); ++c) {
        bgm_means.push_back(std::vector<double>(result.bgm.means.row(c).begin(),
                                                result.bgm.means.row(c).end()));
    }
    nlohmann::json covs = nlohmann::json::array();
    for (const auto& cov : result.bgm.covariances) {
        nlohmann::json cj = nlohmann::json::array();
        for (Eigen::Index r = 0; r < cov.rows(); ++r) {
            cj.push_back(std::vector<double>(cov.row(r).begin(), cov.row(r).end()));
        }
        covs.push_back(std::move(cj));
    }
    j["bgm"] = {{"k_max", result.bgm.k_max},
                {"alpha", result.bgm.alpha},
                {"weights", std::vector<double>(result.bgm.weights.begin(),
                                                result.bgm.weights.end())},
                {"means", bgm_means},
                {"covariances", covs},
                {"elbo_iterations", result.bgm.elbo_trace.size()},
                {"final_elbo",
                 result.bgm.elbo_trace.empty() ? 0.0 : result.bgm.elbo_trace.back()},
                {"reg_covar", cfg.cluster.reg_covar},
                {"weight_floor", cfg.cluster.weight_floor}};

    j["canonical_map"] = result.labeling.canonical_map;
    j["median_gwettop"] = result.labeling.median_gwettop;
    return j;
}

ClusterResult run_cluster(const PipelineConfig& cfg, const Dataset& dataset,
                          RunManifest& manifest) {
    StageTimer timer(manifest, "cluster");

    ClusterResult result;
    FeatureMatrix raw = select_features(dataset, cfg.include_identifiers);
    result.scaled = standardize(raw);

    const auto corr_path = out_path(cfg, "correlation.csv");
    write_correlation_csv(correlation_matrix(raw), raw.feature_names, corr_path);
    manifest.add_output(corr_path);

    KMeansParams params;
    params.n_init = cfg.cluster.n_init;
    params.max_iter = cfg.cluster.max_iter;
    params.tol = cfg.cluster.tol;

    result.elbow = elbow_sweep(result.scaled.values, cfg.cluster.k_min, cfg.cluster.k_max,
                               cfg.seed, params);
    result.detected_k =
        cfg.cluster.fixed_k > 0 ? cfg.cluster.fixed_k : detect_elbow(result.elbow);

    {
        const auto path = out_path(cfg, "elbow.csv");
        std::ofstream out(path, std::ios::binary);
        out << "K,INERTIA\n";
        for (const auto& [k, inertia] : result.elbow) out << k << ',' << inertia << '\n';
        manifest.add_output(path);
    }

    result.kmeans = kmeans_fit(result.scaled.values, result.detected_k, cfg.seed, params);

    BgmParams bgm_params;
    bgm_params.max_iter = cfg.cluster.bgm_max_iter;
    bgm_params.tol = cfg.cluster.bgm_tol;
    bgm_params.reg_covar = cfg.cluster.reg_covar;
    bgm_params.weight_floor = cfg.cluster.weight_floor;
    result.bgm = bgm_fit(result.scaled.values, result.detected_k, cfg.cluster.bgm_alpha,
                         cfg.seed, bgm_params);

    const auto bgm_hard = result.bgm.hard_assignments();
    result.silhouette_kmeans =
        silhouette_score(result.scaled.values, result.kmeans.assignments,
                         cfg.cluster.silhouette_sample_cap, cfg.seed);
    result.silhouette_bgm = silhouette_score(result.scaled.values, bgm_hard,
                                             cfg.cluster.silhouette_sample_cap, cfg.seed);

    if (cfg.cluster.model == "kmeans" || cfg.cluster.model == "bgm") {
        result.selected = cfg.cluster.model;
    } else if (cfg.cluster.model == "auto") {
        // ties go to K-means
        result.selected = result.silhouette_bgm > result.silhouette_kmeans ? "bgm" : "kmeans";
    } else {
        throw ConfigError("unknown cluster model: " + cfg.cluster.model);
    }

    const auto& selected_raw =
        result.selected == "bgm" ? bgm_hard : result.kmeans.assignments;
    result.labeling = canonicalize_labels(selected_raw, dataset);
    result.canonical_assignments = result.labeling.apply_all(selected_raw);

    {
        const auto path = out_path(cfg, "silhouette.json");
        nlohmann::json j;
        j["scores"] = nlohmann::json::array(
            {{{"model", "kmeans"}, {"silhouette", result.silhouette_kmeans}},
             {{"model", "bgm"}, {"silhouette", result.silhouette_bgm}}});
        j["selected"] = result.selected;
        j["sample_cap"] = cfg.cluster.silhouette_sample_cap;
        j["seed"] = cfg.seed;
        std::ofstream out(path, std::ios::binary);
        out << j.dump(2) << '\n';
        manifest.add_output(path);
    }

    const auto model_path = out_path(cfg, "model.json");
    {
        std::ofstream out(model_path, std::ios::binary);
        out << model_artifact_json(cfg, result).dump(2) << '\n';
        manifest.add_output(model_path);
    }

    const auto assign_path = out_path(cfg, "assignments.csv");
    write_assignments_csv(dataset, result.canonical_assignments, assign_path);
    manifest.add_output(assign_path);
    return result;
}

std::string accuracy_divergence_note(const ConfusionMatrix& cm, double reported_percent) {
    const double computed = cm.accuracy() * 100.0;
    if (std::abs(computed - reported_percent) < 0.5) return "";
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "computed accuracy %.2f%% (trace/total) diverges from reported %.0f%%",
                  computed, reported_percent);
    return buf;
}

ClassifyResult run_classify(const PipelineConfig& cfg, const Dataset& dataset,
                            const std::vector<int>& assignments, RunManifest& manifest) {
    StageTimer timer(manifest, "classify");
    if (assignments.size() != dataset.records.size()) {
        throw InputError("assignments not aligned with dataset");
    }

    FeatureMatrix scaled = standardize(select_features(dataset, cfg.include_identifiers));
    ClassifyResult result;
    result.split = split_train_test(scaled.rows(), cfg.split_ratio, cfg.seed);

    const auto gather = [&](const std::vector<Eigen::Index>& rows) {
        Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), scaled.cols());
        std::vector<int> y(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            x.row(static_cast<Eigen::Index>(i)) = scaled.values.row(rows[i]);
            y[i] = assignments[static_cast<std::size_t>(rows[i])];
        }
        return std::make_pair(std::move(x), std::move(y));
    };
    const auto [train_x, train_y] = gather(result.split.train_rows);
    const auto [test_x, test_y] = gather(result.split.test_rows);

    TreeParams tree_params;
    tree_params.max_depth = cfg.classify.max_depth;
    tree_params.min_samples_split = cfg.classify.min_samples_split;
    tree_params.min_samples_leaf = cfg.classify.min_samples_leaf;
    ForestParams forest_params;
    forest_params.n_trees = cfg.classify.n_trees;
    forest_params.max_features = cfg.classify.max_features;
    forest_params.tree = tree_params;

    std::vector<ClassifierModel> models;
    models.push_back({"knn", knn_fit(train_x, train_y, cfg.classify.k_neighbors)});
    models.push_back({"gaussian_nb", gnb_fit(train_x, train_y)});
    models.push_back({"decision_tree", dtree_fit(train_x, train_y, tree_params)});
    models.push_back({"random_forest", rf_fit(train_x, train_y, cfg.seed, forest_params)});

    nlohmann::json report;
    report["split"] = {{"ratio", cfg.split_ratio},
                       {"seed", cfg.seed},
                       {"train_rows", result.split.train_rows.size()},
                       {"test_rows", result.split.test_rows.size()}};
    report["note"] =
        "accuracy is computed exactly as trace/total of the confusion matrix; "
        "externally reported rounded percentages may diverge";
    report["classifiers"] = nlohmann::json::array();

    for (const auto& model : models) {
        ClassifyResult::Entry entry;
        entry.name = model.variant;
        entry.confusion = evaluate(model, test_x, test_y);
        entry.accuracy = entry.confusion.accuracy();

        nlohmann::json cj;
        cj["name"] = entry.name;
        cj["confusion_matrix"] = confusion_to_json(entry.confusion);
        cj["accuracy"] = entry.accuracy;
        if (model.variant == "knn") {
            cj["hyperparameters"] = {{"k_neighbors", cfg.classify.k_neighbors}};
        } else if (model.variant == "random_forest") {
            cj["hyperparameters"] = {{"n_trees", cfg.classify.n_trees},
                                     {"max_features", cfg.classify.max_features},
                                     {"max_depth", cfg.classify.max_depth},
                                     {"seed", cfg.seed}};
        } else if (model.variant == "decision_tree") {
            cj["hyperparameters"] = {{"max_depth", cfg.classify.max_depth},
                                     {"min_samples_split", cfg.classify.min_samples_split},
                                     {"min_samples_leaf", cfg.classify.min_samples_leaf}};
        } else {
            cj["hyperparameters"] = nlohmann::json::object();
        }
        report["classifiers"].push_back(std::move(cj));
        result.entries.push_back(std::move(entry));
    }

    {
        const auto path = out_path(cfg, "metrics.json");
        std::ofstream out(path, std::ios::binary);
        out << report.dump(2) << '\n';
        manifest.add_output(path);
    }
    {
        // tabular rendering: one row per classifier, flattened matrix
        const auto path = out_path(cfg, "metrics.csv");
        std::ofstream out(path, std::ios::binary);
        out << "CLASSIFIER,CONFUSION_MATRIX,ACCURACY\n";
        for (const auto& entry : result.entries) {
            out << entry.name << ",\"";
            for (Eigen::Index i = 0; i < entry.confusion.counts.rows(); ++i) {
                if (i) out << "; ";
                for (Eigen::Index j = 0; j < entry.confusion.counts.cols(); ++j) {
                    if (j) out << ' ';
                    out << entry.confusion.counts(i, j);
                }
            }
            out << "\"," << entry.accuracy << '\n';
        }
        manifest.add_output(path);
    }
    return result;
}

void run_analyze(const PipelineConfig& cfg, const Dataset& dataset,
                 const std::vector<int>& assignments, RunManifest& manifest) {
    StageTimer timer(manifest, "analyze");
    if (assignments.size() != dataset.records.size()) {
        throw InputError("assignments not aligned with dataset");
    }

    FeatureMatrix scaled = standardize(select_features(dataset, cfg.include_identifiers));
    ClusterProfile profile = profile_clusters(dataset, assignments, scaled);
    DensityGrid daywise = daywise_density(dataset, assignments, cfg.analyze.day_grid_step);
    DensityGrid geo =
        geospatial_density(dataset, assignments, cfg.analyze.lat_min, cfg.analyze.lat_max,
                           cfg.analyze.lon_min, cfg.analyze.lon_max, cfg.analyze.geo_grid_n);
    const auto severity = label_severity(profile, cfg.analyze.severity_mapping, daywise);

    nlohmann::json j;
    j["clusters"] = nlohmann::json::array();
    for (int c = 0; c < profile.cluster_count(); ++c) {
        const auto cs = static_cast<std::size_t>(c);
        nlohmann::json cj;
        cj["cluster"] = c;
        cj["member_count"] = profile.member_counts[cs];
        cj["extremity"] = severity[cs].extremity;
        cj["season"] = severity[cs].season;
        cj["dominant_day_ranges"] = nlohmann::json::array();
        for (const auto& [a, b] : severity[cs].day_ranges) {
            cj["dominant_day_ranges"].push_back({a, b});
        }
        cj["parameters"] = nlohmann::json::object();
        for (int p = 0; p < kWeatherParamCount; ++p) {
            const auto& s = profile.stats[cs][static_cast<std::size_t>(p)];
            cj["parameters"][kWeatherParamNames[p]] = {{"min", s.min},     {"q1", s.q1},
                                                       {"median", s.median}, {"q3", s.q3},
                                                       {"max", s.max},     {"mean", s.mean}};
        }
        cj["radar"] = std::vector<double>(profile.radar[cs].begin(), profile.radar[cs].end());
        j["clusters"].push_back(std::move(cj));
    }

    const auto profile_path = out_path(cfg, "profile.json");
    {
        std::ofstream out(profile_path, std::ios::binary);
        out << j.dump(2) << '\n';
        manifest.add_output(profile_path);
    }

    const auto boxplot_path = out_path(cfg, "boxplot.csv");
    write_boxplot_csv(profile, boxplot_path);
    manifest.add_output(boxplot_path);

    const auto daywise_path = out_path(cfg, "daywise_density.csv");
    write_density_grid_csv(daywise, daywise_path);
    manifest.add_output(daywise_path);

    const auto geo_path = out_path(cfg, "geo_density.csv");
    write_density_grid_csv(geo, geo_path);
    manifest.add_output(geo_path);

    const auto shares_path = out_path(cfg, "membership_shares.csv");
    write_membership_shares_csv(dataset, assignments, shares_path);
    manifest.add_output(shares_path);
}

SynthResult run_synth(const PipelineConfig& cfg, RunManifest& manifest) {
    StageTimer timer(manifest, "synth");

    std::vector<RegimeSpec> regimes = cfg.synth.regime_spec.empty()
                                          ? default_regimes()
                                          : load_regime_spec(cfg.synth.regime_spec);
    SynthResult result;
    if (cfg.synth.preset == "full") {
        result = generate_full_scale(cfg.seed);
    } else if (cfg.synth.preset == "ci") {
        result = generate(cfg.synth.districts, cfg.synth.year_begin, cfg.synth.year_end,
                          regimes, cfg.seed);
    } else {
        throw ConfigError("unknown synth preset: " + cfg.synth.preset);
    }

    const auto data_path = out_path(cfg, "synthetic.csv");
    write_dataset_csv(result.dataset, data_path);
    manifest.add_output(data_path);

    const auto tags_path = out_path(cfg, "synth_tags.csv");
    {
        std::ofstream out(tags_path, std::ios::binary);
        out << "DISTRICT,YEAR,DOY,REGIME\n";
        for (std::size_t i = 0; i < result.regime_tags.size(); ++i) {
            const auto& r = result.dataset.records[i];
            out << result.dataset.source_labels[i] << ',' << r.year << ',' << r.doy << ','
                << result.regime_tags[i] << '\n';
        }
        manifest.add_output(tags_path);
    }

    const auto spec_path = out_path(cfg, "regimes.json");
    save_regime_spec(regimes, spec_path);
    manifest.add_output(spec_path);
    return result;
}

void run_all(const PipelineConfig& cfg, RunManifest& manifest) {
    Dataset dataset;
    if (!cfg.inputs.empty()) {
        dataset = run_ingest(cfg, manifest);
    } else {
        dataset = run_synth(cfg, manifest).dataset;
        const auto path = out_path(cfg, "dataset.csv");
        write_dataset_csv(dataset, path);
        manifest.add_output(path);
    }
    ClusterResult cluster = run_cluster(cfg, dataset, manifest);
    run_classify(cfg, dataset, cluster.canonical_assignments, manifest);
    run_analyze(cfg, dataset, cluster.canonical_assignments, manifest);
}

}  // namespace drought
