#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "drought/error.hpp"
#include "drought/pipeline.hpp"

namespace {

using drought::PipelineConfig;
using drought::RunManifest;

struct GlobalOpts {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool strict = false;
};

PipelineConfig make_config(const GlobalOpts& opts) {
    PipelineConfig cfg;
    if (!opts.config_path.empty()) cfg = PipelineConfig::load(opts.config_path);
    if (const char* env = std::getenv("DROUGHT_OUT_DIR"); env && opts.out_dir.empty() &&
                                                          opts.config_path.empty()) {
        cfg.out_dir = env;
    }
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    if (opts.seed_set) cfg.seed = opts.seed;
    if (opts.strict) cfg.strict = true;
    return cfg;
}

void finish(const PipelineConfig& cfg, RunManifest& manifest) {
    manifest.write(cfg.out_dir + "/manifest.json");
    std::cout << "wrote " << cfg.out_dir << "/manifest.json\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"drought regime pipeline: ingest, cluster, classify, analyze"};
    app.require_subcommand(1);

    GlobalOpts opts;
    app.add_option("--config", opts.config_path, "pipeline config JSON");
    app.add_option("--out-dir", opts.out_dir, "output directory (overrides config)");
    auto* seed_opt = app.add_option("--seed", opts.seed, "master seed (overrides config)");
    app.add_flag("--strict", opts.strict, "treat range violations as errors");

    std::vector<std::string> input_paths;
    std::string dataset_path;
    std::string assignments_path;
    std::string regime_spec_path;
    std::string synth_preset;

    auto* ingest = app.add_subcommand("ingest", "parse, validate and merge district CSV files");
    ingest->add_option("inputs", input_paths, "district CSV files");

    auto* cluster = app.add_subcommand("cluster", "elbow sweep, fit clusterers, canonicalize");
    cluster->add_option("--dataset", dataset_path, "cleaned dataset CSV")->required();

    auto* classify = app.add_subcommand("classify", "train and evaluate the four classifiers");
    classify->add_option("--dataset", dataset_path, "cleaned dataset CSV")->required();
    classify->add_option("--assignments", assignments_path, "canonical assignments CSV")
        ->required();

    auto* analyze = app.add_subcommand("analyze", "profiles, severity labels, KDE grids");
    analyze->add_option("--dataset", dataset_path, "cleaned dataset CSV")->required();
    analyze->add_option("--assignments", assignments_path, "canonical assignments CSV")
        ->required();

    auto* synth = app.add_subcommand("synth", "generate seeded synthetic weather data");
    synth->add_option("--regime-spec", regime_spec_path, "regime spec JSON");
    synth->add_option("--preset", synth_preset, "ci or full");

    auto* run_all_cmd = app.add_subcommand("run-all", "full pipeline, all artifacts");

    CLI11_PARSE(app, argc, argv);
    opts.seed_set = seed_opt->count() > 0;

    try {
        PipelineConfig cfg = make_config(opts);
        if (!input_paths.empty()) cfg.inputs = input_paths;
        if (!regime_spec_path.empty()) cfg.synth.regime_spec = regime_spec_path;
        if (!synth_preset.empty()) cfg.synth.preset = synth_preset;

        RunManifest manifest(cfg);
        if (ingest->parsed()) {
            drought::Dataset ds = drought::run_ingest(cfg, manifest);
            std::cout << "ingested " << ds.size() << " rows from " << ds.district_count
                      << " districts (" << ds.dropped_rows << " dropped)\n";
            for (const auto& w : ds.warnings) std::cerr << "warning: " << w << '\n';
        } else if (cluster->parsed()) {
            drought::Dataset ds = drought::read_dataset_csv(dataset_path);
            manifest.add_input(dataset_path);
            auto result = drought::run_cluster(cfg, ds, manifest);
            std::cout << "detected k=" << result.detected_k << ", selected "
                      << result.selected << " (silhouette kmeans "
                      << result.silhouette_kmeans << ", bgm " << result.silhouette_bgm
                      << ")\n";
        } else if (classify->parsed()) {
            drought::Dataset ds = drought::read_dataset_csv(dataset_path);
            manifest.add_input(dataset_path);
            manifest.add_input(assignments_path);
            auto assignments = drought::read_assignments_csv(assignments_path);
            auto result = drought::run_classify(cfg, ds, assignments, manifest);
            for (const auto& entry : result.entries) {
                std::cout << entry.name << " accuracy " << entry.accuracy << '\n';
            }
        } else if (analyze->parsed()) {
            drought::Dataset ds = drought::read_dataset_csv(dataset_path);
            manifest.add_input(dataset_path);
            manifest.add_input(assignments_path);
            auto assignments = drought::read_assignments_csv(assignments_path);
            drought::run_analyze(cfg, ds, assignments, manifest);
            std::cout << "analysis artifacts written to " << cfg.out_dir << '\n';
        } else if (synth->parsed()) {
            auto result = drought::run_synth(cfg, manifest);
            std::cout << "generated " << result.dataset.size() << " rows\n";
        } else if (run_all_cmd->parsed()) {
            drought::run_all(cfg, manifest);
            std::cout << "pipeline complete\n";
        }
        finish(cfg, manifest);
        return 0;
    } catch (const drought::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
