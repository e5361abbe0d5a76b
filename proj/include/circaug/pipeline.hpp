#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "circaug/boost.hpp"
#include "circaug/dataio.hpp"
#include "circaug/eval.hpp"
#include "circaug/gan.hpp"
#include "circaug/oracle.hpp"

namespace circaug {

struct DatasetSection {
    std::string circuit;               // gate kind or "current_reference"; drives generation and the simulator
    std::filesystem::path csv;         // optional: load rows instead of generating them
    std::filesystem::path schema;      // required with csv
    std::size_t rows = 500;
    FeatureRanges ranges;
};

struct EvalSection {
    std::size_t bins = 50;
    double smoothing = 1e-6;
    std::size_t samples = 1000;         // generated rows per evaluation
    std::size_t diversity_rows = 500;
    bool ann = false;                   // eval also fits the reference regressor
    RegressorConfig regressor;
};

struct ExperimentSection {
    std::string netlist = "c17";
    std::size_t real_rows = 100;
    std::size_t artificial_rows = 2000;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    std::size_t eval_points = 200;
};

struct SweepSection {
    std::vector<std::size_t> layers{2, 3, 4};
    std::size_t width = 64;
    std::vector<double> lr{0.00025, 0.0005, 0.001};
    std::vector<RegularizerMode> regularizers{RegularizerMode::spectral_reg()};
};

struct PipelineConfig {
    std::uint64_t seed = 0;
    std::filesystem::path out = "runs";
    std::filesystem::path checkpoint;  // for sample / eval / report
    std::size_t sample_rows = 1000;
    DatasetSection dataset;
    GanConfig gan;
    EvalSection eval;
    GbrtConfig boost;
    ExperimentSection experiment;
    SweepSection sweep;

    /// Applies the root seed to every component seed.
    void set_seed(std::uint64_t s);
    void validate() const;
};

/// Relative paths resolve against `base_dir`.
PipelineConfig parse_pipeline_config(std::string_view toml_text, const std::string& source_name,
                                     const std::filesystem::path& base_dir);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

/// Canonical form; its hash names run directories.
nlohmann::json to_json(const PipelineConfig& config);
std::string config_hash(const PipelineConfig& config, const std::string& subcommand);

struct RunOptions {
    std::size_t jobs = 1;
};

struct RunResult {
    std::filesystem::path dir;
    std::vector<std::filesystem::path> artifacts;  // relative to dir
    nlohmann::json summary;
};

inline constexpr const char* kSubcommands[] = {"gen-data", "train-gan", "sweep", "sample", "eval", "augment-train", "report"};

/// Runs one subcommand, writing every artifact plus manifest.json under
/// <out>/<subcommand>-<hash>/.
RunResult run_subcommand(const std::string& subcommand, const PipelineConfig& config, const RunOptions& options = {});

/// Dataset described by the config's [dataset] section.
Dataset load_or_generate(const PipelineConfig& config);
/// Simulator for the configured circuit, or empty when none is configured.
Simulator configured_simulator(const PipelineConfig& config);

}  // namespace circaug
