#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "circaug/dataio.hpp"
#include "circaug/linalg.hpp"
#include "circaug/oracle.hpp"

namespace circaug {

struct GbrtConfig {
    std::size_t n_trees = 200;
    std::size_t max_depth = 3;
    std::size_t min_samples_leaf = 5;
    double learning_rate = 0.1;
    std::uint64_t seed = 0;  // fitting is deterministic; kept for provenance

    void validate() const;
};

/// Pre-order node array; node 0 is the root. Leaves have feature = -1.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;  // x[feature] < threshold goes left
    int left = -1;
    int right = -1;
    double value = 0.0;  // leaf output, shrinkage already applied
    std::size_t samples = 0;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;

    double predict(std::span<const double> x) const;
    std::size_t depth() const;
};

struct GbrtModel {
    std::string target;
    std::vector<std::string> feature_names;  // simulator inputs, schema order
    double init_value = 0.0;
    double learning_rate = 0.1;
    std::vector<RegressionTree> trees;
    std::vector<double> train_mse;  // after init, then after each tree
    bool constant_target = false;
};

/// Squared-error boosting on raw feature rows.
GbrtModel fit_gbrt(const Matrix& x, std::span<const double> y, const GbrtConfig& config);
/// Fits `target` (a simulator_output feature) from the simulator inputs.
GbrtModel fit_gbrt(const Dataset& train, const std::string& target, const GbrtConfig& config);

/// `rows` holds feature columns only.
std::vector<double> predict_gbrt(const GbrtModel& model, const Matrix& rows);
double predict_gbrt(const GbrtModel& model, std::span<const double> row);

inline constexpr int kGbrtFormatVersion = 1;
nlohmann::json to_json(const GbrtModel& model);
GbrtModel gbrt_from_json(const nlohmann::json& j);

// --- composed-circuit experiment -------------------------------------------

struct GateTrainingData {
    Dataset real;
    Dataset artificial;  // may be empty (zero rows) with the same schema
};

struct AugmentationConfig {
    GbrtConfig gbrt;
    std::size_t eval_points = 200;
    FeatureRanges eval_ranges;  // empty: oracle defaults
    std::uint64_t seed = 0;
};

struct AugmentationPoint {
    double simulated_ps = 0.0;
    double predicted_real_ps = 0.0;
    double predicted_augmented_ps = 0.0;
};

/// Means over the evaluation points of the critical-path delay and of the
/// per-point absolute percentage errors.
struct AugmentationRecord {
    std::string netlist;
    double simulated_ps = 0.0;
    double predicted_real_ps = 0.0;
    double predicted_augmented_ps = 0.0;
    double pct_error_real = 0.0;
    double pct_error_augmented = 0.0;
    std::size_t real_rows = 0;
    std::size_t artificial_rows = 0;
    std::vector<AugmentationPoint> points;
};

/// One boosted model per delay column and gate kind, fit on real rows and on
/// real + artificial rows; both arms compose critical-path delays over the
/// same evaluation points as the oracle.
AugmentationRecord augmentation_experiment(const std::map<GateKind, GateTrainingData>& data, const Netlist& netlist,
                                           const AugmentationConfig& config,
                                           const OracleConstants& k = default_constants());

nlohmann::json to_json(const AugmentationRecord& record, bool include_points = false);

}  // namespace circaug
