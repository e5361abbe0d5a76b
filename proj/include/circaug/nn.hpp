#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "circaug/dataio.hpp"
#include "circaug/linalg.hpp"
#include "circaug/rng.hpp"

namespace circaug {

enum class ActivationKind { leaky_relu, tanh, sigmoid, linear };

struct Activation {
    ActivationKind kind = ActivationKind::linear;
    double alpha = 0.2;  // leaky_relu slope for negative inputs

    static Activation leaky_relu(double alpha = 0.2) { return {ActivationKind::leaky_relu, alpha}; }
    static Activation tanh() { return {ActivationKind::tanh, 0.2}; }
    static Activation sigmoid() { return {ActivationKind::sigmoid, 0.2}; }
    static Activation linear() { return {ActivationKind::linear, 0.2}; }

    void validate() const;
    double apply(double x) const;
    /// Derivative given the pre-activation `x` and the activation value `y`.
    double derivative(double x, double y) const;

    friend bool operator==(const Activation&, const Activation&) = default;
};

std::string to_string(ActivationKind kind);
ActivationKind parse_activation_kind(const std::string& text);

struct LayerSpec {
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
    Activation activation;

    friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct DenseLayer {
    Matrix weights;  // out_dim x in_dim
    std::vector<double> bias;
    LayerSpec spec;
};

struct MlpParams {
    std::vector<DenseLayer> layers;

    std::size_t in_dim() const { return layers.empty() ? 0 : layers.front().spec.in_dim; }
    std::size_t out_dim() const { return layers.empty() ? 0 : layers.back().spec.out_dim; }
    std::size_t parameter_count() const;
    /// Shapes chain and all parameters are finite.
    void validate() const;
};

/// He-uniform weights for leaky-ReLU layers, Xavier-uniform otherwise; zero biases.
MlpParams init_mlp(std::span<const LayerSpec> specs, Rng& rng);

/// Specs for in -> hidden... -> out with one activation for hidden layers.
std::vector<LayerSpec> chain_specs(std::size_t in_dim, std::span<const std::size_t> hidden, std::size_t out_dim,
                                   Activation hidden_act, Activation out_act);

struct LayerCache {
    Matrix input;  // n x in_dim
    Matrix pre;    // n x out_dim
    Matrix post;   // n x out_dim
};

struct ForwardPass {
    Matrix output;
    std::vector<LayerCache> cache;
};

ForwardPass forward(const MlpParams& params, const Matrix& batch);
/// Forward without keeping the cache.
Matrix infer(const MlpParams& params, const Matrix& batch);

struct LayerGrad {
    Matrix weights;
    std::vector<double> bias;
};

struct Gradients {
    std::vector<LayerGrad> layers;
    Matrix input;  // d loss / d batch

    static Gradients zeros_like(const MlpParams& params);
};

Gradients backward(const MlpParams& params, std::span<const LayerCache> cache, const Matrix& grad_output);

struct BceResult {
    double loss = 0.0;
    std::vector<double> grad;  // d loss / d logit, already divided by batch size
};

/// Mean binary cross entropy on logits, stable for large |logit|.
BceResult bce_with_logits(std::span<const double> logits, std::span<const double> labels);

double sigmoid(double x);

struct AdamState {
    std::vector<LayerGrad> m;
    std::vector<LayerGrad> v;
    std::uint64_t t = 0;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    static AdamState for_params(const MlpParams& params, double lr, double beta1 = 0.9, double beta2 = 0.999,
                                double eps = 1e-8);
};

/// Bias-corrected Adam step, in place. Entries whose gradient is exactly
/// zero keep their parameter and moments; t advances regardless.
void adam_update(MlpParams& params, const Gradients& grads, AdamState& state);

// --- regressor used as the ANN reference model -------------------------

struct RegressorConfig {
    std::vector<std::string> targets;  // empty: every simulator_output feature
    std::vector<std::size_t> hidden{64, 64, 64};
    Activation hidden_activation = Activation::leaky_relu();
    std::size_t epochs = 300;
    std::size_t batch_size = 32;
    double lr = 1e-3;
    double test_fraction = 0.2;
    std::uint64_t seed = 0;
};

struct RegressionMetrics {
    double mse = 0.0;
    double rmse = 0.0;
    double mae = 0.0;
    std::optional<double> r2;  // empty when the target has zero variance
    double mean_pct_error = 0.0;
    bool degenerate = false;
};

struct MlpRegressor {
    MlpParams params;
    FeatureSchema schema;
    std::vector<std::size_t> input_columns;
    std::vector<std::size_t> target_columns;
    MinMaxScaler input_scaler;
    MinMaxScaler target_scaler;
    RegressionMetrics metrics;
};

MlpRegressor fit_mlp_regressor(const Dataset& data, const RegressorConfig& config);

/// `rows` holds either full schema rows or input columns only.
/// Returns n x targets in physical units.
Matrix predict(const MlpRegressor& model, const Matrix& rows);

RegressionMetrics regression_metrics(std::span<const double> truth, std::span<const double> predicted);

// --- checkpoints ---------------------------------------------------------

inline constexpr int kMlpFormatVersion = 1;

nlohmann::json to_json(const MlpParams& params);
MlpParams mlp_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MinMaxScaler& scaler);
MinMaxScaler scaler_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FeatureSchema& schema);
FeatureSchema schema_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MlpRegressor& model);
MlpRegressor regressor_from_json(const nlohmann::json& j);

}  // namespace circaug
