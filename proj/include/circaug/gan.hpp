#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "circaug/dataio.hpp"
#include "circaug/eval.hpp"
#include "circaug/linalg.hpp"
#include "circaug/nn.hpp"
#include "circaug/rng.hpp"

namespace circaug {

enum class RegularizerKind { none, spectral_norm, spectral_reg };

struct RegularizerMode {
    RegularizerKind kind = RegularizerKind::spectral_reg;
    double i_fraction = 0.5;  // spectral_reg only, in (0, 1]

    static RegularizerMode none() { return {RegularizerKind::none, 0.5}; }
    static RegularizerMode spectral_norm() { return {RegularizerKind::spectral_norm, 0.5}; }
    static RegularizerMode spectral_reg(double i_fraction = 0.5) { return {RegularizerKind::spectral_reg, i_fraction}; }

    void validate() const;
    /// i = max(1, round(i_fraction * r)), capped at r.
    std::size_t top_count(std::size_t rank) const;

    friend bool operator==(const RegularizerMode&, const RegularizerMode&) = default;
};

/// "none", "spectral_norm", "spectral_reg" or "spectral_reg:<fraction>".
std::string to_string(const RegularizerMode& mode);
RegularizerMode parse_regularizer(const std::string& text);

enum class GeneratorLoss { non_saturating, minimax };

struct GanConfig {
    std::size_t latent_dim = 0;  // 0: max(8, data_dim)
    std::vector<std::size_t> gen_hidden{64, 64, 64};
    std::vector<std::size_t> disc_hidden{64, 64, 64};
    double lr = 5e-4;
    double beta1 = 0.5;
    double beta2 = 0.999;
    std::size_t batch_size = 64;
    std::size_t epochs = 2000;
    std::size_t disc_steps_per_gen_step = 1;
    RegularizerMode regularizer = RegularizerMode::spectral_reg(0.5);
    GeneratorLoss gen_loss = GeneratorLoss::non_saturating;
    double leaky_alpha = 0.2;
    std::uint64_t seed = 0;
    std::size_t eval_every = 50;

    void validate() const;
    std::size_t resolved_latent_dim(std::size_t data_dim) const;
};

/// W / sigma_hat, where sigma_hat comes from `iters` warm power-iteration
/// rounds. Returns w unchanged when sigma_hat < 1e-12.
struct SpectralNormResult {
    Matrix w;
    double sigma = 0.0;
    PowerIterState state;
};
SpectralNormResult apply_spectral_normalization(const Matrix& w, const PowerIterState& state, std::size_t iters = 1);

/// (W + U ΔD Vᵀ) / sigma_1 with ΔD = diag(sigma_1 - sigma_j) for j < i, zero
/// after. A zero matrix is returned unchanged.
Matrix apply_spectral_regularization(const Matrix& w, std::size_t i);
/// As above, reusing a decomposition `s` of w the caller already has.
Matrix apply_spectral_regularization(const Matrix& w, const SvdResult& s, std::size_t i);

struct TrainLogEntry {
    std::size_t epoch = 0;
    double d_loss = 0.0;  // mean over the epoch's steps
    double g_loss = 0.0;
    EvalReport report;
};

struct TrainLog {
    std::vector<TrainLogEntry> entries;
};

struct GanModel {
    GanConfig config;
    std::size_t data_dim = 0;
    MlpParams gen;
    MlpParams disc;  // raw weights; the regularizer is applied per forward pass
    std::vector<PowerIterState> disc_power_states;
    AdamState gen_adam;
    AdamState disc_adam;
    FeatureSchema schema;
    MinMaxScaler scaler;  // fit on the training data by train()
    TrainLog log;
    std::size_t epochs_completed = 0;
    std::size_t steps_completed = 0;

    // Working state; not part of checkpoints.
    std::vector<std::optional<SvdResult>> disc_svd_cache;
    Rng shuffle_rng;
    Rng latent_rng;

    /// The discriminator weights the next forward pass would use; for
    /// spectral_norm this advances the power-iteration state.
    MlpParams effective_discriminator();
    /// Singular values of the matrices a forward pass would use, without
    /// advancing any state.
    std::vector<std::vector<double>> disc_spectra() const;
};

GanModel build(const GanConfig& config, std::size_t data_dim);

struct StepLosses {
    double d_loss = 0.0;
    double g_loss = 0.0;
};

/// One generator update preceded by disc_steps_per_gen_step discriminator
/// updates. `real_batch` is already in the scaler's [-1, 1] space.
StepLosses train_step(GanModel& model, const Matrix& real_batch, Rng& rng);

/// Invoked every eval_every epochs and after the last epoch.
using GanEvaluator = std::function<EvalReport(const GanModel& model, std::size_t epoch)>;

struct TrainResult {
    GanModel best;
    GanModel final;
    TrainLog log;
    std::size_t best_epoch = 0;
};

/// Scores compare mean percentage error when present, else mean KL.
double selection_score(const EvalReport& report);

/// Fits the scaler on `data` when the model has none, then runs
/// config.epochs epochs of shuffled minibatches.
TrainResult train(GanModel model, const Dataset& data, const GanEvaluator& evaluator);

/// n rows in physical units.
Dataset sample(const GanModel& model, std::size_t n, Rng& rng);
/// Generator output before inverse scaling, in (-1, 1).
Matrix sample_scaled(const GanModel& model, std::size_t n, Rng& rng);

inline constexpr int kGanFormatVersion = 1;

nlohmann::json to_json(const GanConfig& config);
GanConfig gan_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GanModel& model);
GanModel gan_from_json(const nlohmann::json& j);

/// Header: epoch,d_loss,g_loss,mean_pct_error,mean_kl,diversity,collapse,
/// then pct_<output> per output feature.
std::string train_log_csv(const TrainLog& log);
/// Header: epoch,layer,index,sigma
std::string spectra_csv(const TrainLog& log);

}  // namespace circaug
