#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "circaug/dataio.hpp"
#include "circaug/nn.hpp"
#include "circaug/oracle.hpp"

namespace circaug {

inline constexpr double kPercentDenominatorFloor = 1e-12;

struct PercentageError {
    std::vector<std::string> features;  // simulator_output features, schema order
    std::vector<double> percent;
    std::size_t rows_used = 0;
    std::size_t rejected = 0;

    double mean() const;
};

/// Simulates each generated row from its input features and compares the
/// generated outputs against the simulated ones. Rejected rows are skipped.
PercentageError avg_percentage_error(const Dataset& generated, const Simulator& simulator);

struct AnnComparison {
    double mse = 0.0;
    double rmse = 0.0;
    double mae = 0.0;
};

/// Generated output values against the regressor's predictions on the
/// generated inputs, pooled over every target column.
AnnComparison eval_vs_ann(const Dataset& generated, const MlpRegressor& ann);

struct KlDivergence {
    std::vector<std::string> features;
    std::vector<double> kl;
    double mean = 0.0;
};

/// KL(p || q) per feature on histograms over p's range widened 5% per side.
/// Categorical features use one bin per corner code.
KlDivergence kl_divergence(const Dataset& p_data, const Dataset& q_data, std::size_t bins = 50,
                           double smoothing = 1e-6);

struct Histogram {
    std::string feature;
    std::vector<double> edges;  // bins + 1, strictly increasing
    std::vector<std::size_t> counts;
    std::vector<double> density;  // probability mass per bin, sums to 1
};

/// Uniform bins over `range` (default: the data's own range). Values outside
/// the range land in the extreme bins.
Histogram density_export(const Dataset& data, const std::string& feature, std::size_t bins,
                         std::optional<std::pair<double, double>> range = std::nullopt);
/// Header: feature,bin_lo,bin_hi,count,density
std::string histogram_csv(const std::vector<Histogram>& histograms);

inline constexpr double kDiversityCollapseThreshold = 0.2;
inline constexpr double kSpectralCollapseRatio = 0.05;

struct CollapseReport {
    double diversity = 0.0;
    bool diversity_flag = false;
    std::vector<std::size_t> collapsed_layers;
    bool collapse = false;
};

struct CollapseOptions {
    std::size_t max_rows = 500;  // both sets are subsampled to the same size
    std::uint64_t seed = 0;
};

/// Nearest-neighbour diversity ratio in the training scaler's [-1, 1] space,
/// plus the spectral-collapse test on each discriminator spectrum.
CollapseReport mode_collapse_report(const Dataset& generated, const Dataset& training,
                                    const std::vector<std::vector<double>>& disc_spectra,
                                    const CollapseOptions& options = {});

/// True when more than half of the values fall below 0.05 * max.
bool spectrum_collapsed(const std::vector<double>& sigma);

struct EvalReport {
    std::size_t epoch = 0;
    std::optional<PercentageError> pct_error;
    std::optional<double> mean_pct_error;
    KlDivergence kl;
    CollapseReport collapse;
    std::vector<std::vector<double>> disc_spectra;
};

struct EvalOptions {
    std::size_t bins = 50;
    double smoothing = 1e-6;
    CollapseOptions collapse;
};

/// The full battery on one generated set. `simulator` may be empty.
EvalReport evaluate_generated(const Dataset& generated, const Dataset& training, const Simulator& simulator,
                              const std::vector<std::vector<double>>& disc_spectra, const EvalOptions& options,
                              std::size_t epoch);

nlohmann::json to_json(const EvalReport& report);

}  // namespace circaug
