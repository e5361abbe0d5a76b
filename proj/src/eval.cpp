#include "circaug/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "circaug/error.hpp"

namespace circaug {

namespace {

void require_rows(const Dataset& d, const char* what) {
    if (d.empty()) throw ValidationError(std::string(what) + ": empty dataset");
}

// Bin index for x over [lo, hi) split into `bins`; out-of-range values clamp.
std::size_t bin_of(double x, double lo, double hi, std::size_t bins) {
    const double t = (x - lo) / (hi - lo) * static_cast<double>(bins);
    if (!(t > 0.0)) return 0;
    return std::min(static_cast<std::size_t>(t), bins - 1);
}

struct Binning {
    double lo = 0.0;
    double hi = 1.0;
    std::size_t bins = 1;
};

Binning categorical_binning() { return {-0.5, kCornerCount - 0.5, static_cast<std::size_t>(kCornerCount)}; }

std::vector<double> bin_mass(std::span<const double> values, const Binning& b) {
    std::vector<double> mass(b.bins, 0.0);
    for (double x : values) mass[bin_of(x, b.lo, b.hi, b.bins)] += 1.0;
    for (double& m : mass) m /= static_cast<double>(values.size());
    return mass;
}

}  // namespace

double PercentageError::mean() const {
    if (percent.empty()) return 0.0;
    return std::accumulate(percent.begin(), percent.end(), 0.0) / static_cast<double>(percent.size());
}

PercentageError avg_percentage_error(const Dataset& generated, const Simulator& simulator) {
    require_rows(generated, "avg_percentage_error");
    if (!simulator) throw ValidationError("avg_percentage_error: no simulator");
    const auto in_idx = generated.schema.input_indices();
    const auto out_idx = generated.schema.output_indices();
    PercentageError r;
    for (std::size_t j : out_idx) r.features.push_back(generated.schema[j].name);
    r.percent.assign(out_idx.size(), 0.0);

    std::vector<double> inputs(in_idx.size());
    for (std::size_t i = 0; i < generated.size(); ++i) {
        for (std::size_t j = 0; j < in_idx.size(); ++j) inputs[j] = generated.rows(i, in_idx[j]);
        const auto sim = simulator(inputs);
        if (!sim) {
            ++r.rejected;
            continue;
        }
        if (sim->size() != out_idx.size()) throw ValidationError("avg_percentage_error: simulator output width mismatch");
        for (std::size_t j = 0; j < out_idx.size(); ++j) {
            const double s = (*sim)[j];
            r.percent[j] += 100.0 * std::abs(generated.rows(i, out_idx[j]) - s) /
                            std::max(std::abs(s), kPercentDenominatorFloor);
        }
        ++r.rows_used;
    }
    if (r.rows_used == 0) throw ValidationError("avg_percentage_error: the simulator rejected every row");
    for (double& p : r.percent) p /= static_cast<double>(r.rows_used);
    return r;
}

AnnComparison eval_vs_ann(const Dataset& generated, const MlpRegressor& ann) {
    require_rows(generated, "eval_vs_ann");
    if (!(generated.schema == ann.schema)) throw ValidationError("eval_vs_ann: schema differs from the regressor's");
    const Matrix predicted = predict(ann, generated.rows);
    AnnComparison c;
    const std::size_t n = predicted.size();
    for (std::size_t i = 0; i < predicted.rows(); ++i)
        for (std::size_t t = 0; t < ann.target_columns.size(); ++t) {
            const double d = generated.rows(i, ann.target_columns[t]) - predicted(i, t);
            c.mse += d * d;
            c.mae += std::abs(d);
        }
    c.mse /= static_cast<double>(n);
    c.mae /= static_cast<double>(n);
    c.rmse = std::sqrt(c.mse);
    return c;
}

KlDivergence kl_divergence(const Dataset& p_data, const Dataset& q_data, std::size_t bins, double smoothing) {
    require_rows(p_data, "kl_divergence");
    require_rows(q_data, "kl_divergence");
    if (!(p_data.schema == q_data.schema)) throw ValidationError("kl_divergence: datasets have different schemas");
    if (bins < 2) throw ValidationError("kl_divergence: bins must be >= 2");
    if (!(smoothing > 0.0)) throw ValidationError("kl_divergence: smoothing must be positive");

    KlDivergence r;
    for (std::size_t f = 0; f < p_data.schema.size(); ++f) {
        const Feature& feat = p_data.schema[f];
        const auto pv = p_data.rows.column(f);
        const auto qv = q_data.rows.column(f);
        Binning b;
        if (feat.categorical) {
            b = categorical_binning();
        } else {
            const auto [mn, mx] = std::minmax_element(pv.begin(), pv.end());
            const double pad = *mx > *mn ? 0.05 * (*mx - *mn) : 0.5;
            b = {*mn - pad, *mx + pad, bins};
        }
        auto p = bin_mass(pv, b);
        auto q = bin_mass(qv, b);
        const double norm = 1.0 + smoothing * static_cast<double>(b.bins);
        double kl = 0.0;
        for (std::size_t k = 0; k < b.bins; ++k) {
            const double pk = (p[k] + smoothing) / norm;
            const double qk = (q[k] + smoothing) / norm;
            kl += pk * std::log(pk / qk);
        }
        r.features.push_back(feat.name);
        r.kl.push_back(std::max(kl, 0.0));
    }
    r.mean = std::accumulate(r.kl.begin(), r.kl.end(), 0.0) / static_cast<double>(r.kl.size());
    return r;
}

Histogram density_export(const Dataset& data, const std::string& feature, std::size_t bins,
                         std::optional<std::pair<double, double>> range) {
    require_rows(data, "density_export");
    const auto idx = data.schema.find(feature);
    if (!idx) throw ValidationError("density_export: unknown feature '" + feature + "'");
    if (bins < 1) throw ValidationError("density_export: bins must be >= 1");
    const auto values = data.rows.column(*idx);
    Binning b;
    if (data.schema[*idx].categorical) {
        b = categorical_binning();
    } else {
        auto [lo, hi] = range.value_or(std::pair{*std::min_element(values.begin(), values.end()),
                                                 *std::max_element(values.begin(), values.end())});
        if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
            throw ValidationError("density_export: invalid range");
        }
        if (lo == hi) {
            lo -= 0.5;
            hi += 0.5;
        }
        b = {lo, hi, bins};
    }
    Histogram h;
    h.feature = feature;
    h.counts.assign(b.bins, 0);
    for (double x : values) ++h.counts[bin_of(x, b.lo, b.hi, b.bins)];
    // Edges are lo + k*width except the last, which is exactly hi.
    const double width = (b.hi - b.lo) / static_cast<double>(b.bins);
    for (std::size_t k = 0; k < b.bins; ++k) h.edges.push_back(b.lo + width * static_cast<double>(k));
    h.edges.push_back(b.hi);
    for (std::size_t c : h.counts) h.density.push_back(static_cast<double>(c) / static_cast<double>(values.size()));
    return h;
}

std::string histogram_csv(const std::vector<Histogram>& histograms) {
    std::ostringstream out;
    out << "feature,bin_lo,bin_hi,count,density\n";
    for (const auto& h : histograms)
        for (std::size_t k = 0; k < h.counts.size(); ++k) {
            out << h.feature << ',' << format_double(h.edges[k]) << ',' << format_double(h.edges[k + 1]) << ','
                << h.counts[k] << ',' << format_double(h.density[k]) << '\n';
        }
    return out.str();
}

bool spectrum_collapsed(const std::vector<double>& sigma) {
    if (sigma.empty()) return false;
    const double top = *std::max_element(sigma.begin(), sigma.end());
    const auto small = std::count_if(sigma.begin(), sigma.end(),
                                     [&](double s) { return s < kSpectralCollapseRatio * top; });
    return 2 * static_cast<std::size_t>(small) > sigma.size();
}

namespace {

Matrix subsample_scaled(const Dataset& d, const MinMaxScaler& scaler, std::size_t m, Rng& rng) {
    std::vector<std::size_t> idx(d.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(m);
    std::sort(idx.begin(), idx.end());
    Matrix rows(m, d.schema.size());
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t f = 0; f < d.schema.size(); ++f)
            rows(i, f) = scaler.transform_value(f, d.rows(idx[i], f));
    return rows;
}

double mean_nn_distance(const Matrix& x) {
    const std::size_t n = x.rows();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            double d2 = 0.0;
            for (std::size_t f = 0; f < x.cols(); ++f) {
                const double d = x(i, f) - x(j, f);
                d2 += d * d;
            }
            best = std::min(best, d2);
        }
        total += std::sqrt(best);
    }
    return total / static_cast<double>(n);
}

}  // namespace

CollapseReport mode_collapse_report(const Dataset& generated, const Dataset& training,
                                    const std::vector<std::vector<double>>& disc_spectra,
                                    const CollapseOptions& options) {
    constexpr std::size_t kMinRows = 50;
    if (generated.size() < kMinRows || training.size() < kMinRows) {
        throw ValidationError("mode_collapse_report: need at least 50 rows in each dataset");
    }
    if (!(generated.schema == training.schema)) throw ValidationError("mode_collapse_report: schemas differ");
    if (options.max_rows < 2) throw ValidationError("mode_collapse_report: max_rows must be >= 2");

    const MinMaxScaler scaler = MinMaxScaler::fit(training);
    const std::size_t m = std::min({generated.size(), training.size(), options.max_rows});
    Rng rng = make_stream(options.seed, "diversity");
    const Matrix g = subsample_scaled(generated, scaler, m, rng);
    const Matrix t = subsample_scaled(training, scaler, m, rng);
    const double dg = mean_nn_distance(g);
    const double dt = mean_nn_distance(t);

    CollapseReport r;
    r.diversity = dt > 0.0 ? dg / dt : (dg > 0.0 ? std::numeric_limits<double>::max() : 1.0);
    r.diversity_flag = r.diversity < kDiversityCollapseThreshold;
    for (std::size_t l = 0; l < disc_spectra.size(); ++l)
        if (spectrum_collapsed(disc_spectra[l])) r.collapsed_layers.push_back(l);
    r.collapse = r.diversity_flag || !r.collapsed_layers.empty();
    return r;
}

EvalReport evaluate_generated(const Dataset& generated, const Dataset& training, const Simulator& simulator,
                              const std::vector<std::vector<double>>& disc_spectra, const EvalOptions& options,
                              std::size_t epoch) {
    EvalReport r;
    r.epoch = epoch;
    if (simulator) {
        r.pct_error = avg_percentage_error(generated, simulator);
        r.mean_pct_error = r.pct_error->mean();
    }
    r.kl = kl_divergence(training, generated, options.bins, options.smoothing);
    r.collapse = mode_collapse_report(generated, training, disc_spectra, options.collapse);
    r.disc_spectra = disc_spectra;
    return r;
}

nlohmann::json to_json(const EvalReport& report) {
    nlohmann::json j;
    j["format"] = "circaug-eval-report";
    j["version"] = 1;
    j["epoch"] = report.epoch;
    if (report.pct_error) {
        nlohmann::json pct = nlohmann::json::object();
        for (std::size_t k = 0; k < report.pct_error->features.size(); ++k)
            pct[report.pct_error->features[k]] = report.pct_error->percent[k];
        j["avg_pct_error"] = pct;
        j["mean_pct_error"] = *report.mean_pct_error;
        j["rows_used"] = report.pct_error->rows_used;
        j["rows_rejected"] = report.pct_error->rejected;
    } else {
        j["avg_pct_error"] = nullptr;
        j["mean_pct_error"] = nullptr;
    }
    nlohmann::json kl = nlohmann::json::object();
    for (std::size_t k = 0; k < report.kl.features.size(); ++k) kl[report.kl.features[k]] = report.kl.kl[k];
    j["kl"] = kl;
    j["mean_kl"] = report.kl.mean;
    j["diversity"] = report.collapse.diversity;
    j["diversity_flag"] = report.collapse.diversity_flag;
    j["spectral_collapse_layers"] = report.collapse.collapsed_layers;
    j["collapse"] = report.collapse.collapse;
    j["disc_spectra"] = report.disc_spectra;
    return j;
}

}  // namespace circaug
