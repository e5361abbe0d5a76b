#include "circaug/gan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "circaug/error.hpp"
#include "circaug/log.hpp"

namespace circaug {

namespace {

constexpr double kSigmaFloor = 1e-12;
constexpr std::size_t kMaxHiddenLayers = 8;

}  // namespace

// --- configuration -----------------------------------------------------------

void RegularizerMode::validate() const {
    if (kind == RegularizerKind::spectral_reg && !(i_fraction > 0.0 && i_fraction <= 1.0)) {
        throw ValidationError("spectral_reg: i_fraction must lie in (0, 1]");
    }
}

std::size_t RegularizerMode::top_count(std::size_t rank) const {
    const auto i = static_cast<std::size_t>(std::llround(i_fraction * static_cast<double>(rank)));
    return std::clamp<std::size_t>(i, 1, std::max<std::size_t>(rank, 1));
}

std::string to_string(const RegularizerMode& mode) {
    switch (mode.kind) {
        case RegularizerKind::none: return "none";
        case RegularizerKind::spectral_norm: return "spectral_norm";
        case RegularizerKind::spectral_reg:
            return mode.i_fraction == 0.5 ? "spectral_reg" : "spectral_reg:" + format_double(mode.i_fraction);
    }
    return "none";
}

RegularizerMode parse_regularizer(const std::string& text) {
    if (text == "none") return RegularizerMode::none();
    if (text == "spectral_norm") return RegularizerMode::spectral_norm();
    if (text == "spectral_reg") return RegularizerMode::spectral_reg();
    const std::string prefix = "spectral_reg:";
    if (text.rfind(prefix, 0) == 0) {
        std::size_t used = 0;
        double f = 0.0;
        try {
            f = std::stod(text.substr(prefix.size()), &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != text.size() - prefix.size()) {
            throw ValidationError("regularizer: bad fraction in '" + text + "'");
        }
        RegularizerMode m = RegularizerMode::spectral_reg(f);
        m.validate();
        return m;
    }
    throw ValidationError("unknown regularizer '" + text + "'");
}

void GanConfig::validate() const {
    auto check_hidden = [](const std::vector<std::size_t>& h, const char* what) {
        if (h.empty() || h.size() > kMaxHiddenLayers) {
            throw ValidationError(std::string("gan config: ") + what + " must list 1 to 8 widths");
        }
        if (std::find(h.begin(), h.end(), 0U) != h.end()) {
            throw ValidationError(std::string("gan config: ") + what + " widths must be >= 1");
        }
    };
    check_hidden(gen_hidden, "gen_hidden");
    check_hidden(disc_hidden, "disc_hidden");
    if (!(lr > 0.0) || !std::isfinite(lr)) throw ValidationError("gan config: lr must be positive");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
        throw ValidationError("gan config: Adam betas must lie in [0, 1)");
    }
    if (batch_size < 2) throw ValidationError("gan config: batch_size must be >= 2");
    if (disc_steps_per_gen_step < 1) throw ValidationError("gan config: disc_steps_per_gen_step must be >= 1");
    if (eval_every < 1) throw ValidationError("gan config: eval_every must be >= 1");
    if (!(leaky_alpha > 0.0 && leaky_alpha < 1.0)) throw ValidationError("gan config: leaky_alpha must lie in (0, 1)");
    regularizer.validate();
}

std::size_t GanConfig::resolved_latent_dim(std::size_t data_dim) const {
    return latent_dim != 0 ? latent_dim : std::max<std::size_t>(8, data_dim);
}

// --- weight conditioning -------------------------------------------------------

SpectralNormResult apply_spectral_normalization(const Matrix& w, const PowerIterState& state, std::size_t iters) {
    require_finite(w, "spectral normalization input");
    SpectralNormEstimate est = spectral_norm(w, state, iters);
    SpectralNormResult r{w, est.sigma, std::move(est.state)};
    if (est.sigma >= kSigmaFloor) r.w *= 1.0 / est.sigma;
    return r;
}

Matrix apply_spectral_regularization(const Matrix& w, const SvdResult& s, std::size_t i) {
    const std::size_t r = s.sigma.size();
    if (i < 1 || i > r) {
        throw ValidationError("spectral regularization: i must lie in [1, " + std::to_string(r) + "]");
    }
    const double top = s.sigma.front();
    if (!(top > 0.0)) return w;
    // W' = W + U ΔD Vᵀ, where ΔD lifts the first i values to sigma_1.
    Matrix out = w;
    for (std::size_t j = 1; j < i; ++j) {
        const double lift = top - s.sigma[j];
        if (lift == 0.0) continue;
        for (std::size_t a = 0; a < out.rows(); ++a) {
            const double ua = lift * s.u(a, j);
            auto row = out.row(a);
            for (std::size_t b = 0; b < out.cols(); ++b) row[b] += ua * s.v(b, j);
        }
    }
    out *= 1.0 / top;
    return out;
}

Matrix apply_spectral_regularization(const Matrix& w, std::size_t i) {
    require_finite(w, "spectral regularization input");
    return apply_spectral_regularization(w, svd(w), i);
}

namespace {

struct Conditioned {
    MlpParams params;
    std::vector<double> scale;  // raw = effective * scale, per layer
};

Conditioned condition(const MlpParams& disc, const RegularizerMode& mode, std::vector<PowerIterState>& states,
                      std::vector<std::optional<SvdResult>>& svd_cache) {
    Conditioned c{disc, std::vector<double>(disc.layers.size(), 1.0)};
    if (mode.kind == RegularizerKind::none) return c;
    for (std::size_t l = 0; l < disc.layers.size(); ++l) {
        const Matrix& w = disc.layers[l].weights;
        Matrix& eff = c.params.layers[l].weights;
        if (mode.kind == RegularizerKind::spectral_norm) {
            SpectralNormResult sn = apply_spectral_normalization(w, states[l], 1);
            states[l] = std::move(sn.state);
            eff = std::move(sn.w);
            if (sn.sigma >= kSigmaFloor) c.scale[l] = sn.sigma;
        } else {
            SvdResult s = svd_cache[l] ? svd(w, *svd_cache[l]) : svd(w);
            eff = apply_spectral_regularization(w, s, mode.top_count(s.sigma.size()));
            if (s.sigma.front() > 0.0) c.scale[l] = s.sigma.front();
            svd_cache[l] = std::move(s);
        }
    }
    return c;
}

Matrix latent_batch(std::size_t n, std::size_t dim, Rng& rng) { return Matrix::random_normal(n, dim, rng); }

void add_scaled(Gradients& into, const Gradients& from, double s) {
    for (std::size_t l = 0; l < into.layers.size(); ++l) {
        auto dst = into.layers[l].weights.values();
        auto src = from.layers[l].weights.values();
        for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += s * src[k];
        for (std::size_t k = 0; k < into.layers[l].bias.size(); ++k) into.layers[l].bias[k] += s * from.layers[l].bias[k];
    }
}

void require_finite_loss(double loss, const GanModel& model, const char* what) {
    if (!std::isfinite(loss)) {
        throw TrainingError(model.epochs_completed + 1, model.steps_completed, std::string(what) + " is not finite");
    }
}

}  // namespace

MlpParams GanModel::effective_discriminator() {
    return condition(disc, config.regularizer, disc_power_states, disc_svd_cache).params;
}

std::vector<std::vector<double>> GanModel::disc_spectra() const {
    auto states = disc_power_states;
    auto cache = disc_svd_cache;
    const MlpParams eff = condition(disc, config.regularizer, states, cache).params;
    std::vector<std::vector<double>> out;
    for (const auto& layer : eff.layers) out.push_back(svd(layer.weights).sigma);
    return out;
}

// --- construction and training -------------------------------------------------

GanModel build(const GanConfig& config, std::size_t data_dim) {
    config.validate();
    if (data_dim < 1) throw ValidationError("gan build: data_dim must be >= 1");
    GanModel m;
    m.config = config;
    m.data_dim = data_dim;
    const std::size_t latent = config.resolved_latent_dim(data_dim);
    const Activation hidden = Activation::leaky_relu(config.leaky_alpha);

    Rng init = make_stream(config.seed, "init");
    m.gen = init_mlp(chain_specs(latent, config.gen_hidden, data_dim, hidden, Activation::tanh()), init);
    m.disc = init_mlp(chain_specs(data_dim, config.disc_hidden, 1, hidden, Activation::linear()), init);

    Rng power = make_stream(config.seed, "power");
    for (const auto& layer : m.disc.layers) m.disc_power_states.push_back(PowerIterState::random(layer.spec.out_dim, power));
    m.disc_svd_cache.resize(m.disc.layers.size());

    m.gen_adam = AdamState::for_params(m.gen, config.lr, config.beta1, config.beta2);
    m.disc_adam = AdamState::for_params(m.disc, config.lr, config.beta1, config.beta2);
    m.shuffle_rng = make_stream(config.seed, "shuffle");
    m.latent_rng = make_stream(config.seed, "latent");
    return m;
}

StepLosses train_step(GanModel& model, const Matrix& real_batch, Rng& rng) {
    const std::size_t n = real_batch.rows();
    if (n < 2) throw ValidationError("train_step: batch needs at least 2 rows");
    if (real_batch.cols() != model.data_dim) throw ValidationError("train_step: batch width differs from data_dim");
    const std::size_t latent = model.gen.in_dim();
    const std::vector<double> ones(n, 1.0);
    const std::vector<double> zeros(n, 0.0);
    StepLosses out;

    for (std::size_t k = 0; k < model.config.disc_steps_per_gen_step; ++k) {
        Conditioned eff = condition(model.disc, model.config.regularizer, model.disc_power_states, model.disc_svd_cache);
        const Matrix fake = infer(model.gen, latent_batch(n, latent, rng));
        const ForwardPass on_real = forward(eff.params, real_batch);
        const ForwardPass on_fake = forward(eff.params, fake);
        const BceResult real_loss = bce_with_logits(on_real.output.values(), ones);
        const BceResult fake_loss = bce_with_logits(on_fake.output.values(), zeros);
        out.d_loss = 0.5 * (real_loss.loss + fake_loss.loss);
        require_finite_loss(out.d_loss, model, "discriminator loss");

        Gradients grads = backward(eff.params, on_real.cache, Matrix(n, 1, real_loss.grad));
        add_scaled(grads, backward(eff.params, on_fake.cache, Matrix(n, 1, fake_loss.grad)), 1.0);
        for (std::size_t l = 0; l < grads.layers.size(); ++l) {
            // Half for the two-term mean; the conditioning scale is detached.
            grads.layers[l].weights *= 0.5 / eff.scale[l];
            for (double& b : grads.layers[l].bias) b *= 0.5;
        }
        adam_update(model.disc, grads, model.disc_adam);
    }

    Conditioned eff = condition(model.disc, model.config.regularizer, model.disc_power_states, model.disc_svd_cache);
    const ForwardPass gen_pass = forward(model.gen, latent_batch(n, latent, rng));
    const ForwardPass disc_pass = forward(eff.params, gen_pass.output);
    std::vector<double> grad_logit;
    if (model.config.gen_loss == GeneratorLoss::non_saturating) {
        BceResult b = bce_with_logits(disc_pass.output.values(), ones);
        out.g_loss = b.loss;
        grad_logit = std::move(b.grad);
    } else {
        BceResult b = bce_with_logits(disc_pass.output.values(), zeros);
        out.g_loss = -b.loss;
        grad_logit = std::move(b.grad);
        for (double& g : grad_logit) g = -g;
    }
    require_finite_loss(out.g_loss, model, "generator loss");
    const Gradients through_disc = backward(eff.params, disc_pass.cache, Matrix(n, 1, std::move(grad_logit)));
    const Gradients gen_grads = backward(model.gen, gen_pass.cache, through_disc.input);
    adam_update(model.gen, gen_grads, model.gen_adam);
    ++model.steps_completed;
    return out;
}

double selection_score(const EvalReport& report) {
    return report.mean_pct_error ? *report.mean_pct_error : report.kl.mean;
}

TrainResult train(GanModel model, const Dataset& data, const GanEvaluator& evaluator) {
    if (data.empty()) throw ValidationError("train: empty dataset");
    if (data.schema.size() != model.data_dim) throw ValidationError("train: dataset width differs from the model");
    if (!model.scaler.fitted()) {
        model.scaler = MinMaxScaler::fit(data);
        model.schema = data.schema;
    }
    const std::size_t epochs = model.config.epochs;
    if (epochs == 0) return {model, model, {}, model.epochs_completed};
    if (data.size() < 2) throw ValidationError("train: need at least 2 rows");

    const Matrix scaled = model.scaler.transform(data.rows);
    const std::size_t n = scaled.rows();
    const std::size_t batch = std::min(model.config.batch_size, n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    TrainResult result{model, model, {}, model.epochs_completed};
    double best_score = std::numeric_limits<double>::infinity();
    const std::size_t first = model.epochs_completed + 1;
    const std::size_t last = model.epochs_completed + epochs;
    for (std::size_t epoch = first; epoch <= last; ++epoch) {
        std::shuffle(order.begin(), order.end(), model.shuffle_rng);
        double d_sum = 0.0;
        double g_sum = 0.0;
        std::size_t steps = 0;
        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t rows = std::min(batch, n - start);
            if (rows < 2) break;
            Matrix b(rows, scaled.cols());
            for (std::size_t r = 0; r < rows; ++r) std::ranges::copy(scaled.row(order[start + r]), b.row(r).begin());
            const StepLosses s = train_step(model, b, model.latent_rng);
            d_sum += s.d_loss;
            g_sum += s.g_loss;
            ++steps;
        }
        model.epochs_completed = epoch;
        if (epoch % model.config.eval_every != 0 && epoch != last) continue;

        TrainLogEntry entry;
        entry.epoch = epoch;
        entry.d_loss = d_sum / static_cast<double>(steps);
        entry.g_loss = g_sum / static_cast<double>(steps);
        if (evaluator) {
            try {
                entry.report = evaluator(model, epoch);
            } catch (const std::exception& e) {
                throw TrainingError(epoch, model.steps_completed, std::string("evaluator failed: ") + e.what());
            }
        } else {
            entry.report.epoch = epoch;
            entry.report.disc_spectra = model.disc_spectra();
        }
        model.log.entries.push_back(entry);
        result.log.entries.push_back(entry);
        log_info("epoch " + std::to_string(epoch) + " d_loss " + format_double(entry.d_loss) + " g_loss " +
                 format_double(entry.g_loss) +
                 (evaluator ? " score " + format_double(selection_score(entry.report)) : std::string{}));
        if (evaluator) {
            const double score = selection_score(entry.report);
            if (score < best_score) {
                best_score = score;
                result.best = model;
                result.best_epoch = epoch;
            }
        }
    }
    if (!evaluator) {
        result.best = model;
        result.best_epoch = model.epochs_completed;
    }
    result.final = std::move(model);
    return result;
}

Matrix sample_scaled(const GanModel& model, std::size_t n, Rng& rng) {
    if (n < 1) throw ValidationError("sample: n must be >= 1");
    return infer(model.gen, latent_batch(n, model.gen.in_dim(), rng));
}

Dataset sample(const GanModel& model, std::size_t n, Rng& rng) {
    if (!model.scaler.fitted()) throw ValidationError("sample: model has no fitted scaler; train it first");
    return Dataset(model.schema, model.scaler.inverse_transform(sample_scaled(model, n, rng)));
}

// --- serialization -------------------------------------------------------------

nlohmann::json to_json(const GanConfig& c) {
    return {{"latent_dim", c.latent_dim},
            {"gen_hidden", c.gen_hidden},
            {"disc_hidden", c.disc_hidden},
            {"lr", c.lr},
            {"beta1", c.beta1},
            {"beta2", c.beta2},
            {"batch_size", c.batch_size},
            {"epochs", c.epochs},
            {"disc_steps_per_gen_step", c.disc_steps_per_gen_step},
            {"regularizer", to_string(c.regularizer)},
            {"gen_loss", c.gen_loss == GeneratorLoss::minimax ? "minimax" : "non_saturating"},
            {"leaky_alpha", c.leaky_alpha},
            {"seed", c.seed},
            {"eval_every", c.eval_every}};
}

GanConfig gan_config_from_json(const nlohmann::json& j) {
    GanConfig c;
    c.latent_dim = j.value("latent_dim", c.latent_dim);
    c.gen_hidden = j.value("gen_hidden", c.gen_hidden);
    c.disc_hidden = j.value("disc_hidden", c.disc_hidden);
    c.lr = j.value("lr", c.lr);
    c.beta1 = j.value("beta1", c.beta1);
    c.beta2 = j.value("beta2", c.beta2);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.epochs = j.value("epochs", c.epochs);
    c.disc_steps_per_gen_step = j.value("disc_steps_per_gen_step", c.disc_steps_per_gen_step);
    c.regularizer = parse_regularizer(j.value("regularizer", std::string("spectral_reg")));
    const std::string loss = j.value("gen_loss", std::string("non_saturating"));
    if (loss != "non_saturating" && loss != "minimax") throw ValidationError("gan config: unknown gen_loss '" + loss + "'");
    c.gen_loss = loss == "minimax" ? GeneratorLoss::minimax : GeneratorLoss::non_saturating;
    c.leaky_alpha = j.value("leaky_alpha", c.leaky_alpha);
    c.seed = j.value("seed", c.seed);
    c.eval_every = j.value("eval_every", c.eval_every);
    c.validate();
    return c;
}

nlohmann::json to_json(const GanModel& m) {
    nlohmann::json j{{"format", "circaug-gan"},
                     {"version", kGanFormatVersion},
                     {"config", to_json(m.config)},
                     {"data_dim", m.data_dim},
                     {"latent_dim", m.gen.in_dim()},
                     {"regularizer", to_string(m.config.regularizer)},
                     {"generator", to_json(m.gen)},
                     {"discriminator", to_json(m.disc)},
                     {"epochs_completed", m.epochs_completed},
                     {"steps_completed", m.steps_completed}};
    nlohmann::json power = nlohmann::json::array();
    for (const auto& s : m.disc_power_states) power.push_back(s.u);
    j["power_iteration"] = power;
    if (m.scaler.fitted()) {
        j["schema"] = to_json(m.schema);
        j["scaler"] = to_json(m.scaler);
    }
    return j;
}

GanModel gan_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "circaug-gan") throw ValidationError("checkpoint: not a GAN document");
    if (j.value("version", 0) != kGanFormatVersion) throw ValidationError("checkpoint: unsupported GAN format version");
    GanModel m = build(gan_config_from_json(j.at("config")), j.at("data_dim").get<std::size_t>());
    MlpParams gen = mlp_from_json(j.at("generator"));
    MlpParams disc = mlp_from_json(j.at("discriminator"));
    auto same_shape = [](const MlpParams& a, const MlpParams& b) {
        if (a.layers.size() != b.layers.size()) return false;
        for (std::size_t l = 0; l < a.layers.size(); ++l)
            if (!(a.layers[l].spec == b.layers[l].spec)) return false;
        return true;
    };
    if (!same_shape(gen, m.gen) || !same_shape(disc, m.disc)) {
        throw ValidationError("checkpoint: network shapes disagree with the stored config");
    }
    m.gen = std::move(gen);
    m.disc = std::move(disc);
    const auto& power = j.at("power_iteration");
    if (power.size() != m.disc.layers.size()) throw ValidationError("checkpoint: power-iteration state count mismatch");
    for (std::size_t l = 0; l < power.size(); ++l) {
        m.disc_power_states[l].u = power[l].get<std::vector<double>>();
        if (m.disc_power_states[l].u.size() != m.disc.layers[l].spec.out_dim) {
            throw ValidationError("checkpoint: power-iteration state length mismatch");
        }
    }
    m.epochs_completed = j.value("epochs_completed", std::size_t{0});
    m.steps_completed = j.value("steps_completed", std::size_t{0});
    if (j.contains("scaler")) {
        m.schema = schema_from_json(j.at("schema"));
        m.scaler = scaler_from_json(j.at("scaler"));
        if (m.schema.size() != m.data_dim || m.scaler.dims() != m.data_dim) {
            throw ValidationError("checkpoint: schema width differs from data_dim");
        }
    }
    return m;
}

std::string train_log_csv(const TrainLog& log) {
    std::vector<std::string> outputs;
    for (const auto& e : log.entries)
        if (e.report.pct_error) {
            outputs = e.report.pct_error->features;
            break;
        }
    std::ostringstream out;
    out << "epoch,d_loss,g_loss,mean_pct_error,mean_kl,diversity,collapse";
    for (const auto& name : outputs) out << ",pct_" << name;
    out << '\n';
    for (const auto& e : log.entries) {
        const EvalReport& r = e.report;
        out << e.epoch << ',' << format_double(e.d_loss) << ',' << format_double(e.g_loss) << ','
            << (r.mean_pct_error ? format_double(*r.mean_pct_error) : std::string{}) << ','
            << (r.kl.features.empty() ? std::string{} : format_double(r.kl.mean)) << ','
            << (r.kl.features.empty() ? std::string{} : format_double(r.collapse.diversity)) << ','
            << (r.collapse.collapse ? 1 : 0);
        for (std::size_t k = 0; k < outputs.size(); ++k)
            out << ',' << (r.pct_error && k < r.pct_error->percent.size() ? format_double(r.pct_error->percent[k]) : "");
        out << '\n';
    }
    return out.str();
}

std::string spectra_csv(const TrainLog& log) {
    std::ostringstream out;
    out << "epoch,layer,index,sigma\n";
    for (const auto& e : log.entries)
        for (std::size_t l = 0; l < e.report.disc_spectra.size(); ++l)
            for (std::size_t k = 0; k < e.report.disc_spectra[l].size(); ++k)
                out << e.epoch << ',' << l << ',' << k << ',' << format_double(e.report.disc_spectra[l][k]) << '\n';
    return out.str();
}

}  // namespace circaug
