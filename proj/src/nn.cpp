#include "circaug/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "circaug/error.hpp"

namespace circaug {

void Activation::validate() const {
    if (kind == ActivationKind::leaky_relu && !(alpha > 0.0 && alpha < 1.0)) {
        throw ValidationError("leaky_relu alpha must lie in (0, 1)");
    }
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double Activation::apply(double x) const {
    switch (kind) {
        case ActivationKind::leaky_relu: return x >= 0.0 ? x : alpha * x;
        case ActivationKind::tanh: return std::tanh(x);
        case ActivationKind::sigmoid: return circaug::sigmoid(x);
        case ActivationKind::linear: return x;
    }
    return x;
}

double Activation::derivative(double x, double y) const {
    switch (kind) {
        case ActivationKind::leaky_relu: return x >= 0.0 ? 1.0 : alpha;
        case ActivationKind::tanh: return 1.0 - y * y;
        case ActivationKind::sigmoid: return y * (1.0 - y);
        case ActivationKind::linear: return 1.0;
    }
    return 1.0;
}

std::string to_string(ActivationKind kind) {
    switch (kind) {
        case ActivationKind::leaky_relu: return "leaky_relu";
        case ActivationKind::tanh: return "tanh";
        case ActivationKind::sigmoid: return "sigmoid";
        case ActivationKind::linear: return "linear";
    }
    return "linear";
}

ActivationKind parse_activation_kind(const std::string& text) {
    if (text == "leaky_relu") return ActivationKind::leaky_relu;
    if (text == "tanh") return ActivationKind::tanh;
    if (text == "sigmoid") return ActivationKind::sigmoid;
    if (text == "linear") return ActivationKind::linear;
    throw ValidationError("unknown activation '" + text + "'");
}

std::size_t MlpParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weights.size() + l.bias.size();
    return n;
}

void MlpParams::validate() const {
    if (layers.empty()) throw ValidationError("network has no layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& l = layers[i];
        const std::string where = "layer " + std::to_string(i);
        if (l.spec.in_dim < 1 || l.spec.out_dim < 1) throw ValidationError(where + ": dimensions must be >= 1");
        l.spec.activation.validate();
        if (l.weights.rows() != l.spec.out_dim || l.weights.cols() != l.spec.in_dim || l.bias.size() != l.spec.out_dim) {
            throw ValidationError(where + ": parameter shapes do not match its spec");
        }
        if (i > 0 && layers[i - 1].spec.out_dim != l.spec.in_dim) {
            throw ValidationError(where + ": input dim does not match previous layer output");
        }
        require_finite(l.weights, where.c_str());
        for (double b : l.bias)
            if (!std::isfinite(b)) throw ValidationError(where + ": non-finite bias");
    }
}

std::vector<LayerSpec> chain_specs(std::size_t in_dim, std::span<const std::size_t> hidden, std::size_t out_dim,
                                   Activation hidden_act, Activation out_act) {
    std::vector<LayerSpec> specs;
    std::size_t prev = in_dim;
    for (std::size_t h : hidden) {
        specs.push_back({prev, h, hidden_act});
        prev = h;
    }
    specs.push_back({prev, out_dim, out_act});
    return specs;
}

MlpParams init_mlp(std::span<const LayerSpec> specs, Rng& rng) {
    MlpParams p;
    for (const auto& s : specs) {
        if (s.in_dim < 1 || s.out_dim < 1) throw ValidationError("layer dimensions must be >= 1");
        s.activation.validate();
        const double fan_in = static_cast<double>(s.in_dim);
        const double fan_out = static_cast<double>(s.out_dim);
        double limit = 0.0;
        if (s.activation.kind == ActivationKind::leaky_relu) {
            const double a = s.activation.alpha;
            limit = std::sqrt(6.0 / ((1.0 + a * a) * fan_in));
        } else {
            limit = std::sqrt(6.0 / (fan_in + fan_out));
        }
        DenseLayer layer{Matrix(s.out_dim, s.in_dim), std::vector<double>(s.out_dim, 0.0), s};
        for (double& w : layer.weights.values()) w = uniform(rng, -limit, limit);
        p.layers.push_back(std::move(layer));
    }
    p.validate();
    return p;
}

namespace {

Matrix affine(const DenseLayer& layer, const Matrix& input) {
    Matrix pre = matmul_nt(input, layer.weights);
    for (std::size_t r = 0; r < pre.rows(); ++r) {
        auto row = pre.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) row[c] += layer.bias[c];
    }
    return pre;
}

Matrix activate(const Activation& act, const Matrix& pre) {
    Matrix post(pre.rows(), pre.cols());
    for (std::size_t i = 0; i < pre.size(); ++i) post.values()[i] = act.apply(pre.values()[i]);
    return post;
}

void require_input_width(const MlpParams& params, const Matrix& batch) {
    if (params.layers.empty()) throw ValidationError("forward: network has no layers");
    if (batch.cols() != params.in_dim()) {
        throw ValidationError("forward: batch has " + std::to_string(batch.cols()) + " columns, network expects " +
                              std::to_string(params.in_dim()));
    }
}

}  // namespace

ForwardPass forward(const MlpParams& params, const Matrix& batch) {
    require_input_width(params, batch);
    ForwardPass fp;
    fp.cache.reserve(params.layers.size());
    Matrix x = batch;
    for (const auto& layer : params.layers) {
        Matrix pre = affine(layer, x);
        Matrix post = activate(layer.spec.activation, pre);
        fp.cache.push_back({std::move(x), std::move(pre), post});
        x = std::move(post);
    }
    fp.output = std::move(x);
    return fp;
}

Matrix infer(const MlpParams& params, const Matrix& batch) {
    require_input_width(params, batch);
    Matrix x = batch;
    for (const auto& layer : params.layers) x = activate(layer.spec.activation, affine(layer, x));
    return x;
}

Gradients Gradients::zeros_like(const MlpParams& params) {
    Gradients g;
    for (const auto& l : params.layers)
        g.layers.push_back({Matrix(l.weights.rows(), l.weights.cols()), std::vector<double>(l.bias.size(), 0.0)});
    return g;
}

Gradients backward(const MlpParams& params, std::span<const LayerCache> cache, const Matrix& grad_output) {
    if (cache.size() != params.layers.size()) throw ValidationError("backward: cache does not match network depth");
    for (std::size_t i = 0; i < cache.size(); ++i) {
        const auto& l = params.layers[i];
        if (cache[i].input.cols() != l.spec.in_dim || cache[i].pre.cols() != l.spec.out_dim ||
            cache[i].post.rows() != cache[i].input.rows()) {
            throw ValidationError("backward: cache of layer " + std::to_string(i) + " does not match the network");
        }
    }
    if (grad_output.rows() != cache.back().post.rows() || grad_output.cols() != cache.back().post.cols()) {
        throw ValidationError("backward: grad_output shape does not match the forward output");
    }

    Gradients g;
    g.layers.resize(params.layers.size());
    Matrix upstream = grad_output;
    for (std::size_t i = params.layers.size(); i-- > 0;) {
        const auto& layer = params.layers[i];
        const auto& c = cache[i];
        Matrix delta(upstream.rows(), upstream.cols());
        for (std::size_t k = 0; k < delta.size(); ++k) {
            delta.values()[k] = upstream.values()[k] * layer.spec.activation.derivative(c.pre.values()[k], c.post.values()[k]);
        }
        g.layers[i].weights = matmul_tn(delta, c.input);
        g.layers[i].bias.assign(delta.cols(), 0.0);
        for (std::size_t r = 0; r < delta.rows(); ++r) {
            auto row = delta.row(r);
            for (std::size_t j = 0; j < row.size(); ++j) g.layers[i].bias[j] += row[j];
        }
        upstream = matmul(delta, layer.weights);
    }
    g.input = std::move(upstream);
    return g;
}

BceResult bce_with_logits(std::span<const double> logits, std::span<const double> labels) {
    if (logits.size() != labels.size()) throw ValidationError("bce: logits and labels differ in length");
    if (logits.empty()) throw ValidationError("bce: empty batch");
    BceResult out;
    out.grad.resize(logits.size());
    const double inv_n = 1.0 / static_cast<double>(logits.size());
    double total = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        const double x = logits[i];
        const double y = labels[i];
        if (y != 0.0 && y != 1.0) throw ValidationError("bce: labels must be 0 or 1");
        total += std::max(x, 0.0) - x * y + std::log1p(std::exp(-std::abs(x)));
        out.grad[i] = (sigmoid(x) - y) * inv_n;
    }
    out.loss = total * inv_n;
    return out;
}

AdamState AdamState::for_params(const MlpParams& params, double lr, double beta1, double beta2, double eps) {
    if (!(lr >= 0.0) || !(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) || !(eps > 0.0)) {
        throw ValidationError("adam: invalid hyperparameters");
    }
    AdamState s;
    s.m = Gradients::zeros_like(params).layers;
    s.v = Gradients::zeros_like(params).layers;
    s.lr = lr;
    s.beta1 = beta1;
    s.beta2 = beta2;
    s.eps = eps;
    return s;
}

namespace {

void adam_entries(std::span<double> param, std::span<const double> grad, std::span<double> m, std::span<double> v,
                  const AdamState& s, double c1, double c2) {
    for (std::size_t k = 0; k < param.size(); ++k) {
        const double g = grad[k];
        if (g == 0.0) continue;
        m[k] = s.beta1 * m[k] + (1.0 - s.beta1) * g;
        v[k] = s.beta2 * v[k] + (1.0 - s.beta2) * g * g;
        const double m_hat = m[k] / c1;
        const double v_hat = v[k] / c2;
        param[k] -= s.lr * m_hat / (std::sqrt(v_hat) + s.eps);
    }
}

}  // namespace

void adam_update(MlpParams& params, const Gradients& grads, AdamState& state) {
    if (grads.layers.size() != params.layers.size() || state.m.size() != params.layers.size() ||
        state.v.size() != params.layers.size()) {
        throw ValidationError("adam: gradient/state depth does not match network");
    }
    state.t += 1;
    const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.layers.size(); ++i) {
        auto& layer = params.layers[i];
        const auto& g = grads.layers[i];
        if (g.weights.rows() != layer.weights.rows() || g.weights.cols() != layer.weights.cols() ||
            g.bias.size() != layer.bias.size() || state.m[i].weights.size() != layer.weights.size()) {
            throw ValidationError("adam: shape mismatch at layer " + std::to_string(i));
        }
        adam_entries(layer.weights.values(), g.weights.values(), state.m[i].weights.values(), state.v[i].weights.values(),
                     state, c1, c2);
        adam_entries(layer.bias, g.bias, state.m[i].bias, state.v[i].bias, state, c1, c2);
    }
}

// --- regressor -------------------------------------------------------------

RegressionMetrics regression_metrics(std::span<const double> truth, std::span<const double> predicted) {
    if (truth.size() != predicted.size() || truth.empty()) {
        throw ValidationError("regression_metrics: need equal, non-empty vectors");
    }
    const double n = static_cast<double>(truth.size());
    double se = 0.0;
    double ae = 0.0;
    double pct = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double d = predicted[i] - truth[i];
        se += d * d;
        ae += std::abs(d);
        pct += 100.0 * std::abs(d) / std::max(std::abs(truth[i]), 1e-12);
    }
    const double mean = std::accumulate(truth.begin(), truth.end(), 0.0) / n;
    double ss_tot = 0.0;
    for (double t : truth) ss_tot += (t - mean) * (t - mean);

    RegressionMetrics m;
    m.mse = se / n;
    m.rmse = std::sqrt(m.mse);
    m.mae = ae / n;
    m.mean_pct_error = pct / n;
    if (ss_tot > 0.0) {
        m.r2 = 1.0 - se / ss_tot;
    } else {
        m.degenerate = true;
    }
    return m;
}

namespace {

Matrix gather_columns(const Matrix& m, std::span<const std::size_t> cols) {
    Matrix out(m.rows(), cols.size());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t j = 0; j < cols.size(); ++j) out(r, j) = m(r, cols[j]);
    return out;
}

std::vector<bool> gather_mask(const std::vector<bool>& mask, std::span<const std::size_t> cols) {
    std::vector<bool> out;
    for (std::size_t c : cols) out.push_back(mask[c]);
    return out;
}

}  // namespace

MlpRegressor fit_mlp_regressor(const Dataset& data, const RegressorConfig& config) {
    if (data.empty()) throw ValidationError("regressor: empty dataset");
    if (data.size() < 2) throw ValidationError("regressor: need at least 2 rows");
    if (config.batch_size < 1 || !(config.lr > 0.0)) throw ValidationError("regressor: invalid training config");

    MlpRegressor model;
    model.schema = data.schema;
    model.input_columns = data.schema.input_indices();
    if (config.targets.empty()) {
        model.target_columns = data.schema.output_indices();
    } else {
        for (const auto& name : config.targets) {
            const std::size_t idx = data.schema.index_of(name);
            if (data.schema[idx].role != FeatureRole::simulator_output) {
                throw ValidationError("regressor: target '" + name + "' is not a simulator_output feature");
            }
            model.target_columns.push_back(idx);
        }
    }

    auto [train, test] = split(data, config.test_fraction, config.seed);
    const auto mask = data.schema.categorical_mask();
    const Matrix x_train = gather_columns(train.rows, model.input_columns);
    const Matrix y_train = gather_columns(train.rows, model.target_columns);
    model.input_scaler = MinMaxScaler::fit(x_train, gather_mask(mask, model.input_columns));
    model.target_scaler = MinMaxScaler::fit(y_train, std::vector<bool>(model.target_columns.size(), false));
    const Matrix xs = model.input_scaler.transform(x_train);
    const Matrix ys = model.target_scaler.transform(y_train);

    Rng init_rng = make_stream(config.seed, "init");
    const auto specs = chain_specs(model.input_columns.size(), config.hidden, model.target_columns.size(),
                                   config.hidden_activation, Activation::linear());
    model.params = init_mlp(specs, init_rng);
    AdamState adam = AdamState::for_params(model.params, config.lr);

    Rng shuffle_rng = make_stream(config.seed, "shuffle");
    std::vector<std::size_t> order(xs.rows());
    std::iota(order.begin(), order.end(), 0);
    const std::size_t batch = std::min(config.batch_size, xs.rows());
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t end = std::min(order.size(), start + batch);
            Matrix xb(end - start, xs.cols());
            Matrix yb(end - start, ys.cols());
            for (std::size_t i = start; i < end; ++i) {
                std::copy_n(xs.row(order[i]).begin(), xs.cols(), xb.row(i - start).begin());
                std::copy_n(ys.row(order[i]).begin(), ys.cols(), yb.row(i - start).begin());
            }
            ForwardPass fp = forward(model.params, xb);
            Matrix grad = fp.output - yb;
            grad *= 2.0 / static_cast<double>(grad.size());
            adam_update(model.params, backward(model.params, fp.cache, grad), adam);
        }
    }
    model.params.validate();

    const Matrix y_test = gather_columns(test.rows, model.target_columns);
    const Matrix pred = predict(model, test.rows);
    RegressionMetrics agg;
    double r2_sum = 0.0;
    bool any_degenerate = false;
    for (std::size_t t = 0; t < model.target_columns.size(); ++t) {
        const auto truth = y_test.column(t);
        const auto p = pred.column(t);
        const RegressionMetrics m = regression_metrics(truth, p);
        agg.mse += m.mse;
        agg.mae += m.mae;
        agg.mean_pct_error += m.mean_pct_error;
        if (m.r2) r2_sum += *m.r2;
        any_degenerate |= m.degenerate || model.target_scaler.degenerate(t);
    }
    const double k = static_cast<double>(model.target_columns.size());
    agg.mse /= k;
    agg.mae /= k;
    agg.mean_pct_error /= k;
    agg.rmse = std::sqrt(agg.mse);
    agg.degenerate = any_degenerate;
    if (!any_degenerate) agg.r2 = r2_sum / k;
    model.metrics = agg;
    return model;
}

Matrix predict(const MlpRegressor& model, const Matrix& rows) {
    Matrix x;
    if (rows.cols() == model.schema.size()) {
        x = gather_columns(rows, model.input_columns);
    } else if (rows.cols() == model.input_columns.size()) {
        x = rows;
    } else {
        throw ValidationError("predict: rows have " + std::to_string(rows.cols()) + " columns; expected " +
                              std::to_string(model.schema.size()) + " or " + std::to_string(model.input_columns.size()));
    }
    require_finite(x, "predict input");
    const Matrix out = model.target_scaler.inverse_transform(infer(model.params, model.input_scaler.transform(x)));
    return out;
}

// --- checkpoints -------------------------------------------------------------

nlohmann::json to_json(const MlpParams& params) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : params.layers) {
        layers.push_back({{"in_dim", l.spec.in_dim},
                          {"out_dim", l.spec.out_dim},
                          {"activation", to_string(l.spec.activation.kind)},
                          {"alpha", l.spec.activation.alpha},
                          {"weights", l.weights.storage()},
                          {"bias", l.bias}});
    }
    return {{"format", "circaug-mlp"}, {"version", kMlpFormatVersion}, {"layers", layers}};
}

MlpParams mlp_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "circaug-mlp") throw ValidationError("checkpoint: not an MLP document");
    if (j.value("version", 0) != kMlpFormatVersion) throw ValidationError("checkpoint: unsupported MLP format version");
    MlpParams p;
    for (const auto& l : j.at("layers")) {
        LayerSpec spec{l.at("in_dim").get<std::size_t>(), l.at("out_dim").get<std::size_t>(),
                       Activation{parse_activation_kind(l.at("activation").get<std::string>()), l.at("alpha").get<double>()}};
        DenseLayer layer{Matrix(spec.out_dim, spec.in_dim, l.at("weights").get<std::vector<double>>()),
                         l.at("bias").get<std::vector<double>>(), spec};
        p.layers.push_back(std::move(layer));
    }
    p.validate();
    return p;
}

nlohmann::json to_json(const MinMaxScaler& scaler) {
    return {{"min", scaler.min()}, {"max", scaler.max()}, {"categorical", scaler.categorical()}};
}

MinMaxScaler scaler_from_json(const nlohmann::json& j) {
    return MinMaxScaler::from_bounds(j.at("min").get<std::vector<double>>(), j.at("max").get<std::vector<double>>(),
                                     j.at("categorical").get<std::vector<bool>>());
}

nlohmann::json to_json(const FeatureSchema& schema) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& f : schema.features()) {
        out.push_back({{"name", f.name}, {"role", to_string(f.role)}, {"unit", f.unit}, {"categorical", f.categorical}});
    }
    return out;
}

FeatureSchema schema_from_json(const nlohmann::json& j) {
    std::vector<Feature> features;
    for (const auto& f : j) {
        features.push_back({f.at("name").get<std::string>(), parse_feature_role(f.at("role").get<std::string>()),
                            f.value("unit", ""), f.value("categorical", false)});
    }
    return FeatureSchema(std::move(features));
}

nlohmann::json to_json(const MlpRegressor& model) {
    nlohmann::json metrics = {{"mse", model.metrics.mse},
                              {"rmse", model.metrics.rmse},
                              {"mae", model.metrics.mae},
                              {"mean_pct_error", model.metrics.mean_pct_error},
                              {"degenerate", model.metrics.degenerate}};
    metrics["r2"] = model.metrics.r2 ? nlohmann::json(*model.metrics.r2) : nlohmann::json(nullptr);
    return {{"format", "circaug-regressor"},
            {"version", kMlpFormatVersion},
            {"network", to_json(model.params)},
            {"schema", to_json(model.schema)},
            {"input_columns", model.input_columns},
            {"target_columns", model.target_columns},
            {"input_scaler", to_json(model.input_scaler)},
            {"target_scaler", to_json(model.target_scaler)},
            {"metrics", metrics}};
}

MlpRegressor regressor_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "circaug-regressor") throw ValidationError("checkpoint: not a regressor document");
    if (j.value("version", 0) != kMlpFormatVersion) throw ValidationError("checkpoint: unsupported regressor version");
    MlpRegressor m;
    m.params = mlp_from_json(j.at("network"));
    m.schema = schema_from_json(j.at("schema"));
    m.input_columns = j.at("input_columns").get<std::vector<std::size_t>>();
    m.target_columns = j.at("target_columns").get<std::vector<std::size_t>>();
    m.input_scaler = scaler_from_json(j.at("input_scaler"));
    m.target_scaler = scaler_from_json(j.at("target_scaler"));
    const auto& mj = j.at("metrics");
    m.metrics.mse = mj.at("mse").get<double>();
    m.metrics.rmse = mj.at("rmse").get<double>();
    m.metrics.mae = mj.at("mae").get<double>();
    m.metrics.mean_pct_error = mj.at("mean_pct_error").get<double>();
    m.metrics.degenerate = mj.at("degenerate").get<bool>();
    if (!mj.at("r2").is_null()) m.metrics.r2 = mj.at("r2").get<double>();
    return m;
}

}  // namespace circaug
