#include "circaug/boost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "circaug/error.hpp"

namespace circaug {

void GbrtConfig::validate() const {
    if (n_trees < 1) throw ValidationError("gbrt: n_trees must be >= 1");
    if (max_depth < 1 || max_depth > 12) throw ValidationError("gbrt: max_depth must lie in [1, 12]");
    if (min_samples_leaf < 1) throw ValidationError("gbrt: min_samples_leaf must be >= 1");
    if (!(learning_rate > 0.0 && learning_rate <= 1.0)) throw ValidationError("gbrt: learning_rate must lie in (0, 1]");
}

double RegressionTree::predict(std::span<const double> x) const {
    std::size_t i = 0;
    while (nodes[i].feature >= 0) {
        const TreeNode& n = nodes[i];
        i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right);
    }
    return nodes[i].value;
}

std::size_t RegressionTree::depth() const {
    // Pre-order layout: children always follow their parent.
    std::vector<std::size_t> d(nodes.size(), 0);
    std::size_t deepest = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        deepest = std::max(deepest, d[i]);
        if (nodes[i].feature >= 0) {
            d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
            d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
        }
    }
    return deepest;
}

namespace {

using IndexLists = std::vector<std::vector<std::size_t>>;  // per feature, sorted by value

struct TreeBuilder {
    const Matrix& x;
    std::span<const double> residual;
    const GbrtConfig& config;
    std::vector<TreeNode> nodes;
    std::vector<char> goes_left;

    int build(const IndexLists& lists, std::size_t depth) {
        const auto& members = lists.front();
        const std::size_t n = members.size();
        const int index = static_cast<int>(nodes.size());
        nodes.push_back({});
        nodes.back().samples = n;

        double sum = 0.0;
        for (std::size_t i : members) sum += residual[i];
        const bool pure = std::all_of(members.begin(), members.end(),
                                      [&](std::size_t i) { return residual[i] == residual[members.front()]; });
        const auto leaf = [&] {
            nodes[static_cast<std::size_t>(index)].value = config.learning_rate * sum / static_cast<double>(n);
            return index;
        };
        if (pure || depth >= config.max_depth || n < 2 * config.min_samples_leaf) return leaf();

        // Maximize sum_L^2/n_L + sum_R^2/n_R, the squared-error reduction up to a constant.
        int best_feature = -1;
        std::size_t best_pos = 0;
        double best_gain = -std::numeric_limits<double>::infinity();
        for (std::size_t f = 0; f < lists.size(); ++f) {
            const auto& order = lists[f];
            double left = 0.0;
            for (std::size_t k = 1; k < n; ++k) {
                left += residual[order[k - 1]];
                if (k < config.min_samples_leaf || n - k < config.min_samples_leaf) continue;
                if (!(x(order[k - 1], f) < x(order[k], f))) continue;
                const double right = sum - left;
                const double gain = left * left / static_cast<double>(k) + right * right / static_cast<double>(n - k);
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = static_cast<int>(f);
                    best_pos = k;
                }
            }
        }
        if (best_feature < 0) return leaf();

        const auto f = static_cast<std::size_t>(best_feature);
        const double lo = x(lists[f][best_pos - 1], f);
        const double hi = x(lists[f][best_pos], f);
        double threshold = lo + 0.5 * (hi - lo);
        if (!(threshold > lo)) threshold = hi;

        for (std::size_t k = 0; k < n; ++k) goes_left[lists[f][k]] = k < best_pos ? 1 : 0;
        IndexLists left_lists(lists.size());
        IndexLists right_lists(lists.size());
        for (std::size_t g = 0; g < lists.size(); ++g) {
            left_lists[g].reserve(best_pos);
            right_lists[g].reserve(n - best_pos);
            for (std::size_t i : lists[g]) (goes_left[i] ? left_lists[g] : right_lists[g]).push_back(i);
        }
        const int l = build(left_lists, depth + 1);
        const int r = build(right_lists, depth + 1);
        TreeNode& node = nodes[static_cast<std::size_t>(index)];
        node.feature = best_feature;
        node.threshold = threshold;
        node.left = l;
        node.right = r;
        return index;
    }
};

double mse_of(std::span<const double> y, std::span<const double> f) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - f[i]) * (y[i] - f[i]);
    return s / static_cast<double>(y.size());
}

}  // namespace

GbrtModel fit_gbrt(const Matrix& x, std::span<const double> y, const GbrtConfig& config) {
    config.validate();
    const std::size_t n = x.rows();
    if (n != y.size()) throw ValidationError("gbrt: row count differs from target length");
    if (n < 2 * config.min_samples_leaf || n < 1) {
        throw ValidationError("gbrt: need at least 2 * min_samples_leaf rows");
    }
    if (x.cols() < 1) throw ValidationError("gbrt: no feature columns");
    require_finite(x, "gbrt features");
    if (!std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); })) {
        throw ValidationError("gbrt: non-finite target");
    }

    GbrtModel m;
    m.learning_rate = config.learning_rate;
    m.init_value = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    std::vector<double> fitted(n, m.init_value);
    m.train_mse.push_back(mse_of(y, fitted));
    if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); })) {
        m.init_value = y.front();
        m.constant_target = true;
        m.train_mse.back() = 0.0;
        return m;
    }

    IndexLists lists(x.cols(), std::vector<std::size_t>(n));
    for (std::size_t f = 0; f < x.cols(); ++f) {
        std::iota(lists[f].begin(), lists[f].end(), 0);
        std::stable_sort(lists[f].begin(), lists[f].end(), [&](std::size_t a, std::size_t b) { return x(a, f) < x(b, f); });
    }

    std::vector<double> residual(n);
    std::vector<char> goes_left(n, 0);
    for (std::size_t t = 0; t < config.n_trees; ++t) {
        for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - fitted[i];
        TreeBuilder b{x, residual, config, {}, std::move(goes_left)};
        b.build(lists, 0);
        goes_left = std::move(b.goes_left);
        RegressionTree tree{std::move(b.nodes)};
        for (std::size_t i = 0; i < n; ++i) fitted[i] += tree.predict(x.row(i));
        m.trees.push_back(std::move(tree));
        m.train_mse.push_back(mse_of(y, fitted));
    }
    return m;
}

GbrtModel fit_gbrt(const Dataset& train, const std::string& target, const GbrtConfig& config) {
    if (train.empty()) throw ValidationError("gbrt: empty dataset");
    const std::size_t t = train.schema.index_of(target);
    if (train.schema[t].role != FeatureRole::simulator_output) {
        throw ValidationError("gbrt: target '" + target + "' is not a simulator_output feature");
    }
    const auto inputs = train.schema.input_indices();
    Matrix x(train.size(), inputs.size());
    for (std::size_t i = 0; i < train.size(); ++i)
        for (std::size_t j = 0; j < inputs.size(); ++j) x(i, j) = train.rows(i, inputs[j]);
    const auto y = train.rows.column(t);
    GbrtModel m = fit_gbrt(x, y, config);
    m.target = target;
    for (std::size_t j : inputs) m.feature_names.push_back(train.schema[j].name);
    return m;
}

double predict_gbrt(const GbrtModel& model, std::span<const double> row) {
    if (!model.feature_names.empty() && row.size() != model.feature_names.size()) {
        throw ValidationError("predict_gbrt: expected " + std::to_string(model.feature_names.size()) + " features");
    }
    double v = model.init_value;
    for (const auto& tree : model.trees) v += tree.predict(row);
    return v;
}

std::vector<double> predict_gbrt(const GbrtModel& model, const Matrix& rows) {
    std::vector<double> out(rows.rows());
    for (std::size_t i = 0; i < rows.rows(); ++i) out[i] = predict_gbrt(model, rows.row(i));
    return out;
}

nlohmann::json to_json(const GbrtModel& model) {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& tree : model.trees) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const auto& n : tree.nodes) {
            if (n.feature < 0) {
                nodes.push_back({{"leaf", n.value}, {"samples", n.samples}});
            } else {
                nodes.push_back({{"feature", n.feature},
                                 {"threshold", n.threshold},
                                 {"left", n.left},
                                 {"right", n.right},
                                 {"samples", n.samples}});
            }
        }
        trees.push_back(nodes);
    }
    return {{"format", "circaug-gbrt"},
            {"version", kGbrtFormatVersion},
            {"target", model.target},
            {"features", model.feature_names},
            {"init_value", model.init_value},
            {"learning_rate", model.learning_rate},
            {"constant_target", model.constant_target},
            {"train_mse", model.train_mse},
            {"trees", trees}};
}

GbrtModel gbrt_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "circaug-gbrt") throw ValidationError("gbrt: not a GBRT document");
    if (j.value("version", 0) != kGbrtFormatVersion) throw ValidationError("gbrt: unsupported format version");
    GbrtModel m;
    m.target = j.value("target", "");
    m.feature_names = j.value("features", std::vector<std::string>{});
    m.init_value = j.at("init_value").get<double>();
    m.learning_rate = j.at("learning_rate").get<double>();
    m.constant_target = j.value("constant_target", false);
    m.train_mse = j.value("train_mse", std::vector<double>{});
    for (const auto& t : j.at("trees")) {
        RegressionTree tree;
        for (const auto& n : t) {
            TreeNode node;
            node.samples = n.value("samples", std::size_t{0});
            if (n.contains("leaf")) {
                node.value = n.at("leaf").get<double>();
            } else {
                node.feature = n.at("feature").get<int>();
                node.threshold = n.at("threshold").get<double>();
                node.left = n.at("left").get<int>();
                node.right = n.at("right").get<int>();
            }
            tree.nodes.push_back(node);
        }
        const auto size = static_cast<int>(tree.nodes.size());
        for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
            const TreeNode& node = tree.nodes[i];
            if (node.feature >= 0 && (node.left <= static_cast<int>(i) || node.right <= static_cast<int>(i) ||
                                      node.left >= size || node.right >= size)) {
                throw ValidationError("gbrt: malformed tree links");
            }
        }
        if (tree.nodes.empty()) throw ValidationError("gbrt: empty tree");
        m.trees.push_back(std::move(tree));
    }
    return m;
}

// --- composed-circuit experiment -------------------------------------------

namespace {

struct GateModels {
    std::vector<GbrtModel> real;       // delay_lh_a, delay_hl_a, delay_lh_b, ...
    std::vector<GbrtModel> augmented;
};

DelayResult predict_delays(const std::vector<GbrtModel>& models, std::span<const double> inputs) {
    DelayResult r;
    for (std::size_t k = 0; k + 1 < models.size(); k += 2)
        r.pins.push_back({predict_gbrt(models[k], inputs), predict_gbrt(models[k + 1], inputs)});
    return r;
}

}  // namespace

AugmentationRecord augmentation_experiment(const std::map<GateKind, GateTrainingData>& data, const Netlist& netlist,
                                           const AugmentationConfig& config, const OracleConstants& k) {
    config.gbrt.validate();
    if (config.eval_points < 1) throw ValidationError("augmentation: eval_points must be >= 1");
    std::set<GateKind> kinds;
    for (const auto& g : netlist.gates()) kinds.insert(g.kind);
    if (kinds.empty()) throw ValidationError("augmentation: netlist has no gates");

    AugmentationRecord rec;
    rec.netlist = netlist.name();
    std::map<GateKind, GateModels> models;
    for (GateKind kind : kinds) {
        const auto it = data.find(kind);
        if (it == data.end()) {
            throw ValidationError("augmentation: no training data for gate kind " + std::string(to_string(kind)));
        }
        const GateTrainingData& d = it->second;
        const FeatureSchema expected = circuit_schema(kind);
        if (!(d.real.schema == expected)) {
            throw ValidationError("augmentation: " + std::string(to_string(kind)) + " data does not use the gate schema");
        }
        if (!(d.artificial.schema == d.real.schema)) {
            throw ValidationError("augmentation: real and artificial schemas differ");
        }
        const Dataset combined = d.artificial.empty() ? d.real : concat(d.real, d.artificial);
        rec.real_rows += d.real.size();
        rec.artificial_rows += d.artificial.size();
        GateModels& gm = models[kind];
        for (std::size_t j : expected.output_indices()) {
            const std::string& name = expected[j].name;
            gm.real.push_back(fit_gbrt(d.real, name, config.gbrt));
            gm.augmented.push_back(d.artificial.empty() ? gm.real.back() : fit_gbrt(combined, name, config.gbrt));
        }
    }

    auto provider = [&models](bool augmented) -> GateDelayProvider {
        return [&models, augmented](const GateInstance& g, const ProcessPoint& p) {
            const GateModels& gm = models.at(g.kind);
            return predict_delays(augmented ? gm.augmented : gm.real, inputs_from_point(p));
        };
    };
    const GateDelayProvider oracle = oracle_delay_provider(k);
    const GateDelayProvider real_arm = provider(false);
    const GateDelayProvider aug_arm = provider(true);

    // Evaluation conditions share the gate input features; NOT has the smallest schema.
    const Dataset points = generate_dataset(GateKind::NOT, config.eval_ranges, config.eval_points,
                                            fnv1a("augmentation-eval", config.seed), k);
    const auto inputs = points.schema.input_indices();
    std::vector<double> x(inputs.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = 0; j < inputs.size(); ++j) x[j] = points.rows(i, inputs[j]);
        const ProcessPoint p = point_from_inputs(GateKind::NOT, x).first;
        AugmentationPoint pt{critical_path_delay(netlist, p, oracle), critical_path_delay(netlist, p, real_arm),
                             critical_path_delay(netlist, p, aug_arm)};
        rec.simulated_ps += pt.simulated_ps;
        rec.predicted_real_ps += pt.predicted_real_ps;
        rec.predicted_augmented_ps += pt.predicted_augmented_ps;
        rec.pct_error_real += 100.0 * std::abs(pt.predicted_real_ps - pt.simulated_ps) / pt.simulated_ps;
        rec.pct_error_augmented += 100.0 * std::abs(pt.predicted_augmented_ps - pt.simulated_ps) / pt.simulated_ps;
        rec.points.push_back(pt);
    }
    const double n = static_cast<double>(points.size());
    rec.simulated_ps /= n;
    rec.predicted_real_ps /= n;
    rec.predicted_augmented_ps /= n;
    rec.pct_error_real /= n;
    rec.pct_error_augmented /= n;
    return rec;
}

nlohmann::json to_json(const AugmentationRecord& r, bool include_points) {
    nlohmann::json j{{"format", "circaug-augmentation"},
                     {"version", 1},
                     {"netlist", r.netlist},
                     {"simulated_ps", r.simulated_ps},
                     {"predicted_real_ps", r.predicted_real_ps},
                     {"predicted_augmented_ps", r.predicted_augmented_ps},
                     {"pct_error_real", r.pct_error_real},
                     {"pct_error_augmented", r.pct_error_augmented},
                     {"real_rows", r.real_rows},
                     {"artificial_rows", r.artificial_rows},
                     {"eval_points", r.points.size()}};
    if (include_points) {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& p : r.points) pts.push_back({p.simulated_ps, p.predicted_real_ps, p.predicted_augmented_ps});
        j["points"] = pts;
    }
    return j;
}

}  // namespace circaug
