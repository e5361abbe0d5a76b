#include "circaug/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <toml.hpp>

#include "circaug/error.hpp"
#include "circaug/log.hpp"

namespace circaug {

namespace fs = std::filesystem;

// --- config parsing ------------------------------------------------------------

namespace {

class TableReader {
public:
    TableReader(const toml::table& t, std::string section, const std::string& source)
        : t_(t), section_(std::move(section)), source_(source) {}

    ~TableReader() = default;

    /// Errors on keys that no accessor asked for.
    void finish() const {
        for (const auto& [key, node] : t_)
            if (!seen_.count(std::string(key.str()))) {
                fail(node, "unknown key '" + std::string(key.str()) + "'");
            }
    }

    const toml::node* node(const std::string& key) {
        seen_.insert(key);
        return t_.get(key);
    }

    void size(const std::string& key, std::size_t& out) {
        if (const auto* n = node(key)) {
            auto v = n->value_exact<std::int64_t>();
            if (!v || *v < 0) fail(*n, "'" + key + "' must be a non-negative integer");
            out = static_cast<std::size_t>(*v);
        }
    }

    void u64(const std::string& key, std::uint64_t& out) {
        if (const auto* n = node(key)) {
            auto v = n->value_exact<std::int64_t>();
            if (!v || *v < 0) fail(*n, "'" + key + "' must be a non-negative integer");
            out = static_cast<std::uint64_t>(*v);
        }
    }

    void real(const std::string& key, double& out) {
        if (const auto* n = node(key)) {
            auto v = n->value<double>();
            if (!v || !std::isfinite(*v)) fail(*n, "'" + key + "' must be a number");
            out = *v;
        }
    }

    void boolean(const std::string& key, bool& out) {
        if (const auto* n = node(key)) {
            auto v = n->value_exact<bool>();
            if (!v) fail(*n, "'" + key + "' must be true or false");
            out = *v;
        }
    }

    void string(const std::string& key, std::string& out) {
        if (const auto* n = node(key)) {
            auto v = n->value_exact<std::string>();
            if (!v) fail(*n, "'" + key + "' must be a string");
            out = *v;
        }
    }

    template <class T, class Convert>
    void list(const std::string& key, std::vector<T>& out, Convert convert) {
        if (const auto* n = node(key)) {
            const auto* arr = n->as_array();
            if (arr == nullptr) fail(*n, "'" + key + "' must be an array");
            out.clear();
            for (const auto& item : *arr) out.push_back(convert(item));
        }
    }

    std::size_t to_size(const toml::node& n) const {
        auto v = n.value_exact<std::int64_t>();
        if (!v || *v < 0) fail(n, "expected a non-negative integer");
        return static_cast<std::size_t>(*v);
    }

    double to_real(const toml::node& n) const {
        auto v = n.value<double>();
        if (!v || !std::isfinite(*v)) fail(n, "expected a number");
        return *v;
    }

    std::string to_string(const toml::node& n) const {
        auto v = n.value_exact<std::string>();
        if (!v) fail(n, "expected a string");
        return *v;
    }

    [[noreturn]] void fail(const toml::node& n, const std::string& what) const {
        throw ParseError(source_, n.source().begin.line, "[" + section_ + "] " + what);
    }

    /// Wraps a ValidationError raised while interpreting `n`.
    template <class F>
    auto guard(const toml::node& n, F&& f) const {
        try {
            return f();
        } catch (const ValidationError& e) {
            fail(n, e.what());
        }
    }

private:
    const toml::table& t_;
    std::string section_;
    const std::string& source_;
    std::set<std::string> seen_;
};

const toml::table* section(const toml::table& root, const std::string& name, const std::string& source) {
    const toml::node* n = root.get(name);
    if (n == nullptr) return nullptr;
    const auto* t = n->as_table();
    if (t == nullptr) throw ParseError(source, n->source().begin.line, "'" + name + "' must be a table");
    return t;
}

fs::path resolve(const fs::path& base, const std::string& p) {
    if (p.empty()) return {};
    const fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

}  // namespace

void PipelineConfig::set_seed(std::uint64_t s) {
    seed = s;
    gan.seed = s;
    boost.seed = s;
    eval.regressor.seed = s;
}

void PipelineConfig::validate() const {
    gan.validate();
    boost.validate();
    if (!dataset.csv.empty()) {
        if (dataset.schema.empty()) throw ValidationError("config: [dataset] csv requires schema");
        if (!fs::exists(dataset.csv)) throw ValidationError("config: dataset csv '" + dataset.csv.string() + "' not found");
        if (!fs::exists(dataset.schema)) {
            throw ValidationError("config: dataset schema '" + dataset.schema.string() + "' not found");
        }
    }
    if (!dataset.circuit.empty()) (void)parse_circuit_kind(dataset.circuit);
    if (dataset.rows < 2) throw ValidationError("config: [dataset] rows must be >= 2");
    if (eval.bins < 2) throw ValidationError("config: [eval] bins must be >= 2");
    if (!(eval.smoothing > 0.0)) throw ValidationError("config: [eval] smoothing must be positive");
    if (eval.samples < 50) throw ValidationError("config: [eval] samples must be >= 50");
    if (experiment.seeds.empty()) throw ValidationError("config: [experiment] seeds must be non-empty");
    if (experiment.real_rows < 2 * boost.min_samples_leaf) {
        throw ValidationError("config: [experiment] real_rows must be >= 2 * min_samples_leaf");
    }
    if (sweep.layers.empty() || sweep.lr.empty() || sweep.regularizers.empty()) {
        throw ValidationError("config: [sweep] grids must be non-empty");
    }
    if (sample_rows < 1) throw ValidationError("config: sample_rows must be >= 1");
}

PipelineConfig parse_pipeline_config(std::string_view toml_text, const std::string& source, const fs::path& base) {
    toml::table root;
    try {
        root = toml::parse(toml_text, source);
    } catch (const toml::parse_error& e) {
        throw ParseError(source, e.source().begin.line, std::string(e.description()));
    }
    PipelineConfig c;
    {
        TableReader r(root, "root", source);
        std::uint64_t seed = 0;
        r.u64("seed", seed);
        c.set_seed(seed);
        std::string out = "runs";
        r.string("out", out);
        c.out = resolve(base, out);
        std::string checkpoint;
        r.string("checkpoint", checkpoint);
        c.checkpoint = resolve(base, checkpoint);
        r.size("sample_rows", c.sample_rows);
        for (const char* s : {"dataset", "gan", "eval", "boost", "experiment", "sweep"}) r.node(s);
        r.finish();
    }
    if (const auto* t = section(root, "dataset", source)) {
        TableReader r(*t, "dataset", source);
        r.string("circuit", c.dataset.circuit);
        std::string csv;
        std::string schema;
        r.string("csv", csv);
        r.string("schema", schema);
        c.dataset.csv = resolve(base, csv);
        c.dataset.schema = resolve(base, schema);
        r.size("rows", c.dataset.rows);
        if (const auto* n = r.node("ranges")) {
            const auto* ranges = n->as_table();
            if (ranges == nullptr) r.fail(*n, "'ranges' must be a table");
            for (const auto& [key, value] : *ranges) {
                const auto* arr = value.as_array();
                if (arr == nullptr || arr->size() != 2) r.fail(value, "range '" + std::string(key.str()) + "' must be [lo, hi]");
                c.dataset.ranges[std::string(key.str())] = {r.to_real((*arr)[0]), r.to_real((*arr)[1])};
            }
        }
        r.finish();
    }
    if (const auto* t = section(root, "gan", source)) {
        TableReader r(*t, "gan", source);
        r.size("latent_dim", c.gan.latent_dim);
        r.list("gen_hidden", c.gan.gen_hidden, [&](const toml::node& n) { return r.to_size(n); });
        r.list("disc_hidden", c.gan.disc_hidden, [&](const toml::node& n) { return r.to_size(n); });
        r.real("lr", c.gan.lr);
        r.real("beta1", c.gan.beta1);
        r.real("beta2", c.gan.beta2);
        r.size("batch_size", c.gan.batch_size);
        r.size("epochs", c.gan.epochs);
        r.size("disc_steps_per_gen_step", c.gan.disc_steps_per_gen_step);
        r.size("eval_every", c.gan.eval_every);
        r.real("leaky_alpha", c.gan.leaky_alpha);
        if (const auto* n = r.node("regularizer")) {
            const std::string text = r.to_string(*n);
            c.gan.regularizer = r.guard(*n, [&] { return parse_regularizer(text); });
        }
        if (const auto* n = r.node("gen_loss")) {
            const std::string text = r.to_string(*n);
            if (text != "non_saturating" && text != "minimax") r.fail(*n, "gen_loss must be non_saturating or minimax");
            c.gan.gen_loss = text == "minimax" ? GeneratorLoss::minimax : GeneratorLoss::non_saturating;
        }
        r.finish();
    }
    if (const auto* t = section(root, "eval", source)) {
        TableReader r(*t, "eval", source);
        r.size("bins", c.eval.bins);
        r.real("smoothing", c.eval.smoothing);
        r.size("samples", c.eval.samples);
        r.size("diversity_rows", c.eval.diversity_rows);
        r.boolean("ann", c.eval.ann);
        r.size("ann_epochs", c.eval.regressor.epochs);
        r.list("ann_hidden", c.eval.regressor.hidden, [&](const toml::node& n) { return r.to_size(n); });
        r.finish();
    }
    if (const auto* t = section(root, "boost", source)) {
        TableReader r(*t, "boost", source);
        r.size("n_trees", c.boost.n_trees);
        r.size("max_depth", c.boost.max_depth);
        r.size("min_samples_leaf", c.boost.min_samples_leaf);
        r.real("learning_rate", c.boost.learning_rate);
        r.finish();
    }
    if (const auto* t = section(root, "experiment", source)) {
        TableReader r(*t, "experiment", source);
        std::string netlist = c.experiment.netlist;
        r.string("netlist", netlist);
        c.experiment.netlist = netlist == "c17" || netlist == "rca4" ? netlist : resolve(base, netlist).string();
        r.size("real_rows", c.experiment.real_rows);
        r.size("artificial_rows", c.experiment.artificial_rows);
        r.size("eval_points", c.experiment.eval_points);
        r.list("seeds", c.experiment.seeds, [&](const toml::node& n) { return static_cast<std::uint64_t>(r.to_size(n)); });
        r.finish();
    }
    if (const auto* t = section(root, "sweep", source)) {
        TableReader r(*t, "sweep", source);
        r.list("layers", c.sweep.layers, [&](const toml::node& n) { return r.to_size(n); });
        r.size("width", c.sweep.width);
        r.list("lr", c.sweep.lr, [&](const toml::node& n) { return r.to_real(n); });
        r.list("regularizers", c.sweep.regularizers, [&](const toml::node& n) {
            const std::string text = r.to_string(n);
            return r.guard(n, [&] { return parse_regularizer(text); });
        });
        r.finish();
    }
    try {
        c.validate();
    } catch (const ValidationError& e) {
        throw ParseError(source, 0, e.what());
    }
    return c;
}

PipelineConfig load_pipeline_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, "cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_pipeline_config(ss.str(), path.string(), path.parent_path());
}

nlohmann::json to_json(const PipelineConfig& c) {
    nlohmann::json ranges = nlohmann::json::object();
    for (const auto& [name, r] : c.dataset.ranges) ranges[name] = {r.first, r.second};
    std::vector<std::string> regs;
    for (const auto& m : c.sweep.regularizers) regs.push_back(to_string(m));
    return {{"seed", c.seed},
            {"out", c.out.string()},
            {"checkpoint", c.checkpoint.string()},
            {"sample_rows", c.sample_rows},
            {"dataset",
             {{"circuit", c.dataset.circuit},
              {"csv", c.dataset.csv.string()},
              {"schema", c.dataset.schema.string()},
              {"rows", c.dataset.rows},
              {"ranges", ranges}}},
            {"gan", to_json(c.gan)},
            {"eval",
             {{"bins", c.eval.bins},
              {"smoothing", c.eval.smoothing},
              {"samples", c.eval.samples},
              {"diversity_rows", c.eval.diversity_rows},
              {"ann", c.eval.ann},
              {"ann_epochs", c.eval.regressor.epochs},
              {"ann_hidden", c.eval.regressor.hidden}}},
            {"boost",
             {{"n_trees", c.boost.n_trees},
              {"max_depth", c.boost.max_depth},
              {"min_samples_leaf", c.boost.min_samples_leaf},
              {"learning_rate", c.boost.learning_rate}}},
            {"experiment",
             {{"netlist", c.experiment.netlist},
              {"real_rows", c.experiment.real_rows},
              {"artificial_rows", c.experiment.artificial_rows},
              {"eval_points", c.experiment.eval_points},
              {"seeds", c.experiment.seeds}}},
            {"sweep", {{"layers", c.sweep.layers}, {"width", c.sweep.width}, {"lr", c.sweep.lr}, {"regularizers", regs}}}};
}

namespace {

std::string hex16(std::uint64_t h) {
    std::ostringstream s;
    s << std::hex << std::setw(16) << std::setfill('0') << h;
    return s.str();
}

}  // namespace

std::string config_hash(const PipelineConfig& config, const std::string& subcommand) {
    return hex16(fnv1a(to_json(config).dump(), fnv1a(subcommand)));
}

// --- shared pieces -----------------------------------------------------------------

Dataset load_or_generate(const PipelineConfig& c) {
    // augment-train generates its own gate data, so only here is a dataset required.
    if (c.dataset.csv.empty() && c.dataset.circuit.empty()) {
        throw ValidationError("config: [dataset] needs either circuit or csv");
    }
    if (!c.dataset.csv.empty()) return load_csv(c.dataset.csv, c.dataset.schema);
    return generate_dataset(parse_circuit_kind(c.dataset.circuit), c.dataset.ranges, c.dataset.rows, c.seed);
}

Simulator configured_simulator(const PipelineConfig& c) {
    if (c.dataset.circuit.empty()) return {};
    return make_simulator(parse_circuit_kind(c.dataset.circuit));
}

namespace {

class RunDir {
public:
    RunDir(const PipelineConfig& config, const std::string& subcommand)
        : subcommand_(subcommand), hash_(config_hash(config, subcommand)), config_(to_json(config)) {
        dir_ = config.out / (subcommand + "-" + hash_);
        fs::create_directories(dir_);
    }

    const fs::path& dir() const { return dir_; }

    void write(const fs::path& rel, const std::string& content) {
        const fs::path full = dir_ / rel;
        if (full.has_parent_path()) fs::create_directories(full.parent_path());
        std::ofstream out(full, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot write '" + full.string() + "'");
        out << content;
        if (!out) throw ValidationError("failed writing '" + full.string() + "'");
        std::lock_guard lock(mu_);
        artifacts_.push_back({rel, content.size(), hex16(fnv1a(content))});
    }

    void write_json(const fs::path& rel, const nlohmann::json& j) { write(rel, j.dump(2) + "\n"); }

    RunResult finish(nlohmann::json summary) {
        std::sort(artifacts_.begin(), artifacts_.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
        nlohmann::json list = nlohmann::json::array();
        RunResult r{dir_, {}, summary};
        for (const auto& a : artifacts_) {
            list.push_back({{"path", a.path.generic_string()}, {"bytes", a.bytes}, {"fnv1a", a.hash}});
            r.artifacts.push_back(a.path);
        }
        nlohmann::json manifest{{"format", "circaug-manifest"},
                                {"version", 1},
                                {"subcommand", subcommand_},
                                {"config_hash", hash_},
                                {"config", config_},
                                {"artifacts", list},
                                {"summary", summary}};
        std::ofstream out(dir_ / "manifest.json", std::ios::binary | std::ios::trunc);
        out << manifest.dump(2) << "\n";
        r.artifacts.emplace_back("manifest.json");
        return r;
    }

private:
    struct Artifact {
        fs::path path;
        std::size_t bytes;
        std::string hash;
    };
    std::string subcommand_;
    std::string hash_;
    nlohmann::json config_;
    fs::path dir_;
    std::mutex mu_;
    std::vector<Artifact> artifacts_;
};

EvalOptions eval_options(const PipelineConfig& c, std::uint64_t seed) {
    EvalOptions o;
    o.bins = c.eval.bins;
    o.smoothing = c.eval.smoothing;
    o.collapse.max_rows = c.eval.diversity_rows;
    o.collapse.seed = seed;
    return o;
}

GanEvaluator make_evaluator(const PipelineConfig& c, const Dataset& training, Simulator sim) {
    // The collapse diagnostic needs 50 training rows; fail before training starts.
    if (training.size() < 50) throw ValidationError("GAN training data needs at least 50 rows, got " + std::to_string(training.size()));
    return [&c, &training, sim = std::move(sim)](const GanModel& model, std::size_t epoch) {
        Rng rng = make_stream(c.seed ^ (epoch * 0x9e3779b97f4a7c15ULL), "eval");
        const Dataset generated = sample(model, c.eval.samples, rng);
        return evaluate_generated(generated, training, sim, model.disc_spectra(), eval_options(c, c.seed), epoch);
    };
}

std::string epoch_name(std::size_t epoch) {
    std::ostringstream s;
    s << "reports/epoch_" << std::setw(6) << std::setfill('0') << epoch << ".json";
    return s.str();
}

GanModel load_checkpoint(const PipelineConfig& c) {
    if (c.checkpoint.empty()) throw ValidationError("this subcommand needs a checkpoint (config key or --checkpoint)");
    std::ifstream in(c.checkpoint);
    if (!in) throw ValidationError("cannot open checkpoint '" + c.checkpoint.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(c.checkpoint.string(), 0, e.what());
    }
    return gan_from_json(j);
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// --- subcommands -------------------------------------------------------------------

RunResult gen_data(const PipelineConfig& c) {
    if (c.dataset.circuit.empty()) throw ValidationError("gen-data: [dataset] circuit is required");
    RunDir run(c, "gen-data");
    const Dataset d = load_or_generate(c);
    run.write("data.csv", to_csv(d));
    run.write("schema.toml", schema_to_toml(d.schema));
    return run.finish({{"rows", d.size()}, {"columns", d.schema.size()}});
}

RunResult train_gan(const PipelineConfig& c) {
    RunDir run(c, "train-gan");
    const Dataset data = load_or_generate(c);
    const TrainResult r = train(build(c.gan, data.schema.size()), data, make_evaluator(c, data, configured_simulator(c)));
    run.write_json("checkpoint_best.json", to_json(r.best));
    run.write_json("checkpoint_final.json", to_json(r.final));
    run.write("train_log.csv", train_log_csv(r.log));
    run.write("spectra.csv", spectra_csv(r.log));
    for (const auto& e : r.log.entries) run.write_json(epoch_name(e.epoch), to_json(e.report));
    nlohmann::json summary{{"best_epoch", r.best_epoch}, {"epochs", r.final.epochs_completed}};
    for (const auto& e : r.log.entries)
        if (e.epoch == r.best_epoch) {
            summary["best_score"] = selection_score(e.report);
            summary["best_mean_kl"] = e.report.kl.mean;
        }
    return run.finish(summary);
}

RunResult sweep(const PipelineConfig& c, std::size_t jobs) {
    RunDir run(c, "sweep");
    const Dataset data = load_or_generate(c);
    const Simulator sim = configured_simulator(c);

    struct Cell {
        RegularizerMode reg;
        std::size_t layers;
        double lr;
        std::size_t best_epoch = 0;
        std::optional<double> best_pct;
        double best_kl = 0.0;
        bool collapse = false;
        std::string log_csv;
    };
    std::vector<Cell> cells;
    for (const auto& reg : c.sweep.regularizers)
        for (std::size_t layers : c.sweep.layers)
            for (double lr : c.sweep.lr) cells.push_back({reg, layers, lr, 0, std::nullopt, 0.0, false, {}});

    std::atomic<std::size_t> next{0};
    std::mutex error_mu;
    std::exception_ptr error;
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            try {
                Cell& cell = cells[i];
                GanConfig g = c.gan;
                g.gen_hidden.assign(cell.layers, c.sweep.width);
                g.disc_hidden.assign(cell.layers, c.sweep.width);
                g.lr = cell.lr;
                g.regularizer = cell.reg;
                const TrainResult r = train(build(g, data.schema.size()), data, make_evaluator(c, data, sim));
                cell.best_epoch = r.best_epoch;
                for (const auto& e : r.log.entries)
                    if (e.epoch == r.best_epoch) {
                        cell.best_pct = e.report.mean_pct_error;
                        cell.best_kl = e.report.kl.mean;
                        cell.collapse = e.report.collapse.collapse;
                    }
                cell.log_csv = train_log_csv(r.log);
            } catch (...) {
                std::lock_guard lock(error_mu);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < std::max<std::size_t>(jobs, 1); ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);

    std::ostringstream csv;
    csv << "regularizer,hidden_layers,lr,best_epoch,best_mean_pct_error,best_mean_kl,collapse\n";
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const Cell& cell = cells[i];
        csv << to_string(cell.reg) << ',' << cell.layers << ',' << format_double(cell.lr) << ',' << cell.best_epoch << ','
            << (cell.best_pct ? format_double(*cell.best_pct) : std::string{}) << ',' << format_double(cell.best_kl) << ','
            << (cell.collapse ? 1 : 0) << '\n';
        std::ostringstream name;
        name << "cells/" << std::setw(3) << std::setfill('0') << i << "_" << to_string(cell.reg) << "_L" << cell.layers
             << "_lr" << format_double(cell.lr) << ".csv";
        run.write(name.str(), cell.log_csv);
    }
    run.write("sweep_summary.csv", csv.str());
    return run.finish({{"cells", cells.size()}});
}

RunResult sample_cmd(const PipelineConfig& c) {
    RunDir run(c, "sample");
    const GanModel m = load_checkpoint(c);
    Rng rng = make_stream(c.seed, "sample");
    const Dataset d = sample(m, c.sample_rows, rng);
    run.write("samples.csv", to_csv(d));
    run.write("schema.toml", schema_to_toml(d.schema));
    return run.finish({{"rows", d.size()}});
}

RunResult eval_cmd(const PipelineConfig& c) {
    RunDir run(c, "eval");
    const GanModel m = load_checkpoint(c);
    const Dataset training = load_or_generate(c);
    if (!(training.schema == m.schema)) throw ValidationError("eval: checkpoint schema differs from the dataset");
    Rng rng = make_stream(c.seed, "eval");
    const Dataset generated = sample(m, c.eval.samples, rng);
    const EvalReport report = evaluate_generated(generated, training, configured_simulator(c), m.disc_spectra(),
                                                 eval_options(c, c.seed), m.epochs_completed);
    nlohmann::json j = to_json(report);
    if (c.eval.ann) {
        const MlpRegressor ann = fit_mlp_regressor(training, c.eval.regressor);
        const AnnComparison a = eval_vs_ann(generated, ann);
        j["ann"] = {{"mse", a.mse}, {"rmse", a.rmse}, {"mae", a.mae}, {"regressor_test_mse", ann.metrics.mse}};
        run.write_json("ann.json", to_json(ann));
    }
    run.write_json("eval_report.json", j);
    nlohmann::json summary{{"mean_kl", report.kl.mean}, {"collapse", report.collapse.collapse}};
    if (report.mean_pct_error) summary["mean_pct_error"] = *report.mean_pct_error;
    return run.finish(summary);
}

RunResult augment_train(const PipelineConfig& c) {
    RunDir run(c, "augment-train");
    const Netlist net = resolve_netlist(c.experiment.netlist);
    std::set<GateKind> kinds;
    for (const auto& g : net.gates()) kinds.insert(g.kind);

    nlohmann::json per_seed = nlohmann::json::array();
    std::vector<double> reductions;
    std::size_t wins = 0;
    for (std::uint64_t seed : c.experiment.seeds) {
        std::map<GateKind, GateTrainingData> data;
        for (GateKind kind : kinds) {
            const std::uint64_t s = fnv1a(to_string(kind), seed);
            Dataset real = generate_dataset(kind, c.dataset.ranges, c.experiment.real_rows, s);
            GanConfig g = c.gan;
            g.seed = s;
            Dataset artificial(real.schema, Matrix(0, real.schema.size()));
            if (c.experiment.artificial_rows > 0) {
                const Simulator sim = make_simulator(kind);
                const TrainResult r = train(build(g, real.schema.size()), real, [&](const GanModel& m, std::size_t epoch) {
                    Rng rng = make_stream(s ^ epoch, "eval");
                    const Dataset gen = sample(m, c.eval.samples, rng);
                    return evaluate_generated(gen, real, sim, m.disc_spectra(), eval_options(c, s), epoch);
                });
                Rng rng = make_stream(s, "artificial");
                artificial = sample(r.best, c.experiment.artificial_rows, rng);
                run.write("artificial/" + std::string(to_string(kind)) + "_seed" + std::to_string(seed) + ".csv",
                          to_csv(artificial));
            }
            data.emplace(kind, GateTrainingData{std::move(real), std::move(artificial)});
        }
        AugmentationConfig ac;
        ac.gbrt = c.boost;
        ac.eval_points = c.experiment.eval_points;
        ac.eval_ranges = c.dataset.ranges;
        ac.seed = seed;
        const AugmentationRecord rec = augmentation_experiment(data, net, ac);
        nlohmann::json j = to_json(rec);
        j["seed"] = seed;
        per_seed.push_back(j);
        if (rec.pct_error_augmented < rec.pct_error_real) ++wins;
        reductions.push_back(rec.pct_error_real > 0.0 ? 1.0 - rec.pct_error_augmented / rec.pct_error_real : 0.0);
    }
    const nlohmann::json summary{{"netlist", net.name()},
                                 {"seeds", c.experiment.seeds.size()},
                                 {"augmented_better", wins},
                                 {"median_relative_reduction", median(reductions)}};
    run.write_json("augmentation.json", {{"format", "circaug-augmentation-runs"},
                                         {"version", 1},
                                         {"columns", {"simulated_ps", "predicted_real_ps", "predicted_augmented_ps",
                                                      "pct_error_real", "pct_error_augmented"}},
                                         {"runs", per_seed},
                                         {"summary", summary}});
    return run.finish(summary);
}

RunResult report_cmd(const PipelineConfig& c) {
    RunDir run(c, "report");
    const GanModel m = load_checkpoint(c);
    const Dataset training = load_or_generate(c);
    if (!(training.schema == m.schema)) throw ValidationError("report: checkpoint schema differs from the dataset");
    Rng rng = make_stream(c.seed, "report");
    const Dataset generated = sample(m, c.eval.samples, rng);
    std::vector<Histogram> train_h;
    std::vector<Histogram> gen_h;
    for (std::size_t f = 0; f < training.schema.size(); ++f) {
        const auto& name = training.schema[f].name;
        const auto col = training.rows.column(f);
        const std::pair range{*std::min_element(col.begin(), col.end()), *std::max_element(col.begin(), col.end())};
        train_h.push_back(density_export(training, name, c.eval.bins, range));
        gen_h.push_back(density_export(generated, name, c.eval.bins, range));
    }
    run.write("density_training.csv", histogram_csv(train_h));
    run.write("density_generated.csv", histogram_csv(gen_h));
    const KlDivergence kl = kl_divergence(training, generated, c.eval.bins, c.eval.smoothing);
    return run.finish({{"mean_kl", kl.mean}});
}

}  // namespace

RunResult run_subcommand(const std::string& subcommand, const PipelineConfig& config, const RunOptions& options) {
    if (subcommand == "gen-data") return gen_data(config);
    if (subcommand == "train-gan") return train_gan(config);
    if (subcommand == "sweep") return sweep(config, options.jobs);
    if (subcommand == "sample") return sample_cmd(config);
    if (subcommand == "eval") return eval_cmd(config);
    if (subcommand == "augment-train") return augment_train(config);
    if (subcommand == "report") return report_cmd(config);
    throw ValidationError("unknown subcommand '" + subcommand + "'");
}

}  // namespace circaug
