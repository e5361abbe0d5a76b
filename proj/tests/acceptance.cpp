// Acceptance runner. `acceptance --criterion N` runs one criterion, no
// arguments runs all eight. One PASS/FAIL line per criterion; the exit status
// is non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "circaug/boost.hpp"
#include "circaug/error.hpp"
#include "circaug/eval.hpp"
#include "circaug/gan.hpp"
#include "circaug/linalg.hpp"
#include "circaug/log.hpp"
#include "circaug/nn.hpp"
#include "circaug/oracle.hpp"
#include "circaug/pipeline.hpp"
#include "support.hpp"

using namespace circaug;
namespace fs = std::filesystem;
namespace t = circaug::testing;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [FAILED]");
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string ratio(std::size_t k, std::size_t n) { return std::to_string(k) + "/" + std::to_string(n); }

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::current_path() / "acceptance_scratch" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// --- 1. numerics ------------------------------------------------------------

void numerics(Outcome& o) {
    const auto t0 = Clock::now();
    Rng shapes = make_stream(1, "acceptance-svd-shapes");
    double worst_recon = 0.0, worst_orth = 0.0, worst_power = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const auto m = static_cast<std::size_t>(std::uniform_int_distribution<int>(1, 64)(shapes));
        const auto n = static_cast<std::size_t>(std::uniform_int_distribution<int>(1, 64)(shapes));
        Rng rng = make_stream(static_cast<std::uint64_t>(k), "acceptance-svd");
        const Matrix w = Matrix::random_normal(m, n, rng, uniform(rng, 0.01, 10.0));
        const SvdResult s = svd(w);
        worst_recon = std::max(worst_recon, t::frob_diff(t::naive_reconstruct(s), w));
        worst_orth = std::max({worst_orth, t::orthogonality_error(s.u), t::orthogonality_error(s.v)});
        // Cold start, run until the estimate settles; the slowest matrices in
        // the set have sigma_2 / sigma_1 above 0.997.
        SpectralNormEstimate cold{0.0, PowerIterState::random(m, rng)};
        for (int rounds = 0; rounds < 500; ++rounds) {
            const double before = cold.sigma;
            cold = spectral_norm(w, cold.state, 100);
            if (std::abs(cold.sigma - before) <= 1e-13 * cold.sigma) break;
        }
        worst_power = std::max(worst_power, std::abs(cold.sigma - s.sigma[0]) / s.sigma[0]);
    }
    o.require(worst_recon <= 1e-8, "svd reconstruction " + fmt("%.2e", worst_recon));
    o.require(worst_orth <= 1e-8, "orthogonality " + fmt("%.2e", worst_orth));
    o.require(worst_power <= 1e-4, "cold power iteration rel " + fmt("%.2e", worst_power));

    const Activation acts[] = {Activation::leaky_relu(), Activation::tanh(), Activation::sigmoid(), Activation::linear()};
    double worst_grad = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng = make_stream(seed, "acceptance-grad");
        auto pick = [&](int lo, int hi) { return static_cast<std::size_t>(std::uniform_int_distribution<int>(lo, hi)(rng)); };
        const std::size_t in = pick(1, 6), out = pick(1, 3);
        std::vector<std::size_t> hidden(pick(1, 3));
        for (auto& h : hidden) h = pick(2, 8);
        MlpParams p = init_mlp(chain_specs(in, hidden, out, acts[seed % 3], acts[(seed / 3) % 4]), rng);
        for (auto& l : p.layers)
            for (double& b : l.bias) b = 0.3 * standard_normal(rng);
        const std::size_t batch = pick(1, 5);
        const Matrix x = Matrix::random_normal(batch, in, rng);
        const Matrix wt = Matrix::random_normal(batch, out, rng);
        worst_grad = std::max(worst_grad, t::gradient_check_error(p, x, wt));
    }
    o.require(worst_grad <= 1e-4, "gradient check rel " + fmt("%.2e", worst_grad) + " over 100 nets");
    const double secs = seconds_since(t0);
    o.require(secs < 60.0, "runtime " + fmt("%.1fs", secs));
}

// --- 2. spectral contracts --------------------------------------------------

double exact_sigma1(const Matrix& w) { return svd(w).sigma.front(); }

void spectral_contracts(Outcome& o) {
    const auto t0 = Clock::now();
    const Dataset data = generate_dataset(GateKind::NAND2, {}, 500, 21);

    GanConfig c;
    c.epochs = 200;
    c.eval_every = 10;
    c.seed = 21;

    // The evaluator sees the model after each evaluated epoch; the matrices the
    // next forward pass would use are recomputed on a copy.
    double sn_lo = 1e300, sn_hi = -1e300;
    std::size_t sn_checks = 0;
    c.regularizer = RegularizerMode::spectral_norm();
    train(build(c, data.schema.size()), data, [&](const GanModel& m, std::size_t epoch) {
        GanModel copy = m;
        for (const auto& layer : copy.effective_discriminator().layers) {
            const double s = exact_sigma1(layer.weights);
            sn_lo = std::min(sn_lo, s);
            sn_hi = std::max(sn_hi, s);
            ++sn_checks;
        }
        return EvalReport{.epoch = epoch};
    });
    o.require(sn_lo >= 0.98 && sn_hi <= 1.02,
              "spectral_norm sigma_1 in [" + fmt("%.4f", sn_lo) + ", " + fmt("%.4f", sn_hi) + "] over " +
                  std::to_string(sn_checks) + " matrices");

    double top_gap = 0.0, max_dev = 0.0;
    std::size_t sr_checks = 0;
    c.regularizer = RegularizerMode::spectral_reg(0.5);
    const TrainResult sr = train(build(c, data.schema.size()), data, [&](const GanModel& m, std::size_t epoch) {
        GanModel copy = m;
        for (const auto& layer : copy.effective_discriminator().layers) {
            const std::vector<double> s = svd(layer.weights).sigma;
            const std::size_t i = c.regularizer.top_count(s.size());
            for (std::size_t j = 0; j < i; ++j) top_gap = std::max(top_gap, std::abs(s[j] - s[0]));
            max_dev = std::max(max_dev, std::abs(s[0] - 1.0));
            ++sr_checks;
        }
        return EvalReport{.epoch = epoch};
    });
    o.require(top_gap <= 1e-6, "spectral_reg(0.5) top-half spread " + fmt("%.2e", top_gap));
    o.require(max_dev <= 1e-6, "max |sigma_1 - 1| " + fmt("%.2e", max_dev) + " over " + std::to_string(sr_checks) +
                                   " matrices");

    // i = 1 against W / sigma_1 with sigma_1 from the independent oracle, on
    // trained and on random matrices.
    std::vector<Matrix> mats;
    for (const auto& l : sr.final.disc.layers) mats.push_back(l.weights);
    Rng rng = make_stream(22, "acceptance-i1");
    for (int k = 0; k < 50; ++k)
        mats.push_back(Matrix::random_normal(std::uniform_int_distribution<std::size_t>(1, 64)(rng),
                                             std::uniform_int_distribution<std::size_t>(1, 64)(rng), rng));
    double worst_i1 = 0.0;
    for (const Matrix& w : mats)
        worst_i1 = std::max(worst_i1, t::frob_diff(apply_spectral_regularization(w, 1), w * (1.0 / t::naive_sigma1(w))));
    o.require(worst_i1 <= 1e-9, "i=1 vs exact normalization " + fmt("%.2e", worst_i1));
    const double secs = seconds_since(t0);
    o.require(secs < 300.0, "runtime " + fmt("%.1fs", secs));
}

// --- 3. mode-collapse mitigation --------------------------------------------

// Eight modes on a circle of radius 2; each row picks a mode uniformly.
Dataset gaussian_ring(std::size_t n, std::uint64_t seed) {
    constexpr double kRadius = 2.0, kSd = 0.02;
    Rng rng = make_stream(seed, "acceptance-ring");
    std::uniform_int_distribution<int> mode(0, 7);
    Matrix m(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = mode(rng) * std::numbers::pi / 4.0;
        m(i, 0) = kRadius * std::cos(a) + kSd * standard_normal(rng);
        m(i, 1) = kRadius * std::sin(a) + kSd * standard_normal(rng);
    }
    return Dataset(FeatureSchema({{"x", FeatureRole::simulator_input, "", false},
                                  {"y", FeatureRole::simulator_output, "", false}}),
                   m);
}

struct CollapseRun {
    double final_kl = 0.0;
    bool flagged = false;  // at any evaluated epoch
    double min_diversity = 1e300;
};

CollapseRun collapse_run(const Dataset& data, GanConfig c) {
    const TrainResult r = train(build(c, data.schema.size()), data, [&](const GanModel& m, std::size_t epoch) {
        Rng rng = make_stream(c.seed ^ epoch, "acceptance-eval");
        const Dataset gen = sample(m, 1000, rng);
        EvalOptions opts;
        opts.collapse.seed = c.seed;
        return evaluate_generated(gen, data, {}, m.disc_spectra(), opts, epoch);
    });
    CollapseRun out;
    out.final_kl = r.log.entries.back().report.kl.mean;
    for (const auto& e : r.log.entries) {
        out.flagged = out.flagged || e.report.collapse.collapse;
        out.min_diversity = std::min(out.min_diversity, e.report.collapse.diversity);
    }
    return out;
}

void collapse_mitigation(Outcome& o) {
    const auto t0 = Clock::now();
    struct Setting {
        const char* name;
        std::function<Dataset(std::uint64_t)> data;
        GanConfig gan;
    };
    GanConfig ring_cfg;
    ring_cfg.latent_dim = 8;
    ring_cfg.lr = 1e-3;
    ring_cfg.epochs = 400;
    ring_cfg.eval_every = 40;
    // 150 rows: with this little data the unregularized discriminator
    // overfits within the runtime budget.
    GanConfig nand_cfg;
    nand_cfg.epochs = 1500;
    nand_cfg.eval_every = 100;
    const Setting settings[] = {
        {"ring", [](std::uint64_t s) { return gaussian_ring(500, s); }, ring_cfg},
        {"nand2", [](std::uint64_t s) { return generate_dataset(GateKind::NAND2, {}, 150, s); }, nand_cfg},
    };
    for (const Setting& st : settings) {
        std::size_t kl_wins = 0, none_flags = 0, sr_flags = 0;
        std::ostringstream per_seed;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const Dataset data = st.data(seed);
            GanConfig c = st.gan;
            c.seed = seed;
            c.regularizer = RegularizerMode::none();
            const CollapseRun none = collapse_run(data, c);
            c.regularizer = RegularizerMode::spectral_reg(0.5);
            const CollapseRun sr = collapse_run(data, c);
            kl_wins += sr.final_kl < none.final_kl;
            none_flags += none.flagged;
            sr_flags += sr.flagged;
            per_seed << " s" << seed << " kl " << fmt("%.3f", none.final_kl) << "/" << fmt("%.3f", sr.final_kl)
                     << " div " << fmt("%.2f", none.min_diversity) << "/" << fmt("%.2f", sr.min_diversity);
            std::cerr << "  criterion 3 " << st.name << " seed " << seed << ": none kl " << none.final_kl << " flag "
                      << none.flagged << " min div " << none.min_diversity << " | spectral_reg kl " << sr.final_kl
                      << " flag " << sr.flagged << " min div " << sr.min_diversity << '\n';
        }
        const std::string n = st.name;
        o.require(kl_wins >= 4, n + " spectral_reg lower KL " + ratio(kl_wins, 5));
        o.require(none_flags >= 3, n + " none flagged " + ratio(none_flags, 5));
        o.require(sr_flags <= 1, n + " spectral_reg flagged " + ratio(sr_flags, 5));
        o.detail << " (" << n << " none/spectral_reg:" << per_seed.str() << ")";
    }
    const double secs = seconds_since(t0);
    o.require(secs < 1200.0, "runtime " + fmt("%.1fs", secs));
}

// --- 4. simulator-in-the-loop quality ---------------------------------------

void simulator_quality(Outcome& o) {
    const auto t0 = Clock::now();
    const Dataset data = generate_dataset(GateKind::NAND2, {}, 500, 4);
    const Simulator sim = make_simulator(GateKind::NAND2);
    GanConfig c;
    c.epochs = 2000;
    c.eval_every = 50;
    c.seed = 4;
    c.regularizer = RegularizerMode::spectral_reg(0.5);
    const TrainResult r = train(build(c, data.schema.size()), data, [&](const GanModel& m, std::size_t epoch) {
        Rng rng = make_stream(c.seed ^ epoch, "acceptance-eval");
        EvalOptions opts;
        opts.collapse.seed = c.seed;
        return evaluate_generated(sample(m, 1000, rng), data, sim, m.disc_spectra(), opts, epoch);
    });

    const TrainLogEntry* best = nullptr;
    std::vector<double> curve;
    for (const auto& e : r.log.entries) {
        curve.push_back(*e.report.mean_pct_error);
        if (e.epoch == r.best_epoch) best = &e;
    }
    if (best == nullptr) throw std::logic_error("best epoch missing from the log");
    const PercentageError& pe = *best->report.pct_error;
    double worst = 0.0;
    std::ostringstream outputs;
    for (std::size_t j = 0; j < pe.percent.size(); ++j) {
        worst = std::max(worst, pe.percent[j]);
        outputs << (j ? " " : "") << pe.features[j] << "=" << fmt("%.2f%%", pe.percent[j]);
    }
    o.require(worst <= 15.0, "best epoch " + std::to_string(r.best_epoch) + ": " + outputs.str());

    // Decreasing envelope: the running best falls from the first evaluation,
    // and the last quarter of the curve sits below the first quarter.
    const std::size_t q = std::max<std::size_t>(1, curve.size() / 4);
    double head = 0.0, tail = 0.0;
    for (std::size_t k = 0; k < q; ++k) {
        head += curve[k] / static_cast<double>(q);
        tail += curve[curve.size() - 1 - k] / static_cast<double>(q);
    }
    const double envelope_end = *std::min_element(curve.begin(), curve.end());
    o.require(envelope_end < curve.front() && tail < head,
              "envelope " + fmt("%.2f", curve.front()) + " -> " + fmt("%.2f", envelope_end) + ", quarter means " +
                  fmt("%.2f", head) + " -> " + fmt("%.2f", tail));
    const double secs = seconds_since(t0);
    o.require(secs < 900.0, "runtime " + fmt("%.1fs", secs));
}

// --- 5. augmentation benefit ------------------------------------------------

void augmentation_benefit(Outcome& o) {
    const auto t0 = Clock::now();
    const fs::path out = scratch("criterion5");
    for (const char* netlist : {"c17", "rca4"}) {
        PipelineConfig c;
        c.out = out;
        c.set_seed(5);
        // Batch 32 doubles the generator steps per epoch on 100 rows; 1600
        // epochs is as long as ten trainings fit in the budget.
        c.gan.batch_size = 32;
        c.gan.epochs = 1600;
        c.gan.eval_every = 100;
        c.eval.samples = 500;
        c.experiment.netlist = netlist;
        c.experiment.real_rows = 100;
        c.experiment.artificial_rows = 2000;
        c.experiment.seeds = {1, 2, 3, 4, 5};
        c.validate();
        const RunResult r = run_subcommand("augment-train", c);
        const auto wins = r.summary["augmented_better"].get<std::size_t>();
        const double median = r.summary["median_relative_reduction"].get<double>();
        std::ostringstream errs;
        std::ifstream in(r.dir / "augmentation.json");
        const auto j = nlohmann::json::parse(in);
        for (const auto& run : j["runs"])
            errs << " " << fmt("%.2f", run["pct_error_real"].get<double>()) << "->"
                 << fmt("%.2f", run["pct_error_augmented"].get<double>());
        const std::string n = netlist;
        o.require(wins >= 4, n + " augmented better " + ratio(wins, 5) + " (% error" + errs.str() + ")");
        o.require(median >= 0.30, n + " median reduction " + fmt("%.1f%%", 100.0 * median));
    }
    const double secs = seconds_since(t0);
    o.require(secs < 900.0, "runtime " + fmt("%.1fs", secs));
}

// --- 6. oracle correctness --------------------------------------------------

void oracle_correctness(Outcome& o) {
    const auto t0 = Clock::now();
    Rng rng = make_stream(6, "acceptance-points");
    std::size_t mismatches = 0, points = 0;
    for (const Netlist& net : {builtin_c17(), builtin_rca4()})
        for (int i = 0; i < 25; ++i) {
            const ProcessPoint p = t::random_point(rng);
            mismatches += critical_path_delay(net, p, oracle_delay_provider()) != t::brute_force_critical_path(net, p);
            ++points;
        }
    o.require(mismatches == 0, "brute-force path enumeration mismatches " + ratio(mismatches, points));
    const std::size_t violations = t::monotonicity_violations();
    o.require(violations == 0, "monotonicity lattice violations " + std::to_string(violations));
    const double secs = seconds_since(t0);
    o.require(secs < 60.0, "runtime " + fmt("%.1fs", secs));
}

// --- 7. metric identities ---------------------------------------------------

void metric_identities(Outcome& o) {
    const auto t0 = Clock::now();
    const Dataset nand = generate_dataset(GateKind::NAND2, {}, 2000, 7);
    const double self = kl_divergence(nand, nand).mean;
    o.require(self <= 1e-9, "KL(p||p) " + fmt("%.1e", self));

    const FeatureSchema xy({{"x", FeatureRole::simulator_input, "", false},
                            {"y", FeatureRole::simulator_output, "", false}});
    auto gaussian = [&](double mean, std::uint64_t seed) {
        Rng rng = make_stream(seed, "acceptance-gauss");
        Matrix m(20000, 2);
        for (double& v : m.values()) v = mean + standard_normal(rng);
        return Dataset(xy, m);
    };
    const KlDivergence g = kl_divergence(gaussian(0.0, 1), gaussian(1.0, 2));
    double worst_rel = 0.0;
    for (double v : g.kl) worst_rel = std::max(worst_rel, std::abs(v - 0.5) / 0.5);
    o.require(worst_rel <= 0.15, "Gaussian KL vs 0.5 rel " + fmt("%.3f", worst_rel));

    // Perturbed oracle rows, so every output carries a non-zero error.
    Dataset noisy = generate_dataset(GateKind::NAND2, {}, 500, 8);
    Rng rng = make_stream(8, "acceptance-noise");
    const auto outs = noisy.schema.output_indices();
    const auto ins = noisy.schema.input_indices();
    for (std::size_t i = 0; i < noisy.size(); ++i)
        for (std::size_t j : outs) noisy.rows(i, j) *= 1.0 + 0.1 * standard_normal(rng);
    const Simulator sim = make_simulator(GateKind::NAND2);
    const PercentageError pe = avg_percentage_error(noisy, sim);
    std::vector<double> loop(outs.size(), 0.0);
    std::size_t used = 0;
    for (std::size_t i = 0; i < noisy.size(); ++i) {
        std::vector<double> x;
        for (std::size_t j : ins) x.push_back(noisy.rows(i, j));
        const auto y = sim(x);
        if (!y) continue;
        ++used;
        for (std::size_t k = 0; k < outs.size(); ++k)
            loop[k] += 100.0 * std::abs(noisy.rows(i, outs[k]) - (*y)[k]) / std::abs((*y)[k]);
    }
    double worst_pct = 0.0;
    for (std::size_t k = 0; k < outs.size(); ++k)
        worst_pct = std::max(worst_pct, std::abs(pe.percent[k] - loop[k] / static_cast<double>(used)));
    o.require(worst_pct <= 1e-12 && used == pe.rows_used, "avg % error vs scalar loop " + fmt("%.1e", worst_pct));

    RegressorConfig rc;
    rc.hidden = {16};
    rc.epochs = 30;
    const MlpRegressor ann = fit_mlp_regressor(nand, rc);
    const AnnComparison a = eval_vs_ann(noisy, ann);
    o.require(a.rmse == std::sqrt(a.mse), "rmse == sqrt(mse) exactly (" + fmt("%.6g", a.rmse) + ")");
    const double secs = seconds_since(t0);
    o.require(secs < 60.0, "runtime " + fmt("%.1fs", secs));
}

// --- 8. reproducibility through the CLI -------------------------------------

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        files[fs::relative(e.path(), dir).generic_string()] = ss.str();
    }
    return files;
}

// Runs the CLI and returns the run directory it prints on its first line.
fs::path run_cli(const std::string& args, const fs::path& work) {
    const fs::path log = work / "cli_stdout.txt";
    const std::string cmd = std::string("\"") + CIRCAUG_CLI_PATH + "\" " + args + " > \"" + log.string() + "\"";
    if (std::system(cmd.c_str()) != 0) throw std::runtime_error("CLI failed: " + cmd);
    std::ifstream in(log);
    std::string first;
    std::getline(in, first);
    return first;
}

void reproducibility(Outcome& o) {
    const fs::path work = scratch("criterion8");
    const fs::path config = work / "config.toml";
    std::ofstream(config) << "seed = 8\nout = \"runs\"\n"
                          << R"(
[dataset]
circuit = "NAND2"
rows = 80

[gan]
gen_hidden = [16]
disc_hidden = [16]
batch_size = 16
epochs = 4
eval_every = 2

[eval]
samples = 60
diversity_rows = 60
ann = true
ann_hidden = [8]
ann_epochs = 5

[boost]
n_trees = 20

[experiment]
netlist = "c17"
real_rows = 60
artificial_rows = 100
seeds = [1, 2]
eval_points = 20

[sweep]
layers = [1, 2]
width = 8
lr = [0.001]
regularizers = ["none", "spectral_reg"]
)";
    const std::string base = "--config \"" + config.string() + "\"";
    fs::path checkpoint;
    for (const std::string sub : kSubcommands) {
        std::string args = sub + " " + base;
        if (sub == "sweep") args += " --jobs 2";
        if (sub == "sample" || sub == "eval" || sub == "report") args += " --checkpoint \"" + checkpoint.string() + "\"";
        const fs::path dir = run_cli(args, work);
        const auto first = snapshot(dir);
        if (sub == "train-gan") checkpoint = dir / "checkpoint_best.json";
        const fs::path keep = work / ("first_" + sub);
        fs::rename(dir, keep);  // the second run must rebuild every file
        const fs::path again = run_cli(args, work);
        const auto second = snapshot(again);
        o.require(again == dir && first == second && !first.empty(),
                  sub + " " + std::to_string(first.size()) + " files identical");
    }
}

// --- driver -----------------------------------------------------------------

struct Criterion {
    int id;
    const char* name;
    void (*run)(Outcome&);
};

constexpr Criterion kCriteria[] = {
    {1, "numerics", numerics},
    {2, "spectral contracts", spectral_contracts},
    {3, "mode-collapse mitigation", collapse_mitigation},
    {4, "simulator-in-the-loop quality", simulator_quality},
    {5, "augmentation benefit", augmentation_benefit},
    {6, "oracle correctness", oracle_correctness},
    {7, "metric identities", metric_identities},
    {8, "CLI reproducibility", reproducibility},
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    if (argc == 3 && std::string(argv[1]) == "--criterion") only = std::atoi(argv[2]);
    else if (argc != 1) {
        std::cerr << "usage: acceptance [--criterion N]\n";
        return 2;
    }
    set_log_level(LogLevel::error);
    bool all_pass = true;
    bool ran = false;
    for (const Criterion& c : kCriteria) {
        if (only != 0 && c.id != only) continue;
        ran = true;
        Outcome o;
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        all_pass = all_pass && o.pass;
        std::cout << "criterion " << c.id << " (" << c.name << "): " << (o.pass ? "PASS" : "FAIL") << " | "
                  << o.detail.str() << std::endl;
    }
    if (!ran) {
        std::cerr << "acceptance: no criterion " << only << '\n';
        return 2;
    }
    return all_pass ? 0 : 1;
}
