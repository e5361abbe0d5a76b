// circuit-augmentor <subcommand> --config <path> [--seed N] [--epochs N] [--out DIR] [--jobs N]

#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "circaug/error.hpp"
#include "circaug/log.hpp"
#include "circaug/pipeline.hpp"

namespace {

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> epochs;
    std::optional<std::string> out;
    std::optional<std::string> checkpoint;
    std::size_t jobs = 1;
    bool verbose = false;
};

int run(const std::string& subcommand, const Flags& flags) {
    circaug::PipelineConfig config = circaug::load_pipeline_config(flags.config);
    if (flags.seed) config.set_seed(*flags.seed);
    if (flags.epochs) config.gan.epochs = *flags.epochs;
    if (flags.out) config.out = *flags.out;
    if (flags.checkpoint) config.checkpoint = *flags.checkpoint;
    config.validate();

    const circaug::RunResult r = circaug::run_subcommand(subcommand, config, {flags.jobs});
    std::cout << r.dir.string() << '\n';
    for (const auto& a : r.artifacts) std::cout << "  " << a.generic_string() << '\n';
    std::cout << r.summary.dump() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectrally regularized GAN augmentation for circuit performance data"};
    app.require_subcommand(1);
    Flags flags;

    const std::pair<const char*, const char*> commands[] = {
        {"gen-data", "Generate an oracle dataset as CSV plus schema"},
        {"train-gan", "Train a GAN; writes checkpoints, the training log and per-epoch reports"},
        {"sweep", "Grid over hidden layers x learning rate x regularizer"},
        {"sample", "Draw artificial rows from a checkpoint"},
        {"eval", "Evaluation report for a checkpoint"},
        {"augment-train", "Composed-circuit delay prediction with and without artificial rows"},
        {"report", "Density histograms of training and generated data"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", flags.config, "Pipeline TOML file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", flags.seed, "Root seed override");
        sub->add_option("--epochs", flags.epochs, "GAN epoch override");
        sub->add_option("--out", flags.out, "Output directory override");
        sub->add_option("--checkpoint", flags.checkpoint, "GAN checkpoint for sample/eval/report");
        sub->add_option("--jobs", flags.jobs, "Parallel sweep cells")->check(CLI::PositiveNumber);
        sub->add_flag("-v,--verbose", flags.verbose, "Progress logging");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    circaug::set_log_level(flags.verbose ? circaug::LogLevel::info : circaug::LogLevel::warning);
    const std::string subcommand = app.get_subcommands().front()->get_name();
    try {
        return run(subcommand, flags);
    } catch (const circaug::ParseError& e) {
        std::cerr << "circuit-augmentor: config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "circuit-augmentor: " << subcommand << " failed: " << e.what() << '\n';
        return 1;
    }
}
