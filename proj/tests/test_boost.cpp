#include <doctest.h>

#include <cmath>

#include "circaug/boost.hpp"
#include "circaug/error.hpp"

using namespace circaug;

namespace {

Matrix random_features(std::size_t n, std::size_t d, std::uint64_t seed) {
    Rng rng = make_stream(seed, "features");
    Matrix x(n, d);
    for (double& v : x.values()) v = uniform(rng, -1.0, 1.0);
    return x;
}

}  // namespace

TEST_CASE("constant target: a single leaf predicting the constant") {
    const Matrix x = random_features(30, 2, 1);
    const std::vector<double> y(30, 4.5);
    const GbrtModel m = fit_gbrt(x, y, {});
    CHECK(m.constant_target);
    CHECK(predict_gbrt(m, x.row(3)) == doctest::Approx(4.5).epsilon(1e-15));
    for (const auto& t : m.trees) CHECK(t.nodes.size() == 1);
}

TEST_CASE("a step function is recovered with a midpoint threshold") {
    Matrix x(10, 1);
    std::vector<double> y(10);
    for (std::size_t i = 0; i < 10; ++i) {
        x(i, 0) = static_cast<double>(i);
        y[i] = i < 5 ? 0.0 : 1.0;
    }
    GbrtConfig cfg;
    cfg.n_trees = 1;
    cfg.max_depth = 1;
    cfg.min_samples_leaf = 1;
    cfg.learning_rate = 1.0;
    const GbrtModel m = fit_gbrt(x, y, cfg);
    REQUIRE(m.trees.size() == 1);
    const TreeNode& root = m.trees[0].nodes[0];
    CHECK(root.feature == 0);
    CHECK(root.threshold == 4.5);
    const std::vector<double> p = predict_gbrt(m, x);
    for (std::size_t i = 0; i < 10; ++i) CHECK(p[i] == doctest::Approx(y[i]).epsilon(1e-15));
}

TEST_CASE("training MSE never increases with more trees") {
    const Matrix x = random_features(200, 3, 2);
    std::vector<double> y(200);
    for (std::size_t i = 0; i < 200; ++i) y[i] = std::sin(3 * x(i, 0)) + x(i, 1) * x(i, 2);
    for (double lr : {0.05, 0.5, 1.0}) {
        GbrtConfig cfg;
        cfg.n_trees = 60;
        cfg.learning_rate = lr;
        const GbrtModel m = fit_gbrt(x, y, cfg);
        REQUIRE(m.train_mse.size() == 61);
        for (std::size_t k = 1; k < m.train_mse.size(); ++k) CHECK(m.train_mse[k] <= m.train_mse[k - 1] + 1e-12);
    }
}

TEST_CASE("exact fit with one leaf per sample") {
    const std::size_t n = 20;
    const Matrix x = random_features(n, 2, 3);
    std::vector<double> y(n);
    Rng rng = make_stream(3, "y");
    for (double& v : y) v = standard_normal(rng);
    GbrtConfig cfg;
    cfg.n_trees = n;
    cfg.max_depth = 12;
    cfg.min_samples_leaf = 1;
    cfg.learning_rate = 1.0;
    const GbrtModel m = fit_gbrt(x, y, cfg);
    const std::vector<double> p = predict_gbrt(m, x);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(p[i] - y[i]) <= 1e-9);
}

TEST_CASE("trees respect max_depth and min_samples_leaf") {
    const Matrix x = random_features(100, 2, 4);
    std::vector<double> y(100);
    for (std::size_t i = 0; i < 100; ++i) y[i] = x(i, 0) * 3 - x(i, 1);
    GbrtConfig cfg;
    cfg.n_trees = 10;
    cfg.max_depth = 2;
    cfg.min_samples_leaf = 7;
    const GbrtModel m = fit_gbrt(x, y, cfg);
    for (const auto& t : m.trees) {
        CHECK(t.depth() <= 2);
        for (const auto& node : t.nodes)
            if (node.feature < 0) CHECK(node.samples >= 7);
    }
}

TEST_CASE("fitting is deterministic and JSON round-trips exactly") {
    const Matrix x = random_features(80, 3, 5);
    std::vector<double> y(80);
    for (std::size_t i = 0; i < 80; ++i) y[i] = x(i, 0) + 0.5 * x(i, 2);
    const GbrtModel a = fit_gbrt(x, y, {});
    const GbrtModel b = fit_gbrt(x, y, {});
    CHECK(predict_gbrt(a, x) == predict_gbrt(b, x));
    const GbrtModel back = gbrt_from_json(nlohmann::json::parse(to_json(a).dump()));
    CHECK(predict_gbrt(back, x) == predict_gbrt(a, x));

    nlohmann::json broken = to_json(a);
    broken["trees"][0][0]["left"] = 0;
    CHECK_THROWS_AS(gbrt_from_json(broken), ValidationError);
}

TEST_CASE("config validation and input checks") {
    GbrtConfig cfg;
    cfg.learning_rate = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = {};
    cfg.n_trees = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    const std::vector<double> y(3, 1.0);
    CHECK_THROWS_AS(fit_gbrt(Matrix(2, 1), y, {}), ValidationError);
}

TEST_CASE("dataset fit uses simulator inputs and requires an output target") {
    const Dataset d = generate_dataset(GateKind::NAND2, {}, 200, 6);
    const GbrtModel m = fit_gbrt(d, "delay_hl_a", {});
    CHECK(m.feature_names.size() == 15);
    CHECK(m.target == "delay_hl_a");
    CHECK_THROWS_AS(fit_gbrt(d, "vdd", {}), ValidationError);
}

TEST_CASE("augmentation arms coincide when there is no artificial data") {
    const Dataset real = generate_dataset(GateKind::NAND2, {}, 100, 7);
    std::map<GateKind, GateTrainingData> data;
    data[GateKind::NAND2] = {real, Dataset(real.schema, Matrix(0, real.schema.size()))};
    AugmentationConfig cfg;
    cfg.eval_points = 20;
    cfg.gbrt.n_trees = 30;
    const AugmentationRecord r = augmentation_experiment(data, builtin_c17(), cfg);
    CHECK(r.pct_error_real == r.pct_error_augmented);
    CHECK(r.predicted_real_ps == r.predicted_augmented_ps);
    CHECK(r.real_rows == 100);
    CHECK(r.artificial_rows == 0);
    CHECK(r.points.size() == 20);
    CHECK(r.simulated_ps > 0.0);

    const nlohmann::json j = to_json(r);
    for (const char* key : {"simulated_ps", "predicted_real_ps", "predicted_augmented_ps", "pct_error_real",
                            "pct_error_augmented"})
        CHECK(j.contains(key));
}

TEST_CASE("augmentation with oracle rows as artificial data reduces the error") {
    const Dataset real = generate_dataset(GateKind::NAND2, {}, 100, 8);
    const Dataset extra = generate_dataset(GateKind::NAND2, {}, 1000, 9);
    std::map<GateKind, GateTrainingData> data;
    data[GateKind::NAND2] = {real, extra};
    AugmentationConfig cfg;
    cfg.eval_points = 50;
    const AugmentationRecord r = augmentation_experiment(data, builtin_c17(), cfg);
    CHECK(r.pct_error_augmented < r.pct_error_real);

    std::map<GateKind, GateTrainingData> missing;
    CHECK_THROWS_AS(augmentation_experiment(missing, builtin_c17(), cfg), ValidationError);
}
