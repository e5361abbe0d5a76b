#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "circaug/linalg.hpp"

namespace circaug {

enum class FeatureRole { simulator_input, simulator_output };

std::string_view to_string(FeatureRole role);
FeatureRole parse_feature_role(std::string_view text);

struct Feature {
    std::string name;
    FeatureRole role = FeatureRole::simulator_input;
    std::string unit;
    bool categorical = false;

    friend bool operator==(const Feature&, const Feature&) = default;
};

/// Ordered feature list; column i of a dataset is features[i].
class FeatureSchema {
public:
    FeatureSchema() = default;
    /// Validates: unique names, at least one input and one output.
    explicit FeatureSchema(std::vector<Feature> features);

    const std::vector<Feature>& features() const noexcept { return features_; }
    std::size_t size() const noexcept { return features_.size(); }
    const Feature& operator[](std::size_t i) const { return features_[i]; }

    std::optional<std::size_t> find(std::string_view name) const;
    /// Throws ValidationError if absent.
    std::size_t index_of(std::string_view name) const;

    std::vector<std::size_t> input_indices() const;
    std::vector<std::size_t> output_indices() const;
    std::vector<bool> categorical_mask() const;

    friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;

private:
    std::vector<Feature> features_;
};

FeatureSchema load_schema(const std::filesystem::path& path);
FeatureSchema parse_schema(std::string_view toml_text, const std::string& source_name = "<schema>");
std::string schema_to_toml(const FeatureSchema& schema);
void save_schema(const FeatureSchema& schema, const std::filesystem::path& path);

/// Rows in physical units; column count equals the schema length.
struct Dataset {
    FeatureSchema schema;
    Matrix rows;

    Dataset() = default;
    /// Validates column count and finiteness.
    Dataset(FeatureSchema schema, Matrix rows);

    std::size_t size() const noexcept { return rows.rows(); }
    bool empty() const noexcept { return rows.rows() == 0; }
};

/// Process corner codes used for categorical cells.
inline constexpr std::string_view kCornerNames[] = {"TT", "FF", "SS", "FS", "SF"};
inline constexpr int kCornerCount = 5;

Dataset load_csv(const std::filesystem::path& csv_path, const std::filesystem::path& schema_path);
Dataset load_csv(const std::filesystem::path& csv_path, const FeatureSchema& schema);
std::string to_csv(const Dataset& data);
void save_csv(const Dataset& data, const std::filesystem::path& path);

/// Shortest round-trip text for a double.
std::string format_double(double x);

/// Concatenate rows of datasets sharing a schema.
Dataset concat(const Dataset& a, const Dataset& b);
Dataset select_rows(const Dataset& data, std::span<const std::size_t> indices);

/// Per-feature min-max map onto [-1, 1].
class MinMaxScaler {
public:
    static MinMaxScaler fit(const Dataset& data);
    static MinMaxScaler fit(const Matrix& rows, std::vector<bool> categorical = {});
    static MinMaxScaler from_bounds(std::vector<double> min, std::vector<double> max, std::vector<bool> categorical);

    bool fitted() const noexcept { return fitted_; }
    std::size_t dims() const noexcept { return min_.size(); }
    const std::vector<double>& min() const noexcept { return min_; }
    const std::vector<double>& max() const noexcept { return max_; }
    const std::vector<bool>& categorical() const noexcept { return categorical_; }
    bool degenerate(std::size_t feature) const { return max_.at(feature) == min_.at(feature); }

    /// Out-of-range values are clamped to [-1, 1] with one warning per call.
    Matrix transform(const Matrix& rows) const;
    /// Categorical features are rounded to the nearest valid code.
    Matrix inverse_transform(const Matrix& scaled) const;

    double transform_value(std::size_t feature, double x) const;
    double inverse_value(std::size_t feature, double s) const;

private:
    void require_fitted(std::size_t cols) const;

    bool fitted_ = false;
    std::vector<double> min_;
    std::vector<double> max_;
    std::vector<bool> categorical_;
};

/// Deterministic shuffle split. Both parts are non-empty.
std::pair<Dataset, Dataset> split(const Dataset& data, double test_fraction, std::uint64_t seed);

}  // namespace circaug
