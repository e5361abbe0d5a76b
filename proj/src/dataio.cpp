#include "circaug/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include <toml.hpp>

#include "circaug/error.hpp"
#include "circaug/log.hpp"

namespace circaug {

std::string_view to_string(FeatureRole role) {
    return role == FeatureRole::simulator_input ? "simulator_input" : "simulator_output";
}

FeatureRole parse_feature_role(std::string_view text) {
    if (text == "simulator_input" || text == "input") return FeatureRole::simulator_input;
    if (text == "simulator_output" || text == "output") return FeatureRole::simulator_output;
    throw ValidationError("unknown feature role '" + std::string(text) + "'");
}

FeatureSchema::FeatureSchema(std::vector<Feature> features) : features_(std::move(features)) {
    std::set<std::string> seen;
    bool has_input = false;
    bool has_output = false;
    for (const auto& f : features_) {
        if (f.name.empty()) throw ValidationError("schema: empty feature name");
        if (!seen.insert(f.name).second) throw ValidationError("schema: duplicate feature name '" + f.name + "'");
        has_input |= f.role == FeatureRole::simulator_input;
        has_output |= f.role == FeatureRole::simulator_output;
    }
    if (!has_input) throw ValidationError("schema: needs at least one simulator_input feature");
    if (!has_output) throw ValidationError("schema: needs at least one simulator_output feature");
}

std::optional<std::size_t> FeatureSchema::find(std::string_view name) const {
    for (std::size_t i = 0; i < features_.size(); ++i)
        if (features_[i].name == name) return i;
    return std::nullopt;
}

std::size_t FeatureSchema::index_of(std::string_view name) const {
    if (auto i = find(name)) return *i;
    throw ValidationError("unknown feature '" + std::string(name) + "'");
}

std::vector<std::size_t> FeatureSchema::input_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < features_.size(); ++i)
        if (features_[i].role == FeatureRole::simulator_input) out.push_back(i);
    return out;
}

std::vector<std::size_t> FeatureSchema::output_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < features_.size(); ++i)
        if (features_[i].role == FeatureRole::simulator_output) out.push_back(i);
    return out;
}

std::vector<bool> FeatureSchema::categorical_mask() const {
    std::vector<bool> out(features_.size());
    for (std::size_t i = 0; i < features_.size(); ++i) out[i] = features_[i].categorical;
    return out;
}

FeatureSchema parse_schema(std::string_view toml_text, const std::string& source_name) {
    toml::table doc;
    try {
        doc = toml::parse(toml_text, source_name);
    } catch (const toml::parse_error& e) {
        throw ParseError(source_name, e.source().begin.line, std::string(e.description()));
    }
    const auto* list = doc["feature"].as_array();
    if (list == nullptr) throw ParseError(source_name, 0, "missing [[feature]] entries");
    std::vector<Feature> features;
    for (const auto& node : *list) {
        const auto* tbl = node.as_table();
        const std::size_t line = node.source().begin.line;
        if (tbl == nullptr) throw ParseError(source_name, line, "feature entry is not a table");
        Feature f;
        auto name = (*tbl)["name"].value<std::string>();
        auto role = (*tbl)["role"].value<std::string>();
        if (!name) throw ParseError(source_name, line, "feature without name");
        if (!role) throw ParseError(source_name, line, "feature '" + *name + "' without role");
        f.name = *name;
        try {
            f.role = parse_feature_role(*role);
        } catch (const ValidationError& e) {
            throw ParseError(source_name, line, e.what());
        }
        f.unit = (*tbl)["unit"].value_or(std::string{});
        f.categorical = (*tbl)["categorical"].value_or(false);
        features.push_back(std::move(f));
    }
    try {
        return FeatureSchema(std::move(features));
    } catch (const ValidationError& e) {
        throw ParseError(source_name, 0, e.what());
    }
}

FeatureSchema load_schema(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, "cannot open schema file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_schema(ss.str(), path.string());
}

std::string schema_to_toml(const FeatureSchema& schema) {
    std::ostringstream out;
    out << "version = 1\n";
    for (const auto& f : schema.features()) {
        out << "\n[[feature]]\n";
        out << "name = \"" << f.name << "\"\n";
        out << "role = \"" << to_string(f.role) << "\"\n";
        out << "unit = \"" << f.unit << "\"\n";
        out << "categorical = " << (f.categorical ? "true" : "false") << "\n";
    }
    return out.str();
}

void save_schema(const FeatureSchema& schema, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError(path.string(), 0, "cannot write schema file");
    out << schema_to_toml(schema);
}

Dataset::Dataset(FeatureSchema s, Matrix r) : schema(std::move(s)), rows(std::move(r)) {
    if (rows.rows() > 0 && rows.cols() != schema.size()) {
        throw ValidationError("dataset has " + std::to_string(rows.cols()) + " columns but schema lists " +
                              std::to_string(schema.size()));
    }
    if (rows.rows() == 0) rows = Matrix(0, schema.size());
    require_finite(rows, "dataset");
}

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::optional<double> parse_number(std::string_view cell) {
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    double value = 0.0;
    auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) return std::nullopt;
    return value;
}

std::optional<double> parse_corner(std::string_view cell) {
    for (int i = 0; i < kCornerCount; ++i)
        if (cell == kCornerNames[i]) return static_cast<double>(i);
    return std::nullopt;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& csv_path, const std::filesystem::path& schema_path) {
    return load_csv(csv_path, load_schema(schema_path));
}

Dataset load_csv(const std::filesystem::path& csv_path, const FeatureSchema& schema) {
    const std::string file = csv_path.string();
    std::ifstream in(csv_path);
    if (!in) throw ParseError(file, 0, "cannot open CSV file");

    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError(file, 1, "missing header row");
    ++line_no;
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    const auto header = split_commas(line);

    // column_of[schema index] = CSV column
    std::vector<std::size_t> column_of(schema.size(), SIZE_MAX);
    for (std::size_t c = 0; c < header.size(); ++c) {
        auto idx = schema.find(header[c]);
        if (!idx) throw ParseError(file, 1, "unexpected column '" + std::string(header[c]) + "'");
        if (column_of[*idx] != SIZE_MAX) throw ParseError(file, 1, "duplicate column '" + std::string(header[c]) + "'");
        column_of[*idx] = c;
    }
    for (std::size_t i = 0; i < schema.size(); ++i)
        if (column_of[i] == SIZE_MAX) throw ParseError(file, 1, "missing column '" + schema[i].name + "'");

    std::vector<double> values;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_commas(line);
        if (cells.size() != header.size()) {
            throw ParseError(file, line_no,
                             "expected " + std::to_string(header.size()) + " cells, found " + std::to_string(cells.size()));
        }
        for (std::size_t i = 0; i < schema.size(); ++i) {
            const std::string_view cell = cells[column_of[i]];
            std::optional<double> v;
            if (schema[i].categorical) v = parse_corner(cell);
            if (!v) v = parse_number(cell);
            if (!v) {
                throw ParseError(file, line_no, "column '" + schema[i].name + "': cannot parse '" + std::string(cell) + "'");
            }
            if (!std::isfinite(*v)) {
                throw ParseError(file, line_no, "column '" + schema[i].name + "': non-finite value");
            }
            values.push_back(*v);
        }
        ++n;
    }
    return Dataset(schema, Matrix(n, schema.size(), std::move(values)));
}

std::string to_csv(const Dataset& data) {
    std::string out;
    for (std::size_t i = 0; i < data.schema.size(); ++i) {
        if (i) out += ',';
        out += data.schema[i].name;
    }
    out += '\n';
    for (std::size_t r = 0; r < data.size(); ++r) {
        for (std::size_t i = 0; i < data.schema.size(); ++i) {
            if (i) out += ',';
            const double v = data.rows(r, i);
            const double code = std::round(v);
            if (data.schema[i].categorical && v == code && code >= 0 && code < kCornerCount) {
                out += kCornerNames[static_cast<int>(code)];
            } else {
                out += format_double(v);
            }
        }
        out += '\n';
    }
    return out;
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError(path.string(), 0, "cannot write CSV file");
    out << to_csv(data);
}

Dataset concat(const Dataset& a, const Dataset& b) {
    if (!(a.schema == b.schema)) throw ValidationError("concat: schemas differ");
    std::vector<double> values(a.rows.storage());
    values.insert(values.end(), b.rows.storage().begin(), b.rows.storage().end());
    return Dataset(a.schema, Matrix(a.size() + b.size(), a.schema.size(), std::move(values)));
}

Dataset select_rows(const Dataset& data, std::span<const std::size_t> indices) {
    Matrix out(indices.size(), data.schema.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= data.size()) throw ValidationError("select_rows: index out of range");
        auto src = data.rows.row(indices[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return Dataset(data.schema, std::move(out));
}

MinMaxScaler MinMaxScaler::fit(const Dataset& data) { return fit(data.rows, data.schema.categorical_mask()); }

MinMaxScaler MinMaxScaler::fit(const Matrix& rows, std::vector<bool> categorical) {
    if (rows.rows() == 0 || rows.cols() == 0) throw ValidationError("scaler: cannot fit on empty data");
    require_finite(rows, "scaler input");
    if (categorical.empty()) categorical.assign(rows.cols(), false);
    if (categorical.size() != rows.cols()) throw ValidationError("scaler: categorical mask length mismatch");
    std::vector<double> lo(rows.cols(), INFINITY);
    std::vector<double> hi(rows.cols(), -INFINITY);
    for (std::size_t r = 0; r < rows.rows(); ++r)
        for (std::size_t c = 0; c < rows.cols(); ++c) {
            lo[c] = std::min(lo[c], rows(r, c));
            hi[c] = std::max(hi[c], rows(r, c));
        }
    return from_bounds(std::move(lo), std::move(hi), std::move(categorical));
}

MinMaxScaler MinMaxScaler::from_bounds(std::vector<double> min, std::vector<double> max, std::vector<bool> categorical) {
    if (min.size() != max.size() || categorical.size() != min.size()) {
        throw ValidationError("scaler: bound vectors differ in length");
    }
    for (std::size_t i = 0; i < min.size(); ++i) {
        if (!std::isfinite(min[i]) || !std::isfinite(max[i]) || max[i] < min[i]) {
            throw ValidationError("scaler: invalid bounds for feature " + std::to_string(i));
        }
    }
    MinMaxScaler s;
    s.fitted_ = true;
    s.min_ = std::move(min);
    s.max_ = std::move(max);
    s.categorical_ = std::move(categorical);
    return s;
}

void MinMaxScaler::require_fitted(std::size_t cols) const {
    if (!fitted_) throw ValidationError("scaler used before fit");
    if (cols != min_.size()) {
        throw ValidationError("scaler fitted on " + std::to_string(min_.size()) + " features, got " +
                              std::to_string(cols));
    }
}

double MinMaxScaler::transform_value(std::size_t f, double x) const {
    if (max_[f] == min_[f]) return 0.0;
    return 2.0 * (x - min_[f]) / (max_[f] - min_[f]) - 1.0;
}

double MinMaxScaler::inverse_value(std::size_t f, double s) const {
    if (max_[f] == min_[f]) return min_[f];
    double x = min_[f] + (s + 1.0) * 0.5 * (max_[f] - min_[f]);
    if (categorical_[f]) x = std::clamp(std::round(x), min_[f], max_[f]);
    return x;
}

Matrix MinMaxScaler::transform(const Matrix& rows) const {
    require_fitted(rows.cols());
    Matrix out(rows.rows(), rows.cols());
    std::size_t clamped = 0;
    for (std::size_t r = 0; r < rows.rows(); ++r)
        for (std::size_t c = 0; c < rows.cols(); ++c) {
            double s = transform_value(c, rows(r, c));
            if (s < -1.0 || s > 1.0) {
                s = std::clamp(s, -1.0, 1.0);
                ++clamped;
            }
            out(r, c) = s;
        }
    if (clamped > 0) log_warning("scaler: clamped " + std::to_string(clamped) + " out-of-range values to [-1, 1]");
    return out;
}

Matrix MinMaxScaler::inverse_transform(const Matrix& scaled) const {
    require_fitted(scaled.cols());
    Matrix out(scaled.rows(), scaled.cols());
    for (std::size_t r = 0; r < scaled.rows(); ++r)
        for (std::size_t c = 0; c < scaled.cols(); ++c) out(r, c) = inverse_value(c, scaled(r, c));
    return out;
}

std::pair<Dataset, Dataset> split(const Dataset& data, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw ValidationError("split: test_fraction must lie in (0, 1)");
    }
    const std::size_t n = data.size();
    if (n < 2) throw ValidationError("split: need at least 2 rows");
    std::size_t n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
    n_test = std::clamp<std::size_t>(n_test, 1, n - 1);

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng = make_stream(seed, "split");
    std::shuffle(perm.begin(), perm.end(), rng);

    std::vector<std::size_t> test_idx(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
    std::vector<std::size_t> train_idx(perm.begin() + static_cast<std::ptrdiff_t>(n_test), perm.end());
    std::sort(test_idx.begin(), test_idx.end());
    std::sort(train_idx.begin(), train_idx.end());
    return {select_rows(data, train_idx), select_rows(data, test_idx)};
}

}  // namespace circaug
