#include "lindec/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

#include "lindec/errors.hpp"
#include "lindec/rng.hpp"

namespace lindec {

void Dataset::validate() const {
    if (features.rows() != target.size()) {
        throw ShapeError("Dataset: " + std::to_string(features.rows()) + " feature rows vs " +
                         std::to_string(target.size()) + " targets");
    }
    if (feature_names.size() != features.cols()) {
        throw ShapeError("Dataset: " + std::to_string(feature_names.size()) + " names for " +
                         std::to_string(features.cols()) + " columns");
    }
}

Dataset Dataset::select_rows(const std::vector<std::size_t>& rows) const {
    Matrix f(rows.size(), features.cols(), 0.0);
    Vector t(rows.size(), 0.0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto src = features.row(rows[i]);
        std::copy(src.begin(), src.end(), f.row(i).begin());
        t[i] = target[rows[i]];
    }
    return Dataset{std::move(f), std::move(t), feature_names, target_name};
}

std::size_t Dataset::feature_index(const std::string& name) const {
    const auto it = std::find(feature_names.begin(), feature_names.end(), name);
    if (it == feature_names.end()) {
        throw SchemaError("unknown feature '" + name + "'");
    }
    return static_cast<std::size_t>(it - feature_names.begin());
}

ColumnSchema::ColumnSchema(std::vector<ColumnSpec> columns) : columns_(std::move(columns)) {
    std::size_t targets = 0;
    for (const auto& c : columns_) {
        if (c.name.empty()) throw SchemaError("schema column with empty name");
        if (c.kind == ColumnKind::Target) {
            ++targets;
            target_name_ = c.name;
        }
    }
    if (targets != 1) {
        throw SchemaError("schema must declare exactly one target column, got " +
                          std::to_string(targets));
    }
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        for (std::size_t j = i + 1; j < columns_.size(); ++j) {
            if (columns_[i].name == columns_[j].name) {
                throw SchemaError("duplicate schema column '" + columns_[i].name + "'");
            }
        }
    }
}

Dataset generate_synthetic(std::size_t n, double noise_std, double x_min, double x_max,
                           std::uint64_t seed) {
    if (n < 1) throw ParameterError("generate_synthetic: n must be >= 1");
    if (noise_std < 0.0) throw ParameterError("generate_synthetic: noise_std must be >= 0");
    if (!(x_min < x_max)) throw ParameterError("generate_synthetic: x_min must be < x_max");

    Rng rng(seed);
    Matrix x(n, 1, 0.0);
    Vector y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = rng.uniform(x_min, x_max);
        const double z = rng.gaussian(); // drawn regardless of noise_std so the
                                         // x stream is independent of it
        x(i, 0) = xi;
        y[i] = xi * std::sin(xi) + noise_std * z;
    }
    return Dataset{std::move(x), std::move(y), {"x"}, "y"};
}

namespace {

std::string trim_cell(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
    std::size_t start = 0;
    while (start < s.size() && (s[start] == ' ' || s[start] == '\t')) ++start;
    s.erase(0, start);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        s = s.substr(1, s.size() - 2);
    }
    return s;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(trim_cell(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    cells.push_back(trim_cell(cur));
    return cells;
}

double parse_numeric_cell(const std::string& cell, std::size_t data_row, const std::string& col) {
    if (cell.empty()) {
        throw ParseError("missing value at data row " + std::to_string(data_row) + ", column '" +
                         col + "'");
    }
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
        throw ParseError("non-numeric value '" + cell + "' at data row " +
                         std::to_string(data_row) + ", column '" + col + "'");
    }
    return value;
}

} // namespace

Dataset load_csv(const std::string& path, const ColumnSchema& schema) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open CSV file '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw ParseError("CSV file '" + path + "' has no header row");
    const std::vector<std::string> header = split_line(line);

    // Resolve every schema column against the header; both directions must match.
    std::map<std::string, std::size_t> header_pos;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header_pos.count(header[i])) {
            throw SchemaError("duplicate header column '" + header[i] + "' in '" + path + "'");
        }
        header_pos[header[i]] = i;
    }
    std::vector<std::size_t> col_of_spec(schema.columns().size());
    for (std::size_t s = 0; s < schema.columns().size(); ++s) {
        const auto it = header_pos.find(schema.columns()[s].name);
        if (it == header_pos.end()) {
            throw SchemaError("column '" + schema.columns()[s].name + "' missing from header of '" +
                              path + "'");
        }
        col_of_spec[s] = it->second;
    }
    for (const auto& h : header) {
        const bool covered = std::any_of(schema.columns().begin(), schema.columns().end(),
                                         [&](const ColumnSpec& c) { return c.name == h; });
        if (!covered) {
            throw SchemaError("header column '" + h + "' not covered by schema; declare it "
                              "(kind 'drop' to ignore)");
        }
    }

    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        auto cells = split_line(line);
        if (cells.size() != header.size()) {
            throw ParseError("data row " + std::to_string(rows.size() + 1) + " has " +
                             std::to_string(cells.size()) + " cells, header has " +
                             std::to_string(header.size()));
        }
        rows.push_back(std::move(cells));
    }

    // Categorical level sets, sorted so one-hot layout is deterministic.
    std::vector<std::vector<std::string>> levels(schema.columns().size());
    for (std::size_t s = 0; s < schema.columns().size(); ++s) {
        if (schema.columns()[s].kind != ColumnKind::Categorical) continue;
        std::set<std::string> seen;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const std::string& cell = rows[r][col_of_spec[s]];
            if (cell.empty()) {
                throw ParseError("missing value at data row " + std::to_string(r + 1) +
                                 ", column '" + schema.columns()[s].name + "'");
            }
            seen.insert(cell);
        }
        levels[s].assign(seen.begin(), seen.end());
    }

    // Output layout: schema order, one column per numeric feature, k-1 per
    // categorical (first level dropped).
    std::vector<std::string> feature_names;
    for (std::size_t s = 0; s < schema.columns().size(); ++s) {
        const auto& spec = schema.columns()[s];
        if (spec.kind == ColumnKind::Numeric) {
            feature_names.push_back(spec.name);
        } else if (spec.kind == ColumnKind::Categorical) {
            for (std::size_t l = 1; l < levels[s].size(); ++l) {
                feature_names.push_back(spec.name + "=" + levels[s][l]);
            }
        }
    }

    Matrix features(rows.size(), feature_names.size(), 0.0);
    Vector target(rows.size(), 0.0);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::size_t out = 0;
        for (std::size_t s = 0; s < schema.columns().size(); ++s) {
            const auto& spec = schema.columns()[s];
            const std::string& cell = rows[r][col_of_spec[s]];
            switch (spec.kind) {
                case ColumnKind::Numeric:
                    features(r, out++) = parse_numeric_cell(cell, r + 1, spec.name);
                    break;
                case ColumnKind::Categorical:
                    for (std::size_t l = 1; l < levels[s].size(); ++l) {
                        features(r, out++) = (cell == levels[s][l]) ? 1.0 : 0.0;
                    }
                    break;
                case ColumnKind::Target:
                    target[r] = parse_numeric_cell(cell, r + 1, spec.name);
                    break;
                case ColumnKind::Drop:
                    break;
            }
        }
    }

    Dataset d{std::move(features), std::move(target), std::move(feature_names),
              schema.target_name()};
    d.validate();
    return d;
}

void write_dataset_csv(const Dataset& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    for (std::size_t c = 0; c < d.feature_names.size(); ++c) {
        out << d.feature_names[c] << ',';
    }
    out << d.target_name << '\n';
    char buf[64];
    for (std::size_t r = 0; r < d.size(); ++r) {
        for (std::size_t c = 0; c < d.dim(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", d.features(r, c));
            out << buf << ',';
        }
        std::snprintf(buf, sizeof buf, "%.17g", d.target[r]);
        out << buf << '\n';
    }
    if (!out) throw IoError("write to '" + path + "' failed");
}

Standardizer fit_standardizer(const Dataset& d) {
    const std::size_t n = d.size();
    const std::size_t cols = d.dim();
    if (n == 0) throw EmptyDataError("fit_standardizer: empty dataset");
    Standardizer s;
    s.means.assign(cols, 0.0);
    s.stds.assign(cols, 1.0);
    for (std::size_t c = 0; c < cols; ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < n; ++r) sum += d.features(r, c);
        const double mean = sum / static_cast<double>(n);
        double sq = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double dev = d.features(r, c) - mean;
            sq += dev * dev;
        }
        const double var = sq / static_cast<double>(n); // population variance
        s.means[c] = mean;
        s.stds[c] = var > 0.0 ? std::sqrt(var) : 1.0; // constant column guard
    }
    return s;
}

namespace {

void check_standardizer_shape(const Standardizer& s, const Dataset& d, const char* what) {
    if (s.means.size() != d.dim() || s.stds.size() != d.dim()) {
        throw ShapeError(std::string(what) + ": standardizer has " +
                         std::to_string(s.means.size()) + " columns, dataset has " +
                         std::to_string(d.dim()));
    }
}

} // namespace

Dataset apply_standardizer(const Standardizer& s, const Dataset& d) {
    check_standardizer_shape(s, d, "apply_standardizer");
    Dataset out = d;
    for (std::size_t r = 0; r < out.size(); ++r) {
        for (std::size_t c = 0; c < out.dim(); ++c) {
            out.features(r, c) = (out.features(r, c) - s.means[c]) / s.stds[c];
        }
    }
    return out;
}

Dataset invert_standardizer(const Standardizer& s, const Dataset& d) {
    check_standardizer_shape(s, d, "invert_standardizer");
    Dataset out = d;
    for (std::size_t r = 0; r < out.size(); ++r) {
        for (std::size_t c = 0; c < out.dim(); ++c) {
            out.features(r, c) = out.features(r, c) * s.stds[c] + s.means[c];
        }
    }
    return out;
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& d, double test_fraction,
                                             std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw ParameterError("train_test_split: test_fraction must be in (0, 1)");
    }
    const std::size_t n = d.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(idx);

    std::size_t test_n = static_cast<std::size_t>(
        std::llround(static_cast<double>(n) * test_fraction));
    if (n >= 2) {
        test_n = std::clamp<std::size_t>(test_n, 1, n - 1);
    } else {
        test_n = 0;
    }
    const std::vector<std::size_t> train_idx(idx.begin(), idx.end() - static_cast<long>(test_n));
    const std::vector<std::size_t> test_idx(idx.end() - static_cast<long>(test_n), idx.end());
    return {d.select_rows(train_idx), d.select_rows(test_idx)};
}

ShiftSplit quantile_shift_split(const Dataset& d, const std::string& feature, double low_q,
                                double high_q, double iid_test_fraction, std::uint64_t seed) {
    if (!(low_q > 0.0 && low_q < high_q && high_q < 1.0)) {
        throw ParameterError("quantile_shift_split: need 0 < low_q < high_q < 1");
    }
    const std::size_t col = d.feature_index(feature); // SchemaError if unknown
    const std::size_t n = d.size();
    if (n == 0) throw EmptyDataError("quantile_shift_split: empty dataset");

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return d.features(a, col) < d.features(b, col);
    });
    const auto value_at = [&](std::size_t rank) { return d.features(idx[rank], col); };

    // Empirical quantile by rank = ceil(q*n), with a guard against the
    // product landing a hair above an integer.
    const auto rank_of = [n](double q) {
        return static_cast<std::size_t>(std::ceil(q * static_cast<double>(n) - 1e-9));
    };
    std::size_t high_start = rank_of(high_q);
    while (high_start < n && high_start > 0 && value_at(high_start) == value_at(high_start - 1)) {
        ++high_start; // boundary duplicates stay in the middle band
    }
    if (high_start >= n) {
        throw ParameterError("quantile_shift_split: upper tail of '" + feature +
                             "' is empty (quantile band degenerate)");
    }
    std::size_t low_end = rank_of(low_q);
    while (low_end > 0 && value_at(low_end - 1) == value_at(low_end)) {
        --low_end;
    }
    if (low_end == 0) {
        throw ParameterError("quantile_shift_split: lower tail of '" + feature +
                             "' is empty (quantile band degenerate)");
    }

    const std::vector<std::size_t> low_idx(idx.begin(), idx.begin() + static_cast<long>(low_end));
    const std::vector<std::size_t> mid_idx(idx.begin() + static_cast<long>(low_end),
                                           idx.begin() + static_cast<long>(high_start));
    const std::vector<std::size_t> high_idx(idx.begin() + static_cast<long>(high_start),
                                            idx.end());

    const Dataset middle = d.select_rows(mid_idx);
    Dataset train;
    Dataset iid_test;
    if (middle.size() == 0) {
        train = middle;
        iid_test = middle;
    } else {
        std::tie(train, iid_test) = train_test_split(middle, iid_test_fraction, seed);
    }

    return ShiftSplit{std::move(train),          std::move(iid_test),
                      d.select_rows(low_idx),    d.select_rows(high_idx),
                      feature,                   low_q,
                      high_q};
}

} // namespace lindec
