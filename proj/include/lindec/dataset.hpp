#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lindec/linalg.hpp"

namespace lindec {

/// Feature matrix plus target vector; the empirical sample every model in
/// this project trains and evaluates on.
struct Dataset {
    Matrix features;                        // n x d
    Vector target;                          // n, task units
    std::vector<std::string> feature_names; // length d
    std::string target_name;

    std::size_t size() const { return features.rows(); }
    std::size_t dim() const { return features.cols(); }

    // Throws if rows/names are inconsistent.
    void validate() const;

    // Dataset restricted to the given rows (in the given order).
    Dataset select_rows(const std::vector<std::size_t>& rows) const;

    std::size_t feature_index(const std::string& name) const; // SchemaError if unknown
};

enum class ColumnKind { Numeric, Categorical, Target, Drop };

struct ColumnSpec {
    std::string name;
    ColumnKind kind;
};

/// Per-column roles for CSV ingestion. Exactly one column must be the target.
class ColumnSchema {
public:
    ColumnSchema() = default;
    explicit ColumnSchema(std::vector<ColumnSpec> columns); // validates

    const std::vector<ColumnSpec>& columns() const { return columns_; }
    const std::string& target_name() const { return target_name_; }

private:
    std::vector<ColumnSpec> columns_;
    std::string target_name_;
};

/// Per-feature (mean, std) fit on a training partition. Columns with zero
/// spread keep std = 1 so their transform is the constant zero.
struct Standardizer {
    Vector means;
    Vector stds;
};

/// Quantile-band partition of a dataset for distribution-shift evaluation:
/// tails below/above the low/high empirical quantiles of one feature, with
/// the middle band split into train and IID test rows.
struct ShiftSplit {
    Dataset train;
    Dataset iid_test;
    Dataset tail_low;
    Dataset tail_high;
    std::string split_feature;
    double low_q = 0.0;
    double high_q = 0.0;
};

/// y = x*sin(x) + noise_std * N(0,1), x uniform on [x_min, x_max).
/// Deterministic given seed.
Dataset generate_synthetic(std::size_t n, double noise_std, double x_min, double x_max,
                           std::uint64_t seed);

/// Reads a comma-delimited UTF-8 file with one header row. Numeric columns
/// pass through; categorical columns are one-hot expanded with the first
/// (lexicographically smallest) level dropped; rows with missing or
/// unparseable cells are hard errors.
Dataset load_csv(const std::string& path, const ColumnSchema& schema);

/// Feature columns plus target, with header. Inverse of load_csv for
/// all-numeric data.
void write_dataset_csv(const Dataset& d, const std::string& path);

Standardizer fit_standardizer(const Dataset& d);
Dataset apply_standardizer(const Standardizer& s, const Dataset& d);
Dataset invert_standardizer(const Standardizer& s, const Dataset& d);

/// Seeded shuffle, then partition into (train, test) with
/// round(n * test_fraction) test rows (clamped so both parts are non-empty
/// whenever n >= 2).
std::pair<Dataset, Dataset> train_test_split(const Dataset& d, double test_fraction,
                                             std::uint64_t seed);

/// Rank-based quantile banding on one feature. The bottom ceil(low_q*n) and
/// top n-ceil(high_q*n) rows (stable order) form the tails; duplicates of a
/// boundary value are pushed into the middle band, so an all-constant
/// feature leaves the tails empty, which is an error. The middle band is
/// split into train/iid_test with the given fraction and seed; the banding
/// itself depends only on the data.
ShiftSplit quantile_shift_split(const Dataset& d, const std::string& feature, double low_q,
                                double high_q, double iid_test_fraction, std::uint64_t seed);

} // namespace lindec
