#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lindec/dataset.hpp"
#include "lindec/metrics.hpp"
#include "lindec/mlp.hpp"
#include "lindec/surrogate.hpp"

namespace lindec {

struct SyntheticSpec {
    std::size_t n = 0;
    double noise_std = 0.0;
    double x_min = 0.0;
    double x_max = 0.0;
    std::uint64_t seed = 0;
};

struct CsvSpec {
    std::string path;
    ColumnSchema schema;
};

using DatasetSpec = std::variant<SyntheticSpec, CsvSpec>;

struct HoldoutSplitSpec {
    double test_fraction = 0.2;
};

struct QuantileShiftSpec {
    std::string feature;
    double low_q = 0.1;
    double high_q = 0.9;
    double iid_test_fraction = 0.2;
};

using SplitSpec = std::variant<HoldoutSplitSpec, QuantileShiftSpec>;

struct ExperimentConfig {
    DatasetSpec dataset;
    MlpArchitecture architecture; // input_dim 0 means "infer from the data"
    TrainConfig training;         // seed field is overwritten per run seed
    SplitSpec split;
    std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};

    void validate() const;
};

struct SeedTrainSummary {
    std::uint64_t seed = 0;
    double final_train_loss = 0.0;
    std::size_t epochs = 0;
};

/// Per-domain results across seeds plus their field-wise aggregates.
struct DomainResult {
    std::string label; // "Test" | "IID" | "Tail-L" | "Tail-R"
    std::vector<EvalResult> per_seed;
    EvalResult mean;
    EvalResult stddev;
};

struct Provenance {
    std::string timestamp;   // ISO 8601 UTC; the only non-reproducible field
    std::string config_hash; // FNV-1a of the canonical config document
};

struct ExperimentReport {
    std::string config_echo; // canonical JSON text of the config
    std::vector<DomainResult> domains;
    std::vector<SeedTrainSummary> training;
    Provenance provenance;
};

/// First-seed models and standardized evaluation partitions, kept for plot
/// emission and optional model dumps.
struct DomainArtifacts {
    std::string label;
    Dataset eval_set; // standardized features, raw-unit target
};

struct RunArtifacts {
    std::uint64_t seed = 0;
    LinearModel baseline;
    MlpModel network;
    LinearModel surrogate;
    std::vector<DomainArtifacts> domains;
    std::vector<std::string> feature_names;
};

/// Field-wise arithmetic mean and population standard deviation.
std::pair<EvalResult, EvalResult> aggregate(const std::vector<EvalResult>& per_seed);

/// Plain holdout protocol: per seed, split -> standardize on train ->
/// fit baseline / train network / fit surrogate -> evaluate on the test
/// partition. One "Test" domain.
ExperimentReport run_standard(const ExperimentConfig& cfg, RunArtifacts* artifacts = nullptr);

/// Distribution-shift protocol: quantile banding of one feature (data-
/// determined, identical across seeds), per-seed train/IID split of the
/// middle band, evaluation on IID, Tail-L and Tail-R.
ExperimentReport run_shift(const ExperimentConfig& cfg, RunArtifacts* artifacts = nullptr);

/// Dispatches on the split spec.
ExperimentReport run_experiment(const ExperimentConfig& cfg, RunArtifacts* artifacts = nullptr);

/// Builds the dataset named by the spec (generates or loads).
Dataset materialize_dataset(const DatasetSpec& spec);

/// Concurrency cap for per-seed pipelines: LINDEC_THREADS, 0 or unset = auto.
std::size_t seed_thread_cap();

} // namespace lindec
