#include "lindec/experiment.hpp"

#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <exception>
#include <thread>

#include "lindec/config.hpp"
#include "lindec/errors.hpp"
#include "lindec/report.hpp"

namespace lindec {

void ExperimentConfig::validate() const {
    if (seeds.empty()) throw ParameterError("config: seeds list must be non-empty");
    if (architecture.hidden_layers.empty()) {
        throw ParameterError("config: architecture needs at least one hidden layer");
    }
    for (const std::size_t w : architecture.hidden_layers) {
        if (w == 0) throw ParameterError("config: zero-width hidden layer");
    }
    training.validate();
    if (const auto* holdout = std::get_if<HoldoutSplitSpec>(&split)) {
        if (!(holdout->test_fraction > 0.0 && holdout->test_fraction < 1.0)) {
            throw ParameterError("config: test_fraction must be in (0, 1)");
        }
    } else {
        const auto& shift = std::get<QuantileShiftSpec>(split);
        if (!(shift.low_q > 0.0 && shift.low_q < shift.high_q && shift.high_q < 1.0)) {
            throw ParameterError("config: need 0 < low_q < high_q < 1");
        }
        if (!(shift.iid_test_fraction > 0.0 && shift.iid_test_fraction < 1.0)) {
            throw ParameterError("config: iid_test_fraction must be in (0, 1)");
        }
        if (shift.feature.empty()) throw ParameterError("config: shift feature must be named");
    }
}

Dataset materialize_dataset(const DatasetSpec& spec) {
    if (const auto* synth = std::get_if<SyntheticSpec>(&spec)) {
        return generate_synthetic(synth->n, synth->noise_std, synth->x_min, synth->x_max,
                                  synth->seed);
    }
    const auto& csv = std::get<CsvSpec>(spec);
    return load_csv(csv.path, csv.schema);
}

std::size_t seed_thread_cap() {
    const char* env = std::getenv("LINDEC_THREADS");
    std::size_t cap = 0;
    if (env != nullptr && *env != '\0') {
        char* end = nullptr;
        const unsigned long parsed = std::strtoul(env, &end, 10);
        if (end == nullptr || *end != '\0') {
            std::fprintf(stderr, "warning: ignoring non-numeric LINDEC_THREADS='%s'\n", env);
        } else {
            cap = static_cast<std::size_t>(parsed);
        }
    }
    if (cap == 0) {
        cap = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    }
    return cap;
}

std::pair<EvalResult, EvalResult> aggregate(const std::vector<EvalResult>& per_seed) {
    if (per_seed.empty()) throw EmptyDataError("aggregate: empty result list");
    static constexpr std::array fields = {
        &EvalResult::r2_baseline, &EvalResult::r2_network, &EvalResult::r2_surrogate,
        &EvalResult::lambda,      &EvalResult::rmse_f,     &EvalResult::rmse_g,
        &EvalResult::delta_rmse};
    EvalResult mean;
    EvalResult stddev;
    const double n = static_cast<double>(per_seed.size());
    for (const auto field : fields) {
        double sum = 0.0;
        for (const auto& r : per_seed) sum += r.*field;
        const double m = sum / n;
        double sq = 0.0;
        for (const auto& r : per_seed) {
            const double dev = r.*field - m;
            sq += dev * dev;
        }
        mean.*field = m;
        stddev.*field = std::sqrt(sq / n); // population std
    }
    return {mean, stddev};
}

namespace {

std::string utc_timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Rethrows library errors with the seed that hit them, preserving the type.
template <typename F>
void with_seed_context(std::uint64_t seed, F&& f) {
    const auto ctx = [seed](const char* what) {
        return "seed " + std::to_string(seed) + ": " + what;
    };
    try {
        f();
    } catch (const ShapeError& e) {
        throw ShapeError(ctx(e.what()));
    } catch (const ParameterError& e) {
        throw ParameterError(ctx(e.what()));
    } catch (const EmptyDataError& e) {
        throw EmptyDataError(ctx(e.what()));
    } catch (const SchemaError& e) {
        throw SchemaError(ctx(e.what()));
    } catch (const ParseError& e) {
        throw ParseError(ctx(e.what()));
    } catch (const DegenerateVarianceError& e) {
        throw DegenerateVarianceError(ctx(e.what()));
    } catch (const IoError& e) {
        throw IoError(ctx(e.what()));
    } catch (const Error& e) {
        throw Error(ctx(e.what()));
    }
}

// Runs fn(i) for i in [0, count) across at most seed_thread_cap() workers.
// Results land in caller-owned slots, so scheduling cannot change output.
template <typename F>
void parallel_over_seeds(std::size_t count, F&& fn) {
    const std::size_t workers = std::min(seed_thread_cap(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e); // first failing seed wins, deterministically
    }
}

MlpArchitecture resolve_architecture(const MlpArchitecture& declared, std::size_t data_dim) {
    MlpArchitecture arch = declared;
    if (arch.input_dim == 0) {
        arch.input_dim = data_dim;
    } else if (arch.input_dim != data_dim) {
        throw SchemaError("architecture input_dim " + std::to_string(arch.input_dim) +
                          " inconsistent with dataset feature count " + std::to_string(data_dim));
    }
    arch.validate();
    return arch;
}

struct SeedModels {
    LinearModel baseline;
    MlpModel network;
    LinearModel surrogate;
    SeedTrainSummary summary;
};

SeedModels fit_three_models(const MlpArchitecture& arch, const Dataset& train,
                            const TrainConfig& base_cfg, std::uint64_t seed) {
    SeedModels out;
    out.baseline = ols_fit(train.features, train.target);
    TrainConfig tc = base_cfg;
    tc.seed = seed;
    TrainResult tr = train_mlp(arch, train, tc);
    out.surrogate = fit_surrogate(tr.model, train);
    out.summary = SeedTrainSummary{seed, tr.epoch_loss.back(), tc.epochs};
    out.network = std::move(tr.model);
    return out;
}

void finalize_report(ExperimentReport& report, const ExperimentConfig& cfg) {
    report.config_echo = canonical_json_text(config_to_json(cfg));
    report.provenance.config_hash = fnv1a64_hex(report.config_echo);
    report.provenance.timestamp = utc_timestamp();
}

} // namespace

ExperimentReport run_standard(const ExperimentConfig& cfg, RunArtifacts* artifacts) {
    cfg.validate();
    const auto* split = std::get_if<HoldoutSplitSpec>(&cfg.split);
    if (split == nullptr) {
        throw ParameterError("run_standard: config carries a shift split spec");
    }
    const Dataset data = materialize_dataset(cfg.dataset);
    const MlpArchitecture arch = resolve_architecture(cfg.architecture, data.dim());

    const std::size_t n_seeds = cfg.seeds.size();
    std::vector<EvalResult> evals(n_seeds);
    std::vector<SeedTrainSummary> summaries(n_seeds);
    parallel_over_seeds(n_seeds, [&](std::size_t i) {
        const std::uint64_t seed = cfg.seeds[i];
        with_seed_context(seed, [&] {
            auto [train_raw, test_raw] = train_test_split(data, split->test_fraction, seed);
            const Standardizer scaler = fit_standardizer(train_raw);
            const Dataset train = apply_standardizer(scaler, train_raw);
            const Dataset test = apply_standardizer(scaler, test_raw);
            SeedModels models = fit_three_models(arch, train, cfg.training, seed);
            evals[i] = evaluate_triplet(models.baseline, models.network, models.surrogate, test);
            summaries[i] = models.summary;
            if (i == 0 && artifacts != nullptr) {
                artifacts->seed = seed;
                artifacts->baseline = models.baseline;
                artifacts->network = models.network;
                artifacts->surrogate = models.surrogate;
                artifacts->feature_names = train.feature_names;
                artifacts->domains = {DomainArtifacts{"Test", test}};
            }
        });
    });

    ExperimentReport report;
    DomainResult domain;
    domain.label = "Test";
    domain.per_seed = std::move(evals);
    std::tie(domain.mean, domain.stddev) = aggregate(domain.per_seed);
    report.domains.push_back(std::move(domain));
    report.training = std::move(summaries);
    finalize_report(report, cfg);
    return report;
}

ExperimentReport run_shift(const ExperimentConfig& cfg, RunArtifacts* artifacts) {
    cfg.validate();
    const auto* spec = std::get_if<QuantileShiftSpec>(&cfg.split);
    if (spec == nullptr) {
        throw ParameterError("run_shift: config carries a holdout split spec");
    }
    const Dataset data = materialize_dataset(cfg.dataset);
    const MlpArchitecture arch = resolve_architecture(cfg.architecture, data.dim());

    static constexpr std::array<const char*, 3> domain_labels = {"IID", "Tail-L", "Tail-R"};
    const std::size_t n_seeds = cfg.seeds.size();
    std::vector<std::array<EvalResult, 3>> evals(n_seeds);
    std::vector<SeedTrainSummary> summaries(n_seeds);
    parallel_over_seeds(n_seeds, [&](std::size_t i) {
        const std::uint64_t seed = cfg.seeds[i];
        with_seed_context(seed, [&] {
            // The quantile banding depends only on the data; the seed only
            // moves rows between train and IID test inside the middle band.
            ShiftSplit split = quantile_shift_split(data, spec->feature, spec->low_q,
                                                    spec->high_q, spec->iid_test_fraction, seed);
            if (split.train.size() < 2 || split.iid_test.size() < 2) {
                throw ParameterError("middle partition below minimum size (train " +
                                     std::to_string(split.train.size()) + ", iid_test " +
                                     std::to_string(split.iid_test.size()) + ")");
            }
            if (split.tail_low.size() < 2 || split.tail_high.size() < 2) {
                throw ParameterError("tail partition below minimum size (tail_low " +
                                     std::to_string(split.tail_low.size()) + ", tail_high " +
                                     std::to_string(split.tail_high.size()) + ")");
            }
            const Standardizer scaler = fit_standardizer(split.train);
            const Dataset train = apply_standardizer(scaler, split.train);
            const std::array<Dataset, 3> eval_sets = {
                apply_standardizer(scaler, split.iid_test),
                apply_standardizer(scaler, split.tail_low),
                apply_standardizer(scaler, split.tail_high)};
            SeedModels models = fit_three_models(arch, train, cfg.training, seed);
            for (std::size_t d = 0; d < eval_sets.size(); ++d) {
                evals[i][d] = evaluate_triplet(models.baseline, models.network, models.surrogate,
                                               eval_sets[d]);
            }
            summaries[i] = models.summary;
            if (i == 0 && artifacts != nullptr) {
                artifacts->seed = seed;
                artifacts->baseline = models.baseline;
                artifacts->network = models.network;
                artifacts->surrogate = models.surrogate;
                artifacts->feature_names = train.feature_names;
                artifacts->domains.clear();
                for (std::size_t d = 0; d < eval_sets.size(); ++d) {
                    artifacts->domains.push_back(DomainArtifacts{domain_labels[d], eval_sets[d]});
                }
            }
        });
    });

    ExperimentReport report;
    for (std::size_t d = 0; d < domain_labels.size(); ++d) {
        DomainResult domain;
        domain.label = domain_labels[d];
        domain.per_seed.reserve(n_seeds);
        for (std::size_t i = 0; i < n_seeds; ++i) domain.per_seed.push_back(evals[i][d]);
        std::tie(domain.mean, domain.stddev) = aggregate(domain.per_seed);
        report.domains.push_back(std::move(domain));
    }
    report.training = std::move(summaries);
    finalize_report(report, cfg);
    return report;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, RunArtifacts* artifacts) {
    if (std::holds_alternative<HoldoutSplitSpec>(cfg.split)) {
        return run_standard(cfg, artifacts);
    }
    return run_shift(cfg, artifacts);
}

} // namespace lindec
