#include "lindec/metrics.hpp"

#include <cmath>
#include <string>

#include "lindec/errors.hpp"

namespace lindec {

namespace {

void check_lengths(const Vector& a, const Vector& b, std::size_t min_len, const char* what) {
    if (a.size() != b.size()) {
        throw ShapeError(std::string(what) + ": lengths " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()) + " differ");
    }
    if (a.size() < min_len) {
        throw EmptyDataError(std::string(what) + ": need at least " + std::to_string(min_len) +
                             " values, got " + std::to_string(a.size()));
    }
}

double mean_of(const Vector& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double mse_of(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double e = a[i] - b[i];
        s += e * e;
    }
    return s / static_cast<double>(a.size());
}

double r2_impl(const Vector& reference, const Vector& pred, const char* degenerate_hint) {
    const double mean = mean_of(reference);
    double var = 0.0;
    for (double x : reference) {
        const double dev = x - mean;
        var += dev * dev;
    }
    var /= static_cast<double>(reference.size()); // population variance
    if (var < 1e-12) {
        throw DegenerateVarianceError(std::string(degenerate_hint) +
                                      " (population variance " + std::to_string(var) + ")");
    }
    return 1.0 - mse_of(reference, pred) / var;
}

} // namespace

double r_squared(const Vector& y_true, const Vector& y_pred) {
    check_lengths(y_true, y_pred, 2, "r_squared");
    return r2_impl(y_true, y_pred, "r_squared: reference signal has degenerate variance");
}

double lambda_score(const Vector& f_preds, const Vector& g_preds) {
    check_lengths(f_preds, g_preds, 2, "lambda_score");
    return r2_impl(f_preds, g_preds,
                   "lambda_score: network output variance is degenerate (constant network)");
}

double rmse(const Vector& y_true, const Vector& y_pred) {
    check_lengths(y_true, y_pred, 1, "rmse");
    return std::sqrt(mse_of(y_true, y_pred));
}

EvalResult evaluate_triplet(const LinearModel& baseline, const MlpModel& net,
                            const LinearModel& surrogate, const Dataset& eval_set) {
    eval_set.validate();
    const Vector baseline_preds = predict(baseline, eval_set.features);
    const Vector net_preds = forward(net, eval_set.features);
    const Vector surrogate_preds = predict(surrogate, eval_set.features);

    EvalResult r;
    try {
        r.r2_baseline = r_squared(eval_set.target, baseline_preds);
        r.r2_network = r_squared(eval_set.target, net_preds);
        r.r2_surrogate = r_squared(eval_set.target, surrogate_preds);
    } catch (const DegenerateVarianceError& e) {
        throw DegenerateVarianceError(std::string("evaluate_triplet: true-target R^2: ") +
                                      e.what());
    }
    try {
        r.lambda = lambda_score(net_preds, surrogate_preds);
    } catch (const DegenerateVarianceError& e) {
        throw DegenerateVarianceError(std::string("evaluate_triplet: lambda: ") + e.what());
    }
    r.rmse_f = rmse(eval_set.target, net_preds);
    r.rmse_g = rmse(eval_set.target, surrogate_preds);
    r.delta_rmse = r.rmse_g - r.rmse_f;
    return r;
}

} // namespace lindec
