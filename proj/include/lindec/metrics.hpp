#pragma once

#include "lindec/dataset.hpp"
#include "lindec/linalg.hpp"
#include "lindec/mlp.hpp"
#include "lindec/surrogate.hpp"

namespace lindec {

/// One evaluation of the three-model protocol on a single partition.
struct EvalResult {
    double r2_baseline = 0.0;  // baseline linear model vs true target
    double r2_network = 0.0;   // network vs true target
    double r2_surrogate = 0.0; // surrogate vs true target
    double lambda = 0.0;       // surrogate vs network outputs
    double rmse_f = 0.0;       // network, task units
    double rmse_g = 0.0;       // surrogate, task units
    double delta_rmse = 0.0;   // rmse_g - rmse_f, stored exactly as that difference
};

/// 1 - mean((y_true - y_pred)^2) / var_pop(y_true), population (1/n) variance.
/// Throws DegenerateVarianceError when var_pop(y_true) < 1e-12.
double r_squared(const Vector& y_true, const Vector& y_pred);

/// Linearity score: r_squared with the network's outputs as the reference
/// signal, so the denominator is the variance of the network's predictions.
double lambda_score(const Vector& f_preds, const Vector& g_preds);

double rmse(const Vector& y_true, const Vector& y_pred);

/// All EvalResult fields on one evaluation set. lambda compares network and
/// surrogate predictions on the same rows.
EvalResult evaluate_triplet(const LinearModel& baseline, const MlpModel& net,
                            const LinearModel& surrogate, const Dataset& eval_set);

} // namespace lindec
