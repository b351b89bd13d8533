#pragma once

#include "lindec/dataset.hpp"
#include "lindec/linalg.hpp"
#include "lindec/mlp.hpp"

namespace lindec {

/// Affine model w.x + b. Serves two roles that differ only in the fitting
/// targets: the data baseline (fit to y) and the network surrogate (fit to
/// the network's predictions).
struct LinearModel {
    Vector weights;
    double intercept = 0.0;
};

/// Ordinary least squares with an appended constant column; the empirical
/// minimizer of mean squared error over affine functions.
LinearModel ols_fit(const Matrix& features, const Vector& targets);

Vector predict(const LinearModel& m, const Matrix& features);

/// Best affine approximation of the network on the training inputs:
/// ols_fit(train.features, forward(net, train.features)).
LinearModel fit_surrogate(const MlpModel& net, const Dataset& train);

} // namespace lindec
