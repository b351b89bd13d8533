#include "lindec/surrogate.hpp"

#include <algorithm>
#include <string>

#include "lindec/errors.hpp"

namespace lindec {

LinearModel ols_fit(const Matrix& features, const Vector& targets) {
    if (features.rows() == 0 || targets.empty()) {
        throw EmptyDataError("ols_fit: empty data");
    }
    if (features.rows() != targets.size()) {
        throw ShapeError("ols_fit: " + std::to_string(features.rows()) + " rows vs " +
                         std::to_string(targets.size()) + " targets");
    }
    const std::size_t n = features.rows();
    const std::size_t d = features.cols();
    Matrix design(n, d + 1, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        const auto src = features.row(r);
        auto dst = design.row(r);
        std::copy(src.begin(), src.end(), dst.begin());
        dst[d] = 1.0;
    }
    Vector beta = solve_least_squares(design, targets);
    LinearModel model;
    model.intercept = beta[d];
    beta.resize(d);
    model.weights = std::move(beta);
    return model;
}

Vector predict(const LinearModel& m, const Matrix& features) {
    if (features.cols() != m.weights.size()) {
        throw ShapeError("predict: " + std::to_string(features.cols()) + " feature columns vs " +
                         std::to_string(m.weights.size()) + " weights");
    }
    Vector out(features.rows(), 0.0);
    for (std::size_t r = 0; r < features.rows(); ++r) {
        const auto row = features.row(r);
        double s = m.intercept;
        for (std::size_t c = 0; c < row.size(); ++c) s += m.weights[c] * row[c];
        out[r] = s;
    }
    return out;
}

LinearModel fit_surrogate(const MlpModel& net, const Dataset& train) {
    if (train.size() == 0) throw EmptyDataError("fit_surrogate: empty training set");
    const Vector net_outputs = forward(net, train.features);
    return ols_fit(train.features, net_outputs);
}

} // namespace lindec
