#include "lindec/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <json.hpp>

#include "lindec/errors.hpp"
#include "lindec/rng.hpp"

namespace lindec {

void MlpArchitecture::validate() const {
    if (input_dim == 0) throw ParameterError("MlpArchitecture: input_dim must be >= 1");
    for (const std::size_t w : hidden_layers) {
        if (w == 0) throw ParameterError("MlpArchitecture: zero-width hidden layer");
    }
}

std::vector<std::size_t> MlpArchitecture::layer_dims() const {
    std::vector<std::size_t> dims;
    dims.push_back(input_dim);
    dims.insert(dims.end(), hidden_layers.begin(), hidden_layers.end());
    dims.push_back(1);
    return dims;
}

void MlpModel::validate() const {
    arch.validate();
    const auto dims = arch.layer_dims();
    if (layers.size() + 1 != dims.size()) {
        throw ShapeError("MlpModel: " + std::to_string(layers.size()) + " layers for " +
                         std::to_string(dims.size() - 1) + " expected");
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
        if (layers[l].weights.rows() != dims[l + 1] || layers[l].weights.cols() != dims[l]) {
            throw ShapeError("MlpModel: layer " + std::to_string(l) + " weight shape mismatch");
        }
        if (layers[l].bias.size() != dims[l + 1]) {
            throw ShapeError("MlpModel: layer " + std::to_string(l) + " bias shape mismatch");
        }
        require_finite(layers[l].weights.data(), "MlpModel weights");
        require_finite(layers[l].bias, "MlpModel bias");
    }
}

MlpModel init_mlp(const MlpArchitecture& arch, std::uint64_t seed) {
    arch.validate();
    const auto dims = arch.layer_dims();
    Rng rng(seed);
    MlpModel model{arch, {}};
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const std::size_t fan_in = dims[l];
        const std::size_t fan_out = dims[l + 1];
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
        Matrix w(fan_out, fan_in, 0.0);
        for (double& v : w.data()) v = rng.uniform(-bound, bound);
        model.layers.push_back(MlpLayer{std::move(w), Vector(fan_out, 0.0)});
    }
    return model;
}

ForwardTrace forward_trace(const MlpModel& m, const Matrix& x) {
    if (x.cols() != m.arch.input_dim) {
        throw ShapeError("forward: input has " + std::to_string(x.cols()) + " columns, net expects " +
                         std::to_string(m.arch.input_dim));
    }
    const std::size_t n = x.rows();
    ForwardTrace trace;
    const Matrix* current = &x;
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        const Matrix& w = m.layers[l].weights;
        const Vector& b = m.layers[l].bias;
        Matrix z(n, w.rows(), 0.0);
        for (std::size_t r = 0; r < n; ++r) {
            const auto in = current->row(r);
            for (std::size_t o = 0; o < w.rows(); ++o) {
                const auto wrow = w.row(o);
                double s = b[o];
                for (std::size_t i = 0; i < wrow.size(); ++i) s += wrow[i] * in[i];
                z(r, o) = s;
            }
        }
        const bool last = (l + 1 == m.layers.size());
        Matrix a = z;
        if (!last) {
            for (double& v : a.data()) v = v > 0.0 ? v : 0.0;
        }
        trace.preacts.push_back(std::move(z));
        trace.activations.push_back(std::move(a));
        current = &trace.activations.back();
    }
    trace.predictions.resize(n);
    const Matrix& out = trace.activations.back();
    for (std::size_t r = 0; r < n; ++r) trace.predictions[r] = out(r, 0);
    return trace;
}

Vector forward(const MlpModel& m, const Matrix& x) {
    return forward_trace(m, x).predictions;
}

std::pair<double, Gradients> loss_and_gradients(const MlpModel& m, const Matrix& x,
                                                const Vector& y) {
    if (x.rows() == 0) throw EmptyDataError("loss_and_gradients: empty batch");
    if (x.rows() != y.size()) {
        throw ShapeError("loss_and_gradients: " + std::to_string(x.rows()) + " rows vs " +
                         std::to_string(y.size()) + " targets");
    }
    const std::size_t n = x.rows();
    const ForwardTrace trace = forward_trace(m, x);

    double loss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        const double e = trace.predictions[r] - y[r];
        loss += e * e;
    }
    loss /= static_cast<double>(n);

    Gradients grads;
    grads.layers.resize(m.layers.size());

    // delta = dL/dz for the current layer, n x out_dim.
    Matrix delta(n, 1, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        delta(r, 0) = 2.0 * (trace.predictions[r] - y[r]) / static_cast<double>(n);
    }

    for (std::size_t li = m.layers.size(); li-- > 0;) {
        const Matrix& w = m.layers[li].weights;
        const Matrix& input = (li == 0) ? x : trace.activations[li - 1];

        LayerGradients g;
        g.weights = Matrix(w.rows(), w.cols(), 0.0);
        g.bias.assign(w.rows(), 0.0);
        for (std::size_t r = 0; r < n; ++r) {
            const auto in = input.row(r);
            for (std::size_t o = 0; o < w.rows(); ++o) {
                const double dz = delta(r, o);
                if (dz == 0.0) continue;
                g.bias[o] += dz;
                auto grow = g.weights.row(o);
                for (std::size_t i = 0; i < in.size(); ++i) grow[i] += dz * in[i];
            }
        }
        grads.layers[li] = std::move(g);

        if (li == 0) break;
        // Propagate through the weights, then through the ReLU of layer li-1.
        Matrix prev(n, w.cols(), 0.0);
        for (std::size_t r = 0; r < n; ++r) {
            auto prow = prev.row(r);
            for (std::size_t o = 0; o < w.rows(); ++o) {
                const double dz = delta(r, o);
                if (dz == 0.0) continue;
                const auto wrow = w.row(o);
                for (std::size_t i = 0; i < wrow.size(); ++i) prow[i] += dz * wrow[i];
            }
            for (std::size_t i = 0; i < prow.size(); ++i) {
                if (!(trace.preacts[li - 1](r, i) > 0.0)) prow[i] = 0.0; // ReLU' (0 at the kink)
            }
        }
        delta = std::move(prev);
    }
    return {loss, std::move(grads)};
}

AdamState AdamState::init(const MlpModel& model, double lr, double beta1, double beta2,
                          double eps) {
    AdamState st;
    st.lr = lr;
    st.beta1 = beta1;
    st.beta2 = beta2;
    st.eps = eps;
    for (const auto& layer : model.layers) {
        LayerGradients zero{Matrix(layer.weights.rows(), layer.weights.cols(), 0.0),
                            Vector(layer.bias.size(), 0.0)};
        st.first_moment.push_back(zero);
        st.second_moment.push_back(zero);
    }
    return st;
}

namespace {

void adam_update(double& theta, double& m, double& v, double g, const AdamState& st,
                 double bc1, double bc2) {
    m = st.beta1 * m + (1.0 - st.beta1) * g;
    v = st.beta2 * v + (1.0 - st.beta2) * g * g;
    const double m_hat = m / bc1;
    const double v_hat = v / bc2;
    theta -= st.lr * m_hat / (std::sqrt(v_hat) + st.eps);
}

} // namespace

void adam_step(AdamState& state, MlpModel& m, const Gradients& grads) {
    if (grads.layers.size() != m.layers.size() || state.first_moment.size() != m.layers.size()) {
        throw ShapeError("adam_step: layer count mismatch");
    }
    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        auto& layer = m.layers[l];
        const auto& g = grads.layers[l];
        if (g.weights.rows() != layer.weights.rows() || g.weights.cols() != layer.weights.cols() ||
            g.bias.size() != layer.bias.size()) {
            throw ShapeError("adam_step: gradient shape mismatch at layer " + std::to_string(l));
        }
        auto& mw = state.first_moment[l];
        auto& vw = state.second_moment[l];
        for (std::size_t i = 0; i < layer.weights.data().size(); ++i) {
            adam_update(layer.weights.data()[i], mw.weights.data()[i], vw.weights.data()[i],
                        g.weights.data()[i], state, bc1, bc2);
        }
        for (std::size_t i = 0; i < layer.bias.size(); ++i) {
            adam_update(layer.bias[i], mw.bias[i], vw.bias[i], g.bias[i], state, bc1, bc2);
        }
    }
}

void TrainConfig::validate() const {
    if (epochs < 1 || epochs > 10000) {
        throw ParameterError("TrainConfig: epochs must be in [1, 10000]");
    }
    if (batch_size < 1) throw ParameterError("TrainConfig: batch_size must be >= 1");
    if (!(lr > 0.0)) throw ParameterError("TrainConfig: lr must be > 0");
}

TrainResult train_mlp(const MlpArchitecture& arch, const Dataset& train, const TrainConfig& cfg) {
    cfg.validate();
    train.validate();
    const std::size_t n = train.size();
    if (n == 0) throw EmptyDataError("train_mlp: empty training set");
    if (train.dim() != arch.input_dim) {
        throw ShapeError("train_mlp: dataset has " + std::to_string(train.dim()) +
                         " features, architecture expects " + std::to_string(arch.input_dim));
    }

    std::size_t batch = cfg.batch_size;
    if (batch > n) {
        std::fprintf(stderr, "warning: batch_size %zu exceeds dataset size %zu, clamping\n",
                     batch, n);
        batch = n;
    }

    MlpModel model = init_mlp(arch, cfg.seed);
    AdamState adam = AdamState::init(model, cfg.lr, cfg.beta1, cfg.beta2, cfg.eps_adam);
    Rng shuffle_rng(mix_seed(cfg.seed, 0x5u));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainResult result;
    result.epoch_loss.reserve(cfg.epochs);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t count = std::min(batch, n - start);
            Matrix xb(count, train.dim(), 0.0);
            Vector yb(count, 0.0);
            for (std::size_t i = 0; i < count; ++i) {
                const auto src = train.features.row(order[start + i]);
                std::copy(src.begin(), src.end(), xb.row(i).begin());
                yb[i] = train.target[order[start + i]];
            }
            const auto [loss, grads] = loss_and_gradients(model, xb, yb);
            adam_step(adam, model, grads);
            epoch_loss += loss;
            ++batches;
        }
        result.epoch_loss.push_back(epoch_loss / static_cast<double>(batches));
    }
    model.validate();
    result.model = std::move(model);
    return result;
}

std::string dump_model_json(const MlpModel& m) {
    m.validate();
    nlohmann::json doc;
    doc["format_version"] = 1;
    doc["architecture"] = {{"input_dim", m.arch.input_dim},
                           {"hidden_layers", m.arch.hidden_layers}};
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& layer : m.layers) {
        layers.push_back({{"rows", layer.weights.rows()},
                          {"cols", layer.weights.cols()},
                          {"weights", layer.weights.data()},
                          {"bias", layer.bias}});
    }
    doc["layers"] = std::move(layers);
    return doc.dump();
}

MlpModel load_model_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model JSON: ") + e.what());
    }
    try {
        if (doc.at("format_version").get<int>() != 1) {
            throw ParseError("model JSON: unsupported format_version");
        }
        MlpModel m;
        m.arch.input_dim = doc.at("architecture").at("input_dim").get<std::size_t>();
        m.arch.hidden_layers =
            doc.at("architecture").at("hidden_layers").get<std::vector<std::size_t>>();
        for (const auto& layer : doc.at("layers")) {
            const auto rows = layer.at("rows").get<std::size_t>();
            const auto cols = layer.at("cols").get<std::size_t>();
            m.layers.push_back(MlpLayer{
                Matrix(rows, cols, layer.at("weights").get<Vector>()),
                layer.at("bias").get<Vector>()});
        }
        m.validate();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model JSON: ") + e.what());
    }
}

} // namespace lindec
