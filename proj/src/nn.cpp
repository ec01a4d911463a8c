#include "emml/nn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "emml/errors.hpp"
#include "emml/kernels.hpp"
#include "emml/rng.hpp"

namespace emml {

MlpArchitecture default_architecture(std::size_t input_width) {
    return MlpArchitecture{{input_width, 128, 512, 512, 512, 256, 256, 1}};
}

void validate_architecture(const MlpArchitecture& arch) {
    if (arch.layer_widths.size() < 2)
        throw Error("architecture needs at least an input and an output width");
    for (std::size_t w : arch.layer_widths)
        if (w < 1) throw Error("architecture widths must be >= 1");
    if (arch.layer_widths.back() != 1) throw Error("output width must be 1");
}

std::size_t count_parameters(const MlpArchitecture& arch) {
    validate_architecture(arch);
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < arch.layer_widths.size(); ++l)
        total += arch.layer_widths[l] * arch.layer_widths[l + 1] + arch.layer_widths[l + 1];
    return total;
}

MlpModel he_init(const MlpArchitecture& arch, std::uint64_t seed) {
    validate_architecture(arch);
    MlpModel model;
    for (std::size_t l = 0; l + 1 < arch.layer_widths.size(); ++l) {
        const std::size_t in = arch.layer_widths[l];
        const std::size_t out = arch.layer_widths[l + 1];
        Pcg32 rng(derive_stream(seed, l));
        const double stddev = std::sqrt(2.0 / static_cast<double>(in));
        Matrix w(in, out);
        for (std::size_t r = 0; r < in; ++r)
            for (std::size_t c = 0; c < out; ++c) w.at(r, c) = rng.next_normal(0.0, stddev);
        model.weights.push_back(std::move(w));
        model.biases.emplace_back(out, 0.0);
    }
    return model;
}

namespace {

void add_bias_relu(Matrix& z, const std::vector<double>& bias, Matrix& activation) {
    activation = Matrix(z.rows(), z.cols());
    for (std::size_t r = 0; r < z.rows(); ++r) {
        auto zr = z.row(r);
        auto ar = activation.row(r);
        for (std::size_t c = 0; c < z.cols(); ++c) {
            zr[c] += bias[c];
            ar[c] = zr[c] > 0.0 ? zr[c] : 0.0;
        }
    }
}

void check_forward_input(const MlpModel& model, const Matrix& x) {
    if (model.weights.empty()) throw Error("forward: model has no layers");
    if (x.cols() != model.input_width())
        throw DimensionMismatch("forward: expected " + std::to_string(model.input_width()) +
                                " input features, got " + std::to_string(x.cols()));
    if (!x.all_finite()) throw NonFiniteInput("forward: non-finite input");
}

} // namespace

std::vector<double> forward(const MlpModel& model, const Matrix& x, ForwardCache* cache) {
    check_forward_input(model, x);
    ForwardCache local;
    ForwardCache& c = cache ? *cache : local;
    c.activations.clear();
    c.pre_activations.clear();
    c.activations.push_back(x);

    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        Matrix z;
        matmul(c.activations.back(), model.weights[l], z);
        Matrix a;
        add_bias_relu(z, model.biases[l], a);
        c.pre_activations.push_back(std::move(z));
        c.activations.push_back(std::move(a));
    }

    const Matrix& out = c.activations.back();
    std::vector<double> pred(out.rows());
    for (std::size_t r = 0; r < out.rows(); ++r) pred[r] = out.at(r, 0);
    return pred;
}

double loss_and_grad(const MlpModel& model, const Matrix& x, std::span<const double> y,
                     Gradients& grads) {
    if (x.rows() != y.size()) throw DimensionMismatch("loss_and_grad: x rows and y must agree");
    if (y.empty()) throw EmptyInput("loss_and_grad: empty batch");

    ForwardCache cache;
    std::vector<double> pred = forward(model, x, &cache);

    const auto b = static_cast<double>(y.size());
    double loss = 0.0;
    Matrix delta(y.size(), 1); // dL/dz of the output layer
    for (std::size_t r = 0; r < y.size(); ++r) {
        double diff = pred[r] - y[r];
        loss += std::abs(diff);
        double sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
        // ReLU output: gradient blocked where the pre-activation is <= 0
        delta.at(r, 0) = cache.pre_activations.back().at(r, 0) > 0.0 ? sign / b : 0.0;
    }
    loss /= b;

    const std::size_t layers = model.weights.size();
    grads.weights.assign(layers, Matrix());
    grads.biases.assign(layers, {});

    for (std::size_t l = layers; l-- > 0;) {
        matmul_at_b(cache.activations[l], delta, grads.weights[l]);
        grads.biases[l].assign(model.biases[l].size(), 0.0);
        for (std::size_t r = 0; r < delta.rows(); ++r) {
            auto dr = delta.row(r);
            for (std::size_t c = 0; c < delta.cols(); ++c) grads.biases[l][c] += dr[c];
        }
        if (l == 0) break;
        Matrix upstream;
        matmul_a_bt(delta, model.weights[l], upstream);
        const Matrix& z = cache.pre_activations[l - 1];
        for (std::size_t r = 0; r < upstream.rows(); ++r) {
            auto ur = upstream.row(r);
            auto zr = z.row(r);
            for (std::size_t c = 0; c < upstream.cols(); ++c)
                if (!(zr[c] > 0.0)) ur[c] = 0.0;
        }
        delta = std::move(upstream);
    }
    return loss;
}

AdamState AdamState::for_model(const MlpModel& model, double learning_rate) {
    AdamState state;
    state.learning_rate = learning_rate;
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        state.m_weights.emplace_back(model.weights[l].rows(), model.weights[l].cols());
        state.v_weights.emplace_back(model.weights[l].rows(), model.weights[l].cols());
        state.m_biases.emplace_back(model.biases[l].size(), 0.0);
        state.v_biases.emplace_back(model.biases[l].size(), 0.0);
    }
    return state;
}

namespace {

void adam_update_span(std::span<double> theta, std::span<const double> grad,
                      std::span<double> m, std::span<double> v, const AdamState& s,
                      double bias1, double bias2) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
        double g = grad[i];
        m[i] = s.beta1 * m[i] + (1.0 - s.beta1) * g;
        v[i] = s.beta2 * v[i] + (1.0 - s.beta2) * g * g;
        double m_hat = m[i] / bias1;
        double v_hat = v[i] / bias2;
        theta[i] -= s.learning_rate * m_hat / (std::sqrt(v_hat) + s.epsilon);
    }
}

} // namespace

void adam_step(MlpModel& model, const Gradients& grads, AdamState& state) {
    if (grads.weights.size() != model.weights.size())
        throw DimensionMismatch("adam_step: gradient layer count mismatch");
    state.t += 1;
    const double bias1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bias2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        if (grads.weights[l].rows() != model.weights[l].rows() ||
            grads.weights[l].cols() != model.weights[l].cols() ||
            grads.biases[l].size() != model.biases[l].size())
            throw DimensionMismatch("adam_step: gradient shape mismatch at layer " +
                                    std::to_string(l));
        adam_update_span(model.weights[l].data(), grads.weights[l].data(),
                         state.m_weights[l].data(), state.v_weights[l].data(), state, bias1,
                         bias2);
        adam_update_span(model.biases[l], grads.biases[l], state.m_biases[l], state.v_biases[l],
                         state, bias1, bias2);
    }
}

namespace {

double mae_of(const std::vector<double>& pred, std::span<const double> y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) acc += std::abs(pred[i] - y[i]);
    return acc / static_cast<double>(pred.size());
}

} // namespace

TrainResult train(MlpModel& model, const Matrix& x, std::span<const double> y,
                  const TrainConfig& config) {
    if (x.rows() != y.size()) throw DimensionMismatch("train: x rows and y must agree");
    if (y.empty()) throw EmptyTable("train: no samples");
    if (!(config.validation_split >= 0.0 && config.validation_split < 1.0))
        throw Error("train: validation_split must lie in [0,1)");
    if (config.batch_size < 1) throw Error("train: batch_size must be >= 1");
    if (config.epochs < 0) throw Error("train: epochs must be >= 0");
    if (config.validation_split > 0.0 && y.size() < 2)
        throw Error("train: need at least 2 rows for a validation split");

    const std::size_t n = y.size();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Pcg32 split_rng(derive_stream(config.seed, 0x76616cull)); // "val" stream tag
    if (config.validation_split > 0.0) fisher_yates_shuffle(perm, split_rng);

    auto n_val = static_cast<std::size_t>(
        std::llround(config.validation_split * static_cast<double>(n)));
    if (config.validation_split > 0.0 && n_val == 0) n_val = 1;
    if (n_val >= n) n_val = n - 1;

    std::vector<std::size_t> train_idx(perm.begin(), perm.end() - static_cast<long>(n_val));
    TrainResult result;
    result.validation_indices.assign(perm.end() - static_cast<long>(n_val), perm.end());

    Matrix x_val;
    std::vector<double> y_val;
    if (n_val > 0) {
        x_val = take_rows(x, result.validation_indices);
        y_val = take(std::vector<double>(y.begin(), y.end()), result.validation_indices);
    }

    AdamState state = AdamState::for_model(model, config.learning_rate);
    Gradients grads;
    Pcg32 epoch_rng(derive_stream(config.seed, 0x65706f6368ull)); // "epoch" stream tag
    const auto batch = static_cast<std::size_t>(config.batch_size);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        fisher_yates_shuffle(train_idx, epoch_rng);
        double abs_sum = 0.0;
        std::size_t seen = 0;
        for (std::size_t start = 0; start < train_idx.size(); start += batch) {
            const std::size_t len = std::min(batch, train_idx.size() - start);
            std::span<const std::size_t> rows(train_idx.data() + start, len);
            Matrix xb = take_rows(x, rows);
            std::vector<double> yb;
            yb.reserve(len);
            for (std::size_t r : rows) yb.push_back(y[r]);
            double loss = loss_and_grad(model, xb, yb, grads);
            adam_step(model, grads, state);
            abs_sum += loss * static_cast<double>(len);
            seen += len;
        }
        result.train_mae.push_back(abs_sum / static_cast<double>(seen));
        if (n_val > 0)
            result.val_mae.push_back(mae_of(forward(model, x_val), y_val));
        else
            result.val_mae.push_back(std::numeric_limits<double>::quiet_NaN());

        if (epoch == 0 && !train_idx.empty()) {
            const std::size_t probe_n = std::min<std::size_t>(train_idx.size(), 256);
            std::span<const std::size_t> rows(train_idx.data(), probe_n);
            std::vector<double> probe = forward(model, take_rows(x, rows));
            bool all_zero = std::all_of(probe.begin(), probe.end(),
                                        [](double v) { return v == 0.0; });
            if (all_zero) {
                result.dead_output_warning = true;
                std::fprintf(stderr,
                             "warning: network output is 0 for every training row after the "
                             "first epoch; the ReLU output unit may be stuck\n");
            }
        }
    }
    return result;
}

} // namespace emml
