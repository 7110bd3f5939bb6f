#pragma once

// Dense feed-forward networks over binary bag-of-words input.
//
// Every layer computes y = act(W x + b) with W stored output x input. The
// first layer never materializes its input: W x is the sum of the weight
// columns at the active indices. Everything is templated on the scalar so
// training runs in float and gradient checks in double.
//
// Batches are processed sequentially and per-example gradients are summed in
// sample order, so a run is a pure function of (data, spec, config).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "quill/error.hpp"
#include "quill/labels.hpp"
#include "quill/prediction.hpp"
#include "quill/random.hpp"
#include "quill/sparse_vector.hpp"
#include "quill/trace.hpp"

namespace quill {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

enum class Activation { Identity, ReLU, Sigmoid, Softmax };

std::string_view to_string(Activation act) noexcept;
std::optional<Activation> parse_activation(std::string_view text) noexcept;

template <typename Derived>
Vec<typename Derived::Scalar> activate(const Eigen::MatrixBase<Derived>& z, Activation act) {
    using Scalar = typename Derived::Scalar;
    switch (act) {
    case Activation::Identity: return z;
    case Activation::ReLU: return z.cwiseMax(Scalar(0));
    case Activation::Sigmoid:
        return (Scalar(1) / (Scalar(1) + (-z.array()).exp())).matrix();
    case Activation::Softmax: {
        Vec<Scalar> e = (z.array() - z.maxCoeff()).exp().matrix();
        return e / e.sum();
    }
    }
    return z;
}

/// dL/dz from dL/da, given z and a = act(z).
template <typename Scalar>
Vec<Scalar> activation_backward(const Vec<Scalar>& z, const Vec<Scalar>& a,
                                const Vec<Scalar>& upstream, Activation act) {
    switch (act) {
    case Activation::Identity: return upstream;
    case Activation::ReLU:
        return (z.array() > Scalar(0)).select(upstream, Scalar(0));
    case Activation::Sigmoid:
        return (upstream.array() * a.array() * (Scalar(1) - a.array())).matrix();
    case Activation::Softmax:
        return (a.array() * (upstream.array() - a.dot(upstream))).matrix();
    }
    return upstream;
}

template <typename Scalar>
struct DenseLayer {
    Mat<Scalar> weights; // output_units x input_units
    Vec<Scalar> bias;
    Activation activation = Activation::Identity;

    Eigen::Index input_units() const { return weights.cols(); }
    Eigen::Index output_units() const { return weights.rows(); }
    std::size_t param_count() const {
        return static_cast<std::size_t>(output_units() * (input_units() + 1));
    }

    template <typename Derived>
    Vec<Scalar> pre_activation(const Eigen::MatrixBase<Derived>& x) const {
        return weights * x + bias;
    }
    Vec<Scalar> pre_activation(const SparseBinaryVector& x) const {
        Vec<Scalar> z = bias;
        for (auto i : x.indices) z += weights.col(static_cast<Eigen::Index>(i));
        return z;
    }
    template <typename Input>
    Vec<Scalar> forward(const Input& x) const {
        return activate(pre_activation(x), activation);
    }
};

struct NetworkSpec {
    std::size_t input_dimension = 0;
    std::vector<std::size_t> layer_units;
    Activation hidden_activation = Activation::ReLU;
    Activation output_activation = Activation::Sigmoid;
    std::uint64_t seed = 0;

    /// Three dense layers 10-10-3.
    static NetworkSpec model1(std::size_t input_dimension, std::uint64_t seed = 0);
    /// Two dense layers 10-3.
    static NetworkSpec model2(std::size_t input_dimension, std::uint64_t seed = 0);

    /// Throws Error(InvalidArgument) unless the last layer has kNumClasses
    /// units and every size is positive.
    void validate() const;
};

struct ParamCount {
    std::vector<std::size_t> per_layer;
    std::size_t total = 0;
};

/// per_layer[k] = units[k] * (units[k-1] + 1), with units[-1] the input size.
ParamCount count_params(const NetworkSpec& spec);

template <typename Scalar>
struct NetworkModel {
    NetworkSpec spec;
    std::vector<DenseLayer<Scalar>> layers;

    std::size_t dimension() const { return spec.input_dimension; }

    template <typename Other>
    NetworkModel<Other> cast() const {
        NetworkModel<Other> out;
        out.spec = spec;
        for (const auto& l : layers)
            out.layers.push_back({l.weights.template cast<Other>(), l.bias.template cast<Other>(),
                                  l.activation});
        return out;
    }
};

/// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
/// Draws follow layer order and then column-major storage order.
template <typename Scalar>
NetworkModel<Scalar> init_network(const NetworkSpec& spec) {
    spec.validate();
    NetworkModel<Scalar> model;
    model.spec = spec;
    Engine engine(spec.seed);
    std::size_t fan_in = spec.input_dimension;
    for (std::size_t k = 0; k < spec.layer_units.size(); ++k) {
        const std::size_t fan_out = spec.layer_units[k];
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        DenseLayer<Scalar> layer;
        layer.weights.resize(static_cast<Eigen::Index>(fan_out), static_cast<Eigen::Index>(fan_in));
        Scalar* w = layer.weights.data();
        for (Eigen::Index i = 0; i < layer.weights.size(); ++i)
            w[i] = static_cast<Scalar>((2.0 * uniform_unit(engine) - 1.0) * limit);
        layer.bias = Vec<Scalar>::Zero(static_cast<Eigen::Index>(fan_out));
        layer.activation = k + 1 == spec.layer_units.size() ? spec.output_activation
                                                             : spec.hidden_activation;
        model.layers.push_back(std::move(layer));
        fan_in = fan_out;
    }
    return model;
}

/// Pre- and post-activation values of every layer from one forward pass.
template <typename Scalar>
struct ForwardCache {
    std::vector<Vec<Scalar>> pre;
    std::vector<Vec<Scalar>> post;
};

template <typename Scalar, typename Input>
Vec<Scalar> forward_cached(const NetworkModel<Scalar>& model, const Input& x,
                           ForwardCache<Scalar>& cache) {
    cache.pre.resize(model.layers.size());
    cache.post.resize(model.layers.size());
    for (std::size_t k = 0; k < model.layers.size(); ++k) {
        const auto& layer = model.layers[k];
        cache.pre[k] = k == 0 ? layer.pre_activation(x) : layer.pre_activation(cache.post[k - 1]);
        cache.post[k] = activate(cache.pre[k], layer.activation);
    }
    return cache.post.back();
}

template <typename Scalar>
Vec<Scalar> forward(const NetworkModel<Scalar>& model, const SparseBinaryVector& x) {
    check_dimension(model.dimension(), x);
    ForwardCache<Scalar> cache;
    return forward_cached(model, x, cache);
}

/// Dense input; used to check the sparse path.
template <typename Scalar>
Vec<Scalar> forward(const NetworkModel<Scalar>& model, const Vec<Scalar>& x) {
    require(static_cast<std::size_t>(x.size()) == model.dimension(), ErrorKind::Dimension,
            "dense input dimension does not match network input");
    ForwardCache<Scalar> cache;
    return forward_cached(model, x, cache);
}

inline constexpr double kProbabilityClip = 1e-7;

/// Cross-entropy over an integer label. Scores are renormalized to sum to
/// one (the sum clipped below at 1e-7), each probability is clipped to
/// [1e-7, 1 - 1e-7], and the result is -log p[label].
template <typename Derived>
typename Derived::Scalar loss(const Eigen::MatrixBase<Derived>& scores, QualityLabel label) {
    using Scalar = typename Derived::Scalar;
    const Scalar eps = static_cast<Scalar>(kProbabilityClip);
    const Scalar total = std::max(scores.sum(), eps);
    const Scalar p = scores(static_cast<Eigen::Index>(index_of(label))) / total;
    return -std::log(std::clamp(p, eps, Scalar(1) - eps));
}

/// d loss / d scores. Zero when p[label] sits on a clip bound.
template <typename Scalar>
Vec<Scalar> loss_gradient(const Vec<Scalar>& scores, QualityLabel label) {
    const Scalar eps = static_cast<Scalar>(kProbabilityClip);
    const auto y = static_cast<Eigen::Index>(index_of(label));
    const Scalar raw_total = scores.sum();
    const bool total_clipped = raw_total < eps;
    const Scalar total = total_clipped ? eps : raw_total;
    const Scalar p = scores(y) / total;
    Vec<Scalar> grad = Vec<Scalar>::Zero(scores.size());
    if (p < eps || p > Scalar(1) - eps) return grad;
    if (total_clipped) {
        grad(y) = -Scalar(1) / (p * total);
        return grad;
    }
    // dp/ds_j = (delta_jy - p) / total
    grad.setConstant(Scalar(1) / total);
    grad(y) = -(Scalar(1) - p) / (p * total);
    return grad;
}

template <typename Scalar>
struct Gradients {
    std::vector<Mat<Scalar>> weights;
    std::vector<Vec<Scalar>> biases;

    static Gradients zeros_like(const NetworkModel<Scalar>& model) {
        Gradients g;
        for (const auto& l : model.layers) {
            g.weights.push_back(Mat<Scalar>::Zero(l.weights.rows(), l.weights.cols()));
            g.biases.push_back(Vec<Scalar>::Zero(l.bias.size()));
        }
        return g;
    }
};

/// Adds the gradient of loss(forward(x), label) into `grads` and returns the
/// loss. Only the first-layer columns at active indices are touched.
template <typename Scalar>
Scalar accumulate_gradients(const NetworkModel<Scalar>& model, const SparseBinaryVector& x,
                            QualityLabel label, Gradients<Scalar>& grads,
                            ForwardCache<Scalar>& cache) {
    const Vec<Scalar> scores = forward_cached(model, x, cache);
    const std::size_t last = model.layers.size() - 1;
    Vec<Scalar> delta = activation_backward<Scalar>(cache.pre[last], cache.post[last],
                                                    loss_gradient<Scalar>(scores, label),
                                                    model.layers[last].activation);
    for (std::size_t k = last + 1; k-- > 0;) {
        grads.biases[k] += delta;
        if (k == 0) {
            for (auto i : x.indices) grads.weights[0].col(static_cast<Eigen::Index>(i)) += delta;
            break;
        }
        grads.weights[k].noalias() += delta * cache.post[k - 1].transpose();
        const Vec<Scalar> upstream = model.layers[k].weights.transpose() * delta;
        delta = activation_backward<Scalar>(cache.pre[k - 1], cache.post[k - 1], upstream,
                                            model.layers[k - 1].activation);
    }
    return loss(scores, label);
}

/// Exact gradients of loss(forward(x), label) with respect to every weight
/// and bias.
template <typename Scalar>
Gradients<Scalar> backward(const NetworkModel<Scalar>& model, const SparseBinaryVector& x,
                           QualityLabel label) {
    check_dimension(model.dimension(), x);
    auto grads = Gradients<Scalar>::zeros_like(model);
    ForwardCache<Scalar> cache;
    accumulate_gradients(model, x, label, grads, cache);
    return grads;
}

template <typename Scalar>
Prediction predict_network(const NetworkModel<Scalar>& model, const SparseBinaryVector& x) {
    const Vec<Scalar> s = forward(model, x);
    return make_prediction(s.template cast<double>());
}

enum class Optimizer { SGD, Adam };

std::string_view to_string(Optimizer opt) noexcept;
std::optional<Optimizer> parse_optimizer(std::string_view text) noexcept;

struct TrainConfig {
    std::size_t epochs = 30;
    std::size_t batch_size = 32;
    double learning_rate = 0.001;
    Optimizer optimizer = Optimizer::Adam;
    double validation_fraction = 0.2;
    std::uint64_t seed = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    void validate() const;
};

template <typename Scalar>
struct TrainResult {
    NetworkModel<Scalar> model;
    std::vector<EpochTrace> traces;
};

/// Mean loss and accuracy of a model over labeled data; (0, 0) when empty.
template <typename Scalar>
std::pair<double, double> evaluate_network(const NetworkModel<Scalar>& model,
                                           std::span<const LabeledVector> data) {
    if (data.empty()) return {0.0, 0.0};
    ForwardCache<Scalar> cache;
    double total_loss = 0.0;
    std::size_t correct = 0;
    for (const auto& sample : data) {
        check_dimension(model.dimension(), sample.x);
        const Vec<Scalar> s = forward_cached(model, sample.x, cache);
        total_loss += static_cast<double>(loss(s, sample.y));
        correct += label_at(argmax_lowest(s)) == sample.y ? 1 : 0;
    }
    const double n = static_cast<double>(data.size());
    return {total_loss / n, static_cast<double>(correct) / n};
}

namespace detail {

template <typename Scalar>
class ParameterUpdater {
public:
    ParameterUpdater(const NetworkModel<Scalar>& model, const TrainConfig& config)
        : config_(config) {
        if (config.optimizer == Optimizer::Adam) {
            m_ = Gradients<Scalar>::zeros_like(model);
            v_ = Gradients<Scalar>::zeros_like(model);
        }
    }

    void step(NetworkModel<Scalar>& model, const Gradients<Scalar>& g) {
        ++t_;
        const auto lr = static_cast<Scalar>(config_.learning_rate);
        if (config_.optimizer == Optimizer::SGD) {
            for (std::size_t k = 0; k < model.layers.size(); ++k) {
                model.layers[k].weights -= lr * g.weights[k];
                model.layers[k].bias -= lr * g.biases[k];
            }
            return;
        }
        const auto b1 = static_cast<Scalar>(config_.beta1);
        const auto b2 = static_cast<Scalar>(config_.beta2);
        const auto eps = static_cast<Scalar>(config_.epsilon);
        const auto c1 = static_cast<Scalar>(1.0 - std::pow(config_.beta1, static_cast<double>(t_)));
        const auto c2 = static_cast<Scalar>(1.0 - std::pow(config_.beta2, static_cast<double>(t_)));
        auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
            m = b1 * m + (Scalar(1) - b1) * grad;
            v = b2 * v + (Scalar(1) - b2) * grad.cwiseProduct(grad);
            param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
        };
        for (std::size_t k = 0; k < model.layers.size(); ++k) {
            update(model.layers[k].weights, g.weights[k], m_.weights[k], v_.weights[k]);
            update(model.layers[k].bias, g.biases[k], m_.biases[k], v_.biases[k]);
        }
    }

private:
    TrainConfig config_;
    Gradients<Scalar> m_, v_;
    std::size_t t_ = 0;
};

} // namespace detail

/// Mini-batch training on `train_data`, tracing both portions after every
/// epoch. The batch gradient is the mean of the per-example gradients. An
/// empty validation set gives val_loss = val_accuracy = 0 in the traces.
template <typename Scalar>
TrainResult<Scalar> train(NetworkModel<Scalar> model, std::span<const LabeledVector> train_data,
                          std::span<const LabeledVector> validation_data,
                          const TrainConfig& config) {
    config.validate();
    require(!train_data.empty(), ErrorKind::InvalidArgument, "training portion is empty");
    for (const auto& s : train_data) check_dimension(model.dimension(), s.x);
    for (const auto& s : validation_data) check_dimension(model.dimension(), s.x);

    Engine engine(config.seed);
    detail::ParameterUpdater<Scalar> updater(model, config);
    auto grads = Gradients<Scalar>::zeros_like(model);
    ForwardCache<Scalar> cache;
    std::vector<std::uint32_t> touched;
    std::vector<char> is_touched(model.dimension(), 0);

    TrainResult<Scalar> result;
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        const auto order = shuffled_indices(train_data.size(), engine);
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            for (std::size_t k = start; k < end; ++k) {
                const auto& sample = train_data[order[k]];
                accumulate_gradients(model, sample.x, sample.y, grads, cache);
                for (auto i : sample.x.indices)
                    if (!is_touched[i]) {
                        is_touched[i] = 1;
                        touched.push_back(i);
                    }
            }
            const auto inv = static_cast<Scalar>(1.0 / static_cast<double>(end - start));
            for (auto i : touched) grads.weights[0].col(static_cast<Eigen::Index>(i)) *= inv;
            for (std::size_t k = 1; k < grads.weights.size(); ++k) grads.weights[k] *= inv;
            for (auto& b : grads.biases) b *= inv;

            updater.step(model, grads);

            for (auto i : touched) {
                grads.weights[0].col(static_cast<Eigen::Index>(i)).setZero();
                is_touched[i] = 0;
            }
            touched.clear();
            for (std::size_t k = 1; k < grads.weights.size(); ++k) grads.weights[k].setZero();
            for (auto& b : grads.biases) b.setZero();
        }
        EpochTrace trace;
        trace.epoch = epoch;
        std::tie(trace.train_loss, trace.train_accuracy) = evaluate_network(model, train_data);
        std::tie(trace.val_loss, trace.val_accuracy) = evaluate_network(model, validation_data);
        result.traces.push_back(trace);
    }
    result.model = std::move(model);
    return result;
}

/// Holds out config.validation_fraction of `data` (seeded permutation, first
/// round(f * n) samples) and trains on the rest.
template <typename Scalar>
TrainResult<Scalar> train(NetworkModel<Scalar> model, std::span<const LabeledVector> data,
                          const TrainConfig& config) {
    config.validate();
    require(!data.empty(), ErrorKind::InvalidArgument, "training data is empty");
    Engine engine(config.seed);
    const auto order = shuffled_indices(data.size(), engine);
    const auto n_val = static_cast<std::size_t>(
        std::llround(config.validation_fraction * static_cast<double>(data.size())));
    require(n_val < data.size(), ErrorKind::InvalidArgument,
            "validation_fraction leaves no training samples");
    std::vector<LabeledVector> held_out, rest;
    for (std::size_t k = 0; k < order.size(); ++k)
        (k < n_val ? held_out : rest).push_back(data[order[k]]);
    TrainConfig inner = config;
    inner.seed = config.seed + 1;
    return train(std::move(model), std::span<const LabeledVector>(rest),
                 std::span<const LabeledVector>(held_out), inner);
}

} // namespace quill
