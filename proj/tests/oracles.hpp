#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance runner.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "quill/baselines.hpp"
#include "quill/eval.hpp"
#include "quill/neuralnet.hpp"

namespace quill::oracle {

inline SparseBinaryVector from_mask(unsigned mask, std::size_t dim) {
    SparseBinaryVector x;
    x.dimension = dim;
    for (std::uint32_t i = 0; i < dim; ++i)
        if (mask >> i & 1u) x.indices.push_back(i);
    return x;
}

// ---------------------------------------------------------------------------
// Bernoulli naive Bayes, straight from Bayes' rule with raw counts.

inline std::array<double, kNumClasses> bayes_posterior(const std::vector<LabeledVector>& data,
                                                       const SparseBinaryVector& x, double alpha) {
    const std::size_t dim = x.dimension;
    std::array<double, kNumClasses> joint{};
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        double n_c = 0;
        std::vector<double> present(dim, 0.0);
        for (const auto& s : data) {
            if (index_of(s.y) != c) continue;
            n_c += 1;
            for (auto i : s.x.indices) present[i] += 1;
        }
        double p = n_c / static_cast<double>(data.size());
        for (std::size_t i = 0; i < dim; ++i) {
            const double p1 = (present[i] + alpha) / (n_c + 2 * alpha);
            const bool on = std::find(x.indices.begin(), x.indices.end(), i) != x.indices.end();
            p *= on ? p1 : 1 - p1;
        }
        joint[c] = p;
    }
    const double z = joint[0] + joint[1] + joint[2];
    for (auto& j : joint) j /= z;
    return joint;
}

struct NaiveBayesSweep {
    std::size_t corpora = 0;
    std::size_t queries = 0;
    double worst_posterior_error = 0.0;
    std::size_t label_disagreements = 0; // among queries whose oracle argmax is unambiguous
};

/// Every corpus of 1..max_docs documents over `dim` binary features with
/// labels from the first 2 or 3 classes; every possible query vector.
inline NaiveBayesSweep sweep_naive_bayes(std::size_t max_docs = 4, std::size_t dim = 3) {
    NaiveBayesSweep r;
    const std::size_t patterns = std::size_t{1} << dim;
    for (std::size_t n_classes = 2; n_classes <= 3; ++n_classes) {
        const std::size_t choices = patterns * n_classes;
        for (std::size_t n_docs = 1; n_docs <= max_docs; ++n_docs) {
            std::size_t total = 1;
            for (std::size_t k = 0; k < n_docs; ++k) total *= choices;
            for (std::size_t code = 0; code < total; ++code) {
                std::vector<LabeledVector> data;
                std::size_t rest = code;
                for (std::size_t k = 0; k < n_docs; ++k) {
                    const std::size_t pick = rest % choices;
                    rest /= choices;
                    data.push_back({from_mask(static_cast<unsigned>(pick % patterns), dim),
                                    label_at(pick / patterns)});
                }
                const auto model = train_naive_bayes(data, 1.0);
                ++r.corpora;
                for (unsigned q = 0; q < patterns; ++q) {
                    const auto x = from_mask(q, dim);
                    const auto post = model.posterior(x);
                    const auto truth = bayes_posterior(data, x, 1.0);
                    ++r.queries;
                    for (std::size_t c = 0; c < kNumClasses; ++c)
                        r.worst_posterior_error = std::max(
                            r.worst_posterior_error,
                            std::abs(post(static_cast<Eigen::Index>(c)) - truth[c]));
                    std::size_t best = 0;
                    for (std::size_t c = 1; c < kNumClasses; ++c)
                        if (truth[c] > truth[best]) best = c;
                    bool clear = true;
                    for (std::size_t c = 0; c < kNumClasses; ++c)
                        if (c != best && truth[best] - truth[c] < 1e-9) clear = false;
                    if (clear && predict(model, x).label != label_at(best)) ++r.label_disagreements;
                }
            }
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Central finite differences on random small networks.

/// |a - n| / max(|a|, |n|, 1e-7); the floor keeps entries that are zero up to
/// rounding from dividing by nothing.
inline double relative_error(double analytic, double numeric) {
    return std::abs(analytic - numeric) /
           std::max({std::abs(analytic), std::abs(numeric), 1e-7});
}

struct GradientSweep {
    std::size_t networks = 0;
    std::size_t entries = 0;
    double worst_relative_error = 0.0;
    std::size_t sigmoid_outputs = 0;
    std::size_t softmax_outputs = 0;
};

inline bool near_kink(const NetworkModel<double>& model, const SparseBinaryVector& x) {
    ForwardCache<double> cache;
    forward_cached(model, x, cache);
    for (std::size_t k = 0; k < model.layers.size(); ++k)
        if (model.layers[k].activation == Activation::ReLU &&
            (cache.pre[k].array().abs() < 1e-3).any())
            return true;
    return false;
}

/// Random networks with input dim <= 10 and 1..3 layers; alternates the
/// output activation and draws hidden activations from ReLU / Sigmoid /
/// Identity. Networks whose ReLU pre-activations sit within 1e-3 of the kink
/// are redrawn, since a finite difference across the kink is meaningless.
inline GradientSweep sweep_gradients(std::size_t n_networks, std::uint64_t seed, double h = 1e-5) {
    GradientSweep r;
    std::mt19937_64 rng(seed);
    auto pick = [&](std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    };
    while (r.networks < n_networks) {
        NetworkSpec spec;
        spec.input_dimension = pick(1, 10);
        const std::size_t depth = pick(1, 3);
        for (std::size_t k = 0; k + 1 < depth; ++k) spec.layer_units.push_back(pick(1, 6));
        spec.layer_units.push_back(kNumClasses);
        constexpr Activation hidden[] = {Activation::ReLU, Activation::Sigmoid, Activation::Identity};
        spec.hidden_activation = hidden[pick(0, 2)];
        spec.output_activation = r.networks % 2 == 0 ? Activation::Sigmoid : Activation::Softmax;
        spec.seed = rng();
        auto model = init_network<double>(spec);
        std::normal_distribution<double> noise(0.0, 0.3);
        for (auto& layer : model.layers)
            for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias(i) = noise(rng);

        SparseBinaryVector x;
        x.dimension = spec.input_dimension;
        for (std::uint32_t i = 0; i < spec.input_dimension; ++i)
            if (rng() % 2) x.indices.push_back(i);
        const auto label = label_at(pick(0, kNumClasses - 1));
        if (near_kink(model, x)) continue;

        const auto grads = backward(model, x, label);
        for (std::size_t k = 0; k < model.layers.size(); ++k) {
            auto perturb = [&](double& param, double analytic) {
                const double saved = param;
                param = saved + h;
                const double up = loss(forward(model, x), label);
                param = saved - h;
                const double down = loss(forward(model, x), label);
                param = saved;
                const double numeric = (up - down) / (2 * h);
                r.worst_relative_error =
                    std::max(r.worst_relative_error, relative_error(analytic, numeric));
                ++r.entries;
            };
            auto& layer = model.layers[k];
            for (Eigen::Index i = 0; i < layer.weights.rows(); ++i)
                for (Eigen::Index j = 0; j < layer.weights.cols(); ++j)
                    perturb(layer.weights(i, j), grads.weights[k](i, j));
            for (Eigen::Index i = 0; i < layer.bias.size(); ++i)
                perturb(layer.bias(i), grads.biases[k](i));
        }
        ++r.networks;
        (spec.output_activation == Activation::Sigmoid ? r.sigmoid_outputs : r.softmax_outputs) += 1;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Metrics recomputed from the label lists with no confusion matrix.

struct BruteMetrics {
    std::size_t mismatches = 0;
    std::array<double, kNumClasses> precision{}, recall{}, f1{};
    double macro_precision = 0, macro_recall = 0, macro_f1 = 0;
};

inline BruteMetrics brute_metrics(const std::vector<QualityLabel>& pred,
                                  const std::vector<QualityLabel>& truth) {
    BruteMetrics m;
    for (std::size_t i = 0; i < pred.size(); ++i) m.mismatches += pred[i] != truth[i];
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        const auto label = label_at(c);
        double tp = 0, predicted = 0, actual = 0;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            tp += pred[i] == label && truth[i] == label;
            predicted += pred[i] == label;
            actual += truth[i] == label;
        }
        m.precision[c] = predicted > 0 ? tp / predicted : 0.0;
        m.recall[c] = actual > 0 ? tp / actual : 0.0;
        const double s = m.precision[c] + m.recall[c];
        m.f1[c] = s > 0 ? 2 * m.precision[c] * m.recall[c] / s : 0.0;
        m.macro_precision += m.precision[c] / kNumClasses;
        m.macro_recall += m.recall[c] / kNumClasses;
        m.macro_f1 += m.f1[c] / kNumClasses;
    }
    return m;
}

struct MetricSweep {
    std::size_t cases = 0;
    std::size_t accuracy_failures = 0;      // exact comparison
    double worst_macro_error = 0.0;
    std::size_t one_vs_rest_failures = 0;   // exact comparison
};

/// Random prediction/truth pairs of length 1..200.
inline MetricSweep sweep_metrics(std::size_t n_cases, std::uint64_t seed) {
    MetricSweep r;
    std::mt19937_64 rng(seed);
    for (; r.cases < n_cases; ++r.cases) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 200)(rng);
        std::vector<QualityLabel> pred(n), truth(n);
        // skewed draws now and then so some classes go missing
        const std::size_t span = std::uniform_int_distribution<std::size_t>(1, kNumClasses)(rng);
        for (std::size_t i = 0; i < n; ++i) {
            truth[i] = label_at(rng() % span);
            pred[i] = rng() % 4 == 0 ? truth[i] : label_at(rng() % kNumClasses);
        }
        const auto cm = confusion(pred, truth);
        const auto report = precision_recall_f1(cm);
        const auto brute = brute_metrics(pred, truth);

        const double direct = static_cast<double>(n - brute.mismatches) / static_cast<double>(n);
        if (accuracy(cm) != direct || report.accuracy != direct) ++r.accuracy_failures;
        for (double e : {report.macro_precision - brute.macro_precision,
                         report.macro_recall - brute.macro_recall, report.macro_f1 - brute.macro_f1})
            r.worst_macro_error = std::max(r.worst_macro_error, std::abs(e));

        for (std::size_t c = 0; c < kNumClasses; ++c) {
            std::int64_t tp = 0, tn = 0, fp = 0, fn = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const bool p = pred[i] == label_at(c), t = truth[i] == label_at(c);
                tp += p && t;
                tn += !p && !t;
                fp += p && !t;
                fn += !p && t;
            }
            const double formula =
                static_cast<double>(tp + tn) / static_cast<double>(tp + fp + tn + fn);
            if (cm.tp(c) != tp || cm.tn(c) != tn || cm.fp(c) != fp || cm.fn(c) != fn ||
                one_vs_rest_accuracy(cm, c) != formula)
                ++r.one_vs_rest_failures;
        }
    }
    return r;
}

} // namespace quill::oracle
