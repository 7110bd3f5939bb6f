#pragma once

// Baseline classifiers over binary bag-of-words vectors. All of them share
// one inference contract: per-class scores plus the argmax label, with exact
// ties going to the lowest class index.

#include <array>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "quill/labels.hpp"
#include "quill/lbfgs.hpp"
#include "quill/prediction.hpp"
#include "quill/sparse_vector.hpp"

namespace quill {

using ClassCounts = std::array<std::uint32_t, kNumClasses>;

/// Checks every vector has the same dimension and returns it.
std::size_t common_dimension(std::span<const LabeledVector> data);

// ---------------------------------------------------------------------------
// Bernoulli naive Bayes

struct NaiveBayesModel {
    ClassScores log_prior = ClassScores::Zero();
    Eigen::MatrixXd log_likelihood_present; // kNumClasses x dimension, log P(w_i = 1 | c)
    Eigen::MatrixXd log_likelihood_absent;  // log P(w_i = 0 | c)
    double smoothing_alpha = 1.0;
    std::size_t dimension = 0;

    /// sum_i log P(w_i = 0 | c); rebuilt by refresh().
    ClassScores absent_total = ClassScores::Zero();

    void refresh();

    /// Joint log-probability log P(c) + sum_i log P(w_i | c).
    ClassScores scores(const SparseBinaryVector& x) const;
    /// P(c | x), normalized.
    ClassScores posterior(const SparseBinaryVector& x) const;
};

/// P(w_i=1|c) = (count(w_i=1, c) + alpha) / (count(c) + 2 alpha), priors are
/// class frequencies. A class with no documents gets a prior of zero.
NaiveBayesModel train_naive_bayes(std::span<const LabeledVector> data, double alpha = 1.0);

// ---------------------------------------------------------------------------
// CART decision tree with "feature present?" tests

struct TreeNode {
    std::int32_t feature = -1; // -1 for a leaf
    std::int32_t absent_child = -1;
    std::int32_t present_child = -1;
    std::uint32_t depth = 0;
    ClassCounts counts{};
    QualityLabel label = QualityLabel::HQ;

    bool is_leaf() const noexcept { return feature < 0; }
};

struct TreeOptions {
    std::size_t max_depth = 32;
    std::size_t min_samples_split = 2;
};

struct DecisionTreeModel {
    std::vector<TreeNode> nodes; // nodes[0] is the root
    std::size_t max_depth = 32;
    std::size_t min_samples_split = 2;
    std::size_t dimension = 0;

    const TreeNode& leaf_for(const SparseBinaryVector& x) const;
    /// Class fractions at the leaf reached by x.
    ClassScores scores(const SparseBinaryVector& x) const;
    std::size_t depth() const;
};

/// 1 - sum_c p_c^2; zero for an empty set.
double gini(const ClassCounts& counts);

/// Greedy CART minimizing weighted Gini impurity. Candidate features are the
/// ones present in at least one sample at the node; ties go to the lowest
/// feature index. Stops on purity, max_depth or min_samples_split.
DecisionTreeModel train_decision_tree(std::span<const LabeledVector> data,
                                      const TreeOptions& options = {});

// ---------------------------------------------------------------------------
// One-vs-rest linear SVM (Pegasos)

struct SvmOptions {
    double lambda = 1e-4;
    std::size_t epochs = 5;
    std::uint64_t seed = 0;
};

struct LinearSVMModel {
    Eigen::MatrixXd weights; // kNumClasses x dimension
    ClassScores bias = ClassScores::Zero();
    double regularization_lambda = 1e-4;
    std::size_t epochs = 5;
    std::size_t dimension = 0;

    /// Signed margins w_c . x + b_c.
    ClassScores scores(const SparseBinaryVector& x) const;
};

/// Hinge loss with step 1/(lambda t); the bias is an extra always-on feature
/// and is regularized with the weights. Each epoch visits the samples in a
/// seeded permutation shared by the three binary problems.
LinearSVMModel train_linear_svm(std::span<const LabeledVector> data, const SvmOptions& options = {});

// ---------------------------------------------------------------------------
// Multinomial logistic regression with k-fold grid search on the L2 weight

struct GridPoint {
    double l2_lambda = 0.0;
    double mean_accuracy = 0.0;
    std::vector<double> fold_accuracies;
};

struct LogisticRegressionModel {
    Eigen::MatrixXd weights; // kNumClasses x dimension
    ClassScores bias = ClassScores::Zero();
    double l2_lambda = 0.0;
    std::vector<GridPoint> grid_report;
    std::size_t dimension = 0;

    ClassScores logits(const SparseBinaryVector& x) const;
    /// Softmax probabilities; these are the predict scores.
    ClassScores scores(const SparseBinaryVector& x) const;
};

struct LogisticOptions {
    std::vector<double> grid = {1e-4, 1e-3, 1e-2, 1e-1, 1.0};
    std::size_t folds = 10;
    std::uint64_t seed = 0;
    LbfgsOptions solver = {};
};

/// Seeded permutation cut into `folds` contiguous chunks; sizes differ by at
/// most one.
std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t folds,
                                                 std::uint64_t seed);

/// Minimizes mean cross-entropy + (lambda / 2) ||W||^2 (bias unpenalized).
LogisticRegressionModel fit_logistic(std::span<const LabeledVector> data, double l2_lambda,
                                     const LbfgsOptions& solver = {});

/// k-fold CV per grid candidate, best mean accuracy wins (ties -> smaller
/// lambda), then a refit on all data.
LogisticRegressionModel train_logistic_regression(std::span<const LabeledVector> data,
                                                  const LogisticOptions& options = {});

// ---------------------------------------------------------------------------
// Shared inference

template <typename Model>
concept ScoringModel = requires(const Model& m, const SparseBinaryVector& x) {
    { m.scores(x) } -> std::convertible_to<ClassScores>;
    { m.dimension } -> std::convertible_to<std::size_t>;
};

template <ScoringModel Model>
Prediction predict(const Model& model, const SparseBinaryVector& x) {
    check_dimension(model.dimension, x);
    return make_prediction(model.scores(x));
}

/// Same, with a score post-processing hook applied before the argmax.
template <ScoringModel Model, typename PostProcess>
Prediction predict(const Model& model, const SparseBinaryVector& x, PostProcess&& post) {
    check_dimension(model.dimension, x);
    return make_prediction(post(model.scores(x)));
}

} // namespace quill
