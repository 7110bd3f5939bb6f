#pragma once

#include <optional>
#include <string_view>
#include <variant>

#include "quill/baselines.hpp"
#include "quill/neuralnet.hpp"

namespace quill {

enum class ModelFamily { NaiveBayes, DecisionTree, LinearSVM, LogisticRegression, Model1, Model2 };

/// "nb", "dt", "svm", "lr", "model1", "model2".
std::string_view to_string(ModelFamily family) noexcept;
std::optional<ModelFamily> parse_model_family(std::string_view text) noexcept;

constexpr bool is_network(ModelFamily family) noexcept {
    return family == ModelFamily::Model1 || family == ModelFamily::Model2;
}

using AnyModel = std::variant<NaiveBayesModel, DecisionTreeModel, LinearSVMModel,
                              LogisticRegressionModel, NetworkModel<float>>;

struct TrainedModel {
    ModelFamily family = ModelFamily::Model2;
    AnyModel model;
};

std::size_t model_dimension(const AnyModel& model);
Prediction predict(const AnyModel& model, const SparseBinaryVector& x);

} // namespace quill
