#pragma once

#include <cstddef>

#include <Eigen/Core>

#include "quill/labels.hpp"
#include "quill/sparse_vector.hpp"

namespace quill {

using ClassScores = Eigen::Matrix<double, kNumClasses, 1>;

struct Prediction {
    QualityLabel label = QualityLabel::HQ;
    ClassScores scores = ClassScores::Zero();
};

inline Prediction make_prediction(const ClassScores& scores) {
    return {label_at(argmax_lowest(scores)), scores};
}

/// Throws Error(Dimension) unless x.dimension == expected.
void check_dimension(std::size_t expected, const SparseBinaryVector& x);

} // namespace quill
