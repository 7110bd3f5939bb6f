#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "quill/labels.hpp"

namespace quill {

/// Binary bag-of-words vector: value 1 at each listed index, 0 elsewhere.
/// Indices are strictly increasing and below `dimension`.
struct SparseBinaryVector {
    std::vector<std::uint32_t> indices;
    std::size_t dimension = 0;

    std::size_t nnz() const noexcept { return indices.size(); }
    bool operator==(const SparseBinaryVector&) const = default;
};

bool is_valid(const SparseBinaryVector& x) noexcept;

template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> densify(const SparseBinaryVector& x) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> dense =
        Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(static_cast<Eigen::Index>(x.dimension));
    for (auto i : x.indices) dense(static_cast<Eigen::Index>(i)) = Scalar(1);
    return dense;
}

struct LabeledVector {
    SparseBinaryVector x;
    QualityLabel y = QualityLabel::HQ;
};

/// Index of the largest score; exact ties go to the lowest index.
template <typename Derived>
std::size_t argmax_lowest(const Eigen::DenseBase<Derived>& scores) {
    std::size_t best = 0;
    for (Eigen::Index c = 1; c < scores.size(); ++c)
        if (scores(c) > scores(static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(c);
    return best;
}

} // namespace quill
