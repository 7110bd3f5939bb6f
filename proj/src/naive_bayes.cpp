#include <cmath>
#include <limits>

#include "quill/baselines.hpp"
#include "quill/error.hpp"

namespace quill {

void NaiveBayesModel::refresh() {
    absent_total = log_likelihood_absent.rowwise().sum();
}

ClassScores NaiveBayesModel::scores(const SparseBinaryVector& x) const {
    ClassScores s = log_prior + absent_total;
    for (auto i : x.indices) {
        const auto col = static_cast<Eigen::Index>(i);
        s += log_likelihood_present.col(col) - log_likelihood_absent.col(col);
    }
    return s;
}

ClassScores NaiveBayesModel::posterior(const SparseBinaryVector& x) const {
    const ClassScores s = scores(x);
    const double top = s.maxCoeff();
    ClassScores p = (s.array() - top).exp().matrix();
    return p / p.sum();
}

NaiveBayesModel train_naive_bayes(std::span<const LabeledVector> data, double alpha) {
    const std::size_t dim = common_dimension(data);
    require(alpha > 0.0, ErrorKind::InvalidArgument, "naive Bayes alpha must be positive");

    const auto d = static_cast<Eigen::Index>(dim);
    Eigen::MatrixXd present = Eigen::MatrixXd::Zero(kNumClasses, d);
    ClassScores class_total = ClassScores::Zero();
    for (const auto& sample : data) {
        const auto c = static_cast<Eigen::Index>(index_of(sample.y));
        class_total(c) += 1.0;
        for (auto i : sample.x.indices) present(c, static_cast<Eigen::Index>(i)) += 1.0;
    }

    NaiveBayesModel model;
    model.smoothing_alpha = alpha;
    model.dimension = dim;
    const double n = static_cast<double>(data.size());
    model.log_likelihood_present.resize(kNumClasses, d);
    model.log_likelihood_absent.resize(kNumClasses, d);
    for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(kNumClasses); ++c) {
        model.log_prior(c) = class_total(c) > 0.0 ? std::log(class_total(c) / n)
                                                  : -std::numeric_limits<double>::infinity();
        const double denom = class_total(c) + 2.0 * alpha;
        for (Eigen::Index i = 0; i < d; ++i) {
            const double p = (present(c, i) + alpha) / denom;
            model.log_likelihood_present(c, i) = std::log(p);
            model.log_likelihood_absent(c, i) = std::log1p(-p);
        }
    }
    model.refresh();
    return model;
}

} // namespace quill
