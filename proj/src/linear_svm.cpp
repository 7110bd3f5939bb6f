#include "quill/baselines.hpp"
#include "quill/error.hpp"
#include "quill/random.hpp"

namespace quill {

ClassScores LinearSVMModel::scores(const SparseBinaryVector& x) const {
    ClassScores s = bias;
    for (auto i : x.indices) s += weights.col(static_cast<Eigen::Index>(i));
    return s;
}

LinearSVMModel train_linear_svm(std::span<const LabeledVector> data, const SvmOptions& options) {
    const std::size_t dim = common_dimension(data);
    require(options.lambda > 0.0, ErrorKind::InvalidArgument, "svm lambda must be positive");
    require(options.epochs >= 1, ErrorKind::InvalidArgument, "svm epochs must be >= 1");

    const std::size_t n = data.size();
    std::vector<std::vector<std::size_t>> epoch_orders;
    Engine engine(options.seed);
    for (std::size_t e = 0; e < options.epochs; ++e) epoch_orders.push_back(shuffled_indices(n, engine));

    LinearSVMModel model;
    model.regularization_lambda = options.lambda;
    model.epochs = options.epochs;
    model.dimension = dim;
    model.weights = Eigen::MatrixXd::Zero(kNumClasses, static_cast<Eigen::Index>(dim));

    const auto bias_slot = static_cast<Eigen::Index>(dim);
    for (std::size_t cls = 0; cls < kNumClasses; ++cls) {
        // w = scale * v, with v(dim) the weight of the constant bias feature
        Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim) + 1);
        double scale = 1.0;
        std::size_t t = 0;
        for (const auto& order : epoch_orders) {
            for (auto i : order) {
                ++t;
                const auto& sample = data[i];
                const double y = index_of(sample.y) == cls ? 1.0 : -1.0;
                double dot = v(bias_slot);
                for (auto f : sample.x.indices) dot += v(static_cast<Eigen::Index>(f));
                const double margin = y * scale * dot;

                const double eta = 1.0 / (options.lambda * static_cast<double>(t));
                const double shrink = 1.0 - eta * options.lambda;
                if (shrink <= 0.0) {
                    v.setZero();
                    scale = 1.0;
                } else {
                    scale *= shrink;
                }
                if (margin < 1.0) {
                    const double step = eta * y / scale;
                    v(bias_slot) += step;
                    for (auto f : sample.x.indices) v(static_cast<Eigen::Index>(f)) += step;
                }
                if (scale < 1e-9) {
                    v *= scale;
                    scale = 1.0;
                }
            }
        }
        const auto c = static_cast<Eigen::Index>(cls);
        model.weights.row(c) = scale * v.head(static_cast<Eigen::Index>(dim)).transpose();
        model.bias(c) = scale * v(bias_slot);
    }
    return model;
}

} // namespace quill
