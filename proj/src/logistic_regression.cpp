#include <algorithm>
#include <cmath>

#include "quill/baselines.hpp"
#include "quill/error.hpp"
#include "quill/random.hpp"

namespace quill {

namespace {

ClassScores softmax(const ClassScores& z) {
    ClassScores e = (z.array() - z.maxCoeff()).exp().matrix();
    return e / e.sum();
}

} // namespace

ClassScores LogisticRegressionModel::logits(const SparseBinaryVector& x) const {
    ClassScores s = bias;
    for (auto i : x.indices) s += weights.col(static_cast<Eigen::Index>(i));
    return s;
}

ClassScores LogisticRegressionModel::scores(const SparseBinaryVector& x) const {
    return softmax(logits(x));
}

std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t folds,
                                                 std::uint64_t seed) {
    require(folds >= 2, ErrorKind::InvalidArgument, "need at least 2 folds");
    require(n >= folds, ErrorKind::InvalidArgument,
            "data size " + std::to_string(n) + " is smaller than fold count " +
                std::to_string(folds));
    Engine engine(seed);
    const auto order = shuffled_indices(n, engine);
    std::vector<std::vector<std::size_t>> result(folds);
    for (std::size_t f = 0; f < folds; ++f)
        result[f].assign(order.begin() + static_cast<std::ptrdiff_t>(f * n / folds),
                         order.begin() + static_cast<std::ptrdiff_t>((f + 1) * n / folds));
    return result;
}

LogisticRegressionModel fit_logistic(std::span<const LabeledVector> data, double l2_lambda,
                                     const LbfgsOptions& solver) {
    const std::size_t dim = common_dimension(data);
    require(l2_lambda >= 0.0, ErrorKind::InvalidArgument, "l2 lambda must be non-negative");

    const auto d = static_cast<Eigen::Index>(dim);
    const Eigen::Index k = kNumClasses;
    const double inv_n = 1.0 / static_cast<double>(data.size());

    // theta = [vec(W) column-major (k x d), b]
    auto objective = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& grad) {
        Eigen::Map<const Eigen::MatrixXd> W(theta.data(), k, d);
        const auto b = theta.tail(k);
        grad.setZero(theta.size());
        Eigen::Map<Eigen::MatrixXd> gW(grad.data(), k, d);
        auto gb = grad.tail(k);

        double loss = 0.0;
        for (const auto& sample : data) {
            ClassScores z = b;
            for (auto i : sample.x.indices) z += W.col(static_cast<Eigen::Index>(i));
            const double top = z.maxCoeff();
            const double log_norm = top + std::log((z.array() - top).exp().sum());
            const auto y = static_cast<Eigen::Index>(index_of(sample.y));
            loss += log_norm - z(y);
            ClassScores residual = (z.array() - log_norm).exp().matrix();
            residual(y) -= 1.0;
            residual *= inv_n;
            gb += residual;
            for (auto i : sample.x.indices) gW.col(static_cast<Eigen::Index>(i)) += residual;
        }
        gW += l2_lambda * W;
        return loss * inv_n + 0.5 * l2_lambda * W.squaredNorm();
    };

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(k * d + k);
    minimize_lbfgs(objective, theta, solver);

    LogisticRegressionModel model;
    model.dimension = dim;
    model.l2_lambda = l2_lambda;
    model.weights = Eigen::Map<const Eigen::MatrixXd>(theta.data(), k, d);
    model.bias = theta.tail(k);
    return model;
}

LogisticRegressionModel train_logistic_regression(std::span<const LabeledVector> data,
                                                  const LogisticOptions& options) {
    require(!options.grid.empty(), ErrorKind::InvalidArgument, "logistic regression grid is empty");
    for (double lambda : options.grid)
        require(lambda >= 0.0, ErrorKind::InvalidArgument, "grid lambdas must be non-negative");
    common_dimension(data);
    const auto folds = make_folds(data.size(), options.folds, options.seed);

    std::vector<GridPoint> report;
    std::size_t best = 0;
    for (std::size_t g = 0; g < options.grid.size(); ++g) {
        GridPoint point;
        point.l2_lambda = options.grid[g];
        for (std::size_t f = 0; f < folds.size(); ++f) {
            std::vector<LabeledVector> train;
            train.reserve(data.size() - folds[f].size());
            for (std::size_t other = 0; other < folds.size(); ++other)
                if (other != f)
                    for (auto i : folds[other]) train.push_back(data[i]);
            const auto model = fit_logistic(train, point.l2_lambda, options.solver);
            std::size_t correct = 0;
            for (auto i : folds[f])
                correct += predict(model, data[i].x).label == data[i].y ? 1 : 0;
            point.fold_accuracies.push_back(static_cast<double>(correct) /
                                            static_cast<double>(folds[f].size()));
        }
        double sum = 0.0;
        for (double a : point.fold_accuracies) sum += a;
        point.mean_accuracy = sum / static_cast<double>(point.fold_accuracies.size());
        report.push_back(std::move(point));
        if (g > 0) {
            const auto& cand = report[g];
            const auto& cur = report[best];
            if (cand.mean_accuracy > cur.mean_accuracy ||
                (cand.mean_accuracy == cur.mean_accuracy && cand.l2_lambda < cur.l2_lambda))
                best = g;
        }
    }

    auto model = fit_logistic(data, report[best].l2_lambda, options.solver);
    model.grid_report = std::move(report);
    return model;
}

} // namespace quill
