#include "quill/eval.hpp"

#include <cstdio>
#include <ostream>

#include "quill/error.hpp"

namespace quill {

ConfusionMatrix confusion(std::span<const QualityLabel> predictions,
                          std::span<const QualityLabel> truths) {
    require(predictions.size() == truths.size(), ErrorKind::InvalidArgument,
            "predictions and truths differ in length");
    require(!truths.empty(), ErrorKind::InvalidArgument, "cannot tally an empty evaluation");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < truths.size(); ++i)
        ++cm.counts(static_cast<Eigen::Index>(index_of(truths[i])),
                    static_cast<Eigen::Index>(index_of(predictions[i])));
    return cm;
}

double accuracy(const ConfusionMatrix& cm) {
    const auto total = cm.total();
    require(total > 0, ErrorKind::InvalidArgument, "accuracy of an empty confusion matrix");
    return static_cast<double>(cm.counts.trace()) / static_cast<double>(total);
}

double one_vs_rest_accuracy(const ConfusionMatrix& cm, std::size_t c) {
    const auto tp = cm.tp(c), tn = cm.tn(c), fp = cm.fp(c), fn = cm.fn(c);
    require(tp + fp + tn + fn > 0, ErrorKind::InvalidArgument,
            "accuracy of an empty confusion matrix");
    return static_cast<double>(tp + tn) / static_cast<double>(tp + fp + tn + fn);
}

namespace {

double ratio(std::int64_t num, std::int64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

} // namespace

MetricsReport precision_recall_f1(const ConfusionMatrix& cm) {
    MetricsReport r;
    r.accuracy = accuracy(cm);
    const double total = static_cast<double>(cm.total());
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        r.precision[c] = ratio(cm.tp(c), cm.tp(c) + cm.fp(c));
        r.recall[c] = ratio(cm.tp(c), cm.tp(c) + cm.fn(c));
        const double pr = r.precision[c] + r.recall[c];
        r.f1[c] = pr == 0.0 ? 0.0 : 2.0 * r.precision[c] * r.recall[c] / pr;
        r.support[c] = cm.tp(c) + cm.fn(c);

        r.macro_precision += r.precision[c];
        r.macro_recall += r.recall[c];
        r.macro_f1 += r.f1[c];
        const double w = static_cast<double>(r.support[c]) / total;
        r.weighted_precision += w * r.precision[c];
        r.weighted_recall += w * r.recall[c];
        r.weighted_f1 += w * r.f1[c];
    }
    r.macro_precision /= kNumClasses;
    r.macro_recall /= kNumClasses;
    r.macro_f1 /= kNumClasses;
    return r;
}

void write_metrics_header(std::ostream& out) {
    out << "model,accuracy,macro_precision,macro_recall,macro_f1,weighted_precision,"
           "weighted_recall,weighted_f1";
    for (auto label : kAllLabels) {
        const auto name = to_string(label);
        out << ",precision_" << name << ",recall_" << name << ",f1_" << name;
    }
    out << '\n';
}

void write_metrics_row(std::ostream& out, const std::string& model, const MetricsReport& r) {
    auto f4 = [](double x) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f", x);
        return std::string(buf);
    };
    out << model << ',' << f4(r.accuracy) << ',' << f4(r.macro_precision) << ','
        << f4(r.macro_recall) << ',' << f4(r.macro_f1) << ',' << f4(r.weighted_precision) << ','
        << f4(r.weighted_recall) << ',' << f4(r.weighted_f1);
    for (std::size_t c = 0; c < kNumClasses; ++c)
        out << ',' << f4(r.precision[c]) << ',' << f4(r.recall[c]) << ',' << f4(r.f1[c]);
    out << '\n';
}

void CurveSeries::validate() const {
    for (std::size_t k = 1; k < traces.size(); ++k)
        require(traces[k].epoch == traces[k - 1].epoch + 1, ErrorKind::Format,
                "curve '" + model_name + "': epochs must increase by 1");
}

std::optional<std::size_t> detect_overfitting(const CurveSeries& series, std::size_t patience) {
    require(patience >= 1, ErrorKind::InvalidArgument, "patience must be >= 1");
    std::size_t run = 0;
    for (std::size_t k = 1; k < series.traces.size(); ++k) {
        run = series.traces[k].val_loss > series.traces[k - 1].val_loss ? run + 1 : 0;
        if (run >= patience) return series.traces[k].epoch;
    }
    return std::nullopt;
}

} // namespace quill
