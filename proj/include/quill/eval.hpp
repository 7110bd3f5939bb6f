#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "quill/labels.hpp"
#include "quill/trace.hpp"

namespace quill {

using CountMatrix = Eigen::Matrix<std::int64_t, kNumClasses, kNumClasses>;

/// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
    CountMatrix counts = CountMatrix::Zero();

    std::int64_t total() const { return counts.sum(); }

    // one-vs-rest readout for class c
    std::int64_t tp(std::size_t c) const { return counts(idx(c), idx(c)); }
    std::int64_t fn(std::size_t c) const { return counts.row(idx(c)).sum() - tp(c); }
    std::int64_t fp(std::size_t c) const { return counts.col(idx(c)).sum() - tp(c); }
    std::int64_t tn(std::size_t c) const { return total() - tp(c) - fn(c) - fp(c); }

private:
    static Eigen::Index idx(std::size_t c) { return static_cast<Eigen::Index>(c); }
};

ConfusionMatrix confusion(std::span<const QualityLabel> predictions,
                          std::span<const QualityLabel> truths);

/// trace(counts) / total.
double accuracy(const ConfusionMatrix& cm);

/// (TP + TN) / (TP + FP + TN + FN) for class c against the rest.
double one_vs_rest_accuracy(const ConfusionMatrix& cm, std::size_t c);

struct MetricsReport {
    double accuracy = 0.0;
    std::array<double, kNumClasses> precision{};
    std::array<double, kNumClasses> recall{};
    std::array<double, kNumClasses> f1{};
    std::array<std::int64_t, kNumClasses> support{};
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    double weighted_precision = 0.0; // weighted by true-class support
    double weighted_recall = 0.0;
    double weighted_f1 = 0.0;
};

/// Per-class precision and recall are 0 when their denominator is 0; f1 is 0
/// when precision + recall is 0.
MetricsReport precision_recall_f1(const ConfusionMatrix& cm);

/// Header for write_metrics_row.
void write_metrics_header(std::ostream& out);
/// `model,accuracy,macro_precision,macro_recall,macro_f1,weighted_*,then
/// precision/recall/f1 per class`, 4 decimal places.
void write_metrics_row(std::ostream& out, const std::string& model, const MetricsReport& report);

struct CurveSeries {
    std::string model_name;
    std::vector<EpochTrace> traces;

    /// Throws unless epochs increase by exactly one from row to row.
    void validate() const;
};

/// Earliest epoch ending a run of `patience` consecutive strict increases
/// of val_loss, if any.
std::optional<std::size_t> detect_overfitting(const CurveSeries& series, std::size_t patience = 3);

} // namespace quill
