#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quill/artifact.hpp"
#include "quill/config.hpp"
#include "quill/eval.hpp"

namespace quill {

// File names inside RunConfig::out_dir.
inline constexpr std::string_view kManifestFile = "split.manifest";
inline constexpr std::string_view kVocabularyFile = "vocab.txt";
inline constexpr std::string_view kPrepareReportFile = "prepare_report.txt";
inline constexpr std::string_view kLockFile = ".quill.lock";

std::filesystem::path model_file(const RunConfig& config);           // model-<family>.qmdl
std::filesystem::path curves_file(const RunConfig& config);          // curves-<family>.csv
std::filesystem::path metrics_file(const RunConfig& config, std::string_view part);

/// Records of the configured source plus the hex FNV-1a identity of that
/// source: the file bytes, or the synthetic generator settings.
struct LoadedDataset {
    std::vector<QuestionRecord> records;
    std::string hash;
};
LoadedDataset load_source(const RunConfig& config);

struct PreparedData {
    LoadedDataset dataset;
    DatasetSplit split;
    Vocabulary vocabulary;
};

/// Split and vocabulary exactly as `prepare` would write them.
PreparedData prepare_data(const RunConfig& config);

std::vector<LabeledVector> vectorize_records(const std::vector<QuestionRecord>& records,
                                             const TextPipeline& text, const Vocabulary& vocab);

/// Trains the configured family on `train`. Networks trace every epoch
/// against `validation`; `traces` is left empty for the baselines.
TrainedModel train_model(const RunConfig& config, std::span<const LabeledVector> train,
                         std::span<const LabeledVector> validation,
                         std::vector<EpochTrace>& traces);

MetricsReport evaluate_model(const TrainedModel& model, std::span<const LabeledVector> data,
                             std::vector<QualityLabel>* predictions = nullptr);

/// Tokenizer settings a model was trained with, read back from its artifact.
TextPipeline text_pipeline_of(const ModelArtifact& artifact);

/// Exclusive advisory lock on an output directory, released on destruction.
class OutputLock {
public:
    explicit OutputLock(const std::filesystem::path& dir);
    ~OutputLock();
    OutputLock(const OutputLock&) = delete;
    OutputLock& operator=(const OutputLock&) = delete;

private:
    std::filesystem::path path_;
};

/// Writes the split manifest, the vocabulary and the prepare report.
void cmd_prepare(const RunConfig& config, std::ostream& log);

/// Trains and writes the model artifact, the validation metrics and, for
/// networks, the curves CSV. Reuses the prepared files when present; they
/// must match what this config would prepare.
std::filesystem::path cmd_train(const RunConfig& config, std::ostream& log);

/// Metrics on the test part of the split the manifest describes.
MetricsReport cmd_evaluate(const RunConfig& config, const std::filesystem::path& model_path,
                           const std::filesystem::path& manifest_path, std::ostream& log);

/// One input line in, `label<TAB>score_HQ<TAB>score_LQ_CLOSE<TAB>score_LQ_EDIT` out.
/// Without `vocab_path`, the vocabulary file recorded in the artifact is
/// looked up next to the model.
void cmd_predict(const std::filesystem::path& model_path,
                 const std::optional<std::filesystem::path>& vocab_path, std::istream& in,
                 std::ostream& out);

/// Merges curve CSVs into one with a leading `model` column and logs the
/// overfitting verdict per series.
void cmd_curves(const std::vector<std::filesystem::path>& files, std::ostream& out,
                std::size_t patience, std::ostream& log);

} // namespace quill
