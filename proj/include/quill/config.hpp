#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "quill/baselines.hpp"
#include "quill/corpus.hpp"
#include "quill/models.hpp"
#include "quill/neuralnet.hpp"
#include "quill/textprep.hpp"

namespace quill {

enum class VocabularySource { TrainOnly, FullCorpus };

/// Everything a run needs. The defaults are the reference protocol: 80/20
/// train/test split, binary bag of words over title + body without
/// stopwords, Model 2, 30 epochs.
struct RunConfig {
    // [data]
    std::filesystem::path dataset_path;
    bool synthetic = false;
    ColumnSchema schema;
    SyntheticSpec synthetic_spec{3000, 500, kNumClasses, 1.0, 0};

    // [run]
    std::uint64_t seed = 0;
    std::filesystem::path out_dir = "quill-out";

    // [split]
    double test_fraction = 0.2;
    double validation_fraction = 0.2;
    bool stratified = false;

    // [text]
    TextPipeline text;

    // [vocab]
    std::size_t min_df = 1;
    VocabularySource vocab_source = VocabularySource::TrainOnly;

    // [model], [nb], [dt], [svm], [lr]
    ModelFamily family = ModelFamily::Model2;
    double nb_alpha = 1.0;
    TreeOptions tree;
    double svm_lambda = 1e-4;
    std::size_t svm_epochs = 5;
    std::vector<double> lr_grid = {1e-4, 1e-3, 1e-2, 1e-1, 1.0};
    std::size_t lr_folds = 10;
    LbfgsOptions lr_solver;

    // [train]
    TrainConfig train;
    Activation output_activation = Activation::Sigmoid;

    // [eval]
    std::size_t overfit_patience = 3;

    SplitOptions split_options() const;
    SvmOptions svm_options() const;
    LogisticOptions lr_options() const;
    NetworkSpec network_spec(std::size_t input_dimension) const;
    TrainConfig train_config() const;

    void validate() const;
};

/// Sets one `section.key`; throws Error(Config) on an unknown key or a
/// malformed value.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// `[section]` headings and `key = value` lines; '#' and ';' start comments.
void apply_config_text(RunConfig& config, std::istream& in);
RunConfig load_config(const std::filesystem::path& path);

/// Every setting as `section.key` -> canonical value text.
std::map<std::string, std::string> settings_of(const RunConfig& config);

} // namespace quill
