#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "quill/labels.hpp"

namespace quill {

struct QuestionRecord {
    std::string id;
    std::string title;
    std::string body;
    std::string tags;
    std::string creation_date; // opaque, never parsed
    QualityLabel label = QualityLabel::HQ;

    bool operator==(const QuestionRecord&) const = default;
};

/// Header names of the columns to read. Defaults follow the public dataset.
struct ColumnSchema {
    std::string id = "Id";
    std::string title = "Title";
    std::string body = "Body";
    std::string tags = "Tags";
    std::string creation_date = "CreationDate";
    std::string label = "Y";
};

/// RFC 4180 style CSV: quoted fields, doubled quotes, embedded newlines, CRLF.
/// Returns all rows including the header. Throws Error(Parse) on an
/// unterminated quote or stray characters after a closing quote.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

/// Loads one record per data row in file order. Row numbers in error
/// messages count data rows from 1 (the header is row 0).
std::vector<QuestionRecord> load_dataset(const std::filesystem::path& path,
                                         const ColumnSchema& schema = {});

/// Same as load_dataset, from in-memory CSV text.
std::vector<QuestionRecord> parse_dataset(std::string_view csv_text,
                                          const ColumnSchema& schema = {});

struct SplitFractions {
    double train = 0.0;
    double validation = 0.0;
    double test = 0.0;
};

struct DatasetSplit {
    std::vector<QuestionRecord> train;
    std::vector<QuestionRecord> validation;
    std::vector<QuestionRecord> test;
    std::uint64_t seed = 0;
    SplitFractions fractions;
};

struct SplitOptions {
    double test_fraction = 0.2;
    double validation_fraction = 0.2; // of the part left after the test cut
    std::uint64_t seed = 0;
    bool stratified = false;
};

/// Seeded Fisher-Yates permutation then contiguous slicing: test first,
/// then validation, then train.
///   |test|       = round(test_fraction * N)
///   |validation| = round(validation_fraction * (N - |test|))
/// With `stratified`, the same part sizes are apportioned across classes
/// (largest remainder) and each class is shuffled independently.
DatasetSplit split_dataset(const std::vector<QuestionRecord>& records,
                           const SplitOptions& options);

DatasetSplit split_dataset(const std::vector<QuestionRecord>& records, double test_fraction,
                           double validation_fraction, std::uint64_t seed);

/// Ids per part, for exact split replay.
struct SplitManifest {
    std::string dataset_hash;
    std::uint64_t seed = 0;
    double test_fraction = 0.0;
    double validation_fraction = 0.0;
    std::vector<std::string> train;
    std::vector<std::string> validation;
    std::vector<std::string> test;
};

SplitManifest make_manifest(const DatasetSplit& split, std::string dataset_hash);
void write_manifest(std::ostream& out, const SplitManifest& manifest);
SplitManifest read_manifest(std::istream& in);

/// Rebuilds the split a manifest describes from the loaded records.
DatasetSplit apply_manifest(const std::vector<QuestionRecord>& records,
                            const SplitManifest& manifest);

struct SyntheticSpec {
    std::size_t n_records = 300;
    std::size_t vocabulary_size = 60;
    std::size_t n_classes = kNumClasses;
    double class_separation = 1.0;
    std::uint64_t seed = 0;
};

/// Generated questions whose words are "w<k>" for k < vocabulary_size. The
/// vocabulary is cut into n_classes contiguous blocks; each word of a
/// document comes from its class block with probability class_separation and
/// from the whole vocabulary otherwise. Labels are assigned round-robin
/// before a seeded shuffle, so class counts differ by at most one.
std::vector<QuestionRecord> generate_synthetic(const SyntheticSpec& spec);

/// Word block [first, last) owned by a class in the synthetic generator.
std::pair<std::size_t, std::size_t> synthetic_class_block(const SyntheticSpec& spec,
                                                          std::size_t class_index);

/// Per-class record counts.
std::array<std::size_t, kNumClasses> class_counts(const std::vector<QuestionRecord>& records);

} // namespace quill
