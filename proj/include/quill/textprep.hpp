#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "quill/corpus.hpp"
#include "quill/sparse_vector.hpp"

namespace quill {

struct TokenizerConfig {
    bool lowercase = true;
    bool strip_html = true;
    std::size_t min_token_length = 1;
};

/// Tokens are maximal runs of ASCII letters and digits. With strip_html, tags
/// are blanked out and the common character entities decoded first; text
/// between tags (code blocks included) is kept.
std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config = {});

using Stoplist = std::unordered_set<std::string>;

/// The embedded English stoplist (data/stopwords-en-v1.txt).
const Stoplist& default_stoplist();
inline constexpr std::string_view kDefaultStoplistName = "en-v1";

/// One word per line; '#' starts a comment line.
Stoplist parse_stoplist(std::string_view text);

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const Stoplist& stoplist);

class Vocabulary {
public:
    Vocabulary() = default;

    /// `words` must be sorted and unique; word k gets index k.
    Vocabulary(std::vector<std::string> words, std::size_t min_document_frequency);

    std::size_t size() const noexcept { return words_.size(); }
    bool empty() const noexcept { return words_.empty(); }
    std::size_t min_document_frequency() const noexcept { return min_df_; }
    const std::vector<std::string>& words() const noexcept { return words_; }
    const std::string& word(std::size_t index) const { return words_.at(index); }
    std::optional<std::uint32_t> find(const std::string& word) const;

    /// FNV-1a over the canonical file form.
    std::string content_hash() const;

    bool operator==(const Vocabulary& other) const {
        return words_ == other.words_ && min_df_ == other.min_df_;
    }

private:
    std::vector<std::string> words_;
    std::unordered_map<std::string, std::uint32_t> index_;
    std::size_t min_df_ = 1;
};

/// Every word found in at least min_document_frequency distinct documents,
/// indexed in sorted order.
Vocabulary build_vocabulary(std::span<const std::vector<std::string>> documents,
                            std::size_t min_document_frequency = 1);

/// `#quill-vocab v1 size=<N> min_df=<K>` then `word<TAB>index` per line.
void write_vocabulary(std::ostream& out, const Vocabulary& vocab);
Vocabulary read_vocabulary(std::istream& in);

SparseBinaryVector vectorize(const std::vector<std::string>& tokens, const Vocabulary& vocab);

enum class TextFields { TitleAndBody, Title, Body };

std::string_view to_string(TextFields fields) noexcept;
std::optional<TextFields> parse_text_fields(std::string_view text) noexcept;

/// Record -> tokens: field selection, tokenization and stopword removal.
struct TextPipeline {
    TextFields fields = TextFields::TitleAndBody;
    TokenizerConfig tokenizer;
    bool remove_stopwords = true;

    std::string text_of(const QuestionRecord& record) const;
    std::vector<std::string> tokens(std::string_view text) const;
    std::vector<std::string> tokens(const QuestionRecord& record) const {
        return tokens(text_of(record));
    }
};

} // namespace quill
