#include "quill/textprep.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <ostream>
#include <sstream>
#include <utility>

#include "quill/error.hpp"
#include "quill/hash.hpp"

namespace quill {

extern const std::string_view kEmbeddedStoplistText; // generated from data/

bool is_valid(const SparseBinaryVector& x) noexcept {
    for (std::size_t k = 0; k < x.indices.size(); ++k) {
        if (x.indices[k] >= x.dimension) return false;
        if (k > 0 && x.indices[k] <= x.indices[k - 1]) return false;
    }
    return true;
}

namespace {

bool is_alnum(char c) noexcept {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

bool is_alpha(char c) noexcept { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

constexpr std::array<std::pair<std::string_view, char>, 7> kEntities = {{
    {"&lt;", '<'},
    {"&gt;", '>'},
    {"&amp;", '&'},
    {"&quot;", '"'},
    {"&#39;", '\''},
    {"&apos;", '\''},
    {"&nbsp;", ' '},
}};

std::string strip_markup(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '<' && i + 1 < text.size()) {
            const char next = text[i + 1];
            if (is_alpha(next) || next == '/' || next == '!' || next == '?') {
                const auto close = text.find('>', i + 1);
                if (close != std::string_view::npos) {
                    out.push_back(' ');
                    i = close;
                    continue;
                }
            }
        }
        if (c == '&') {
            bool decoded = false;
            for (const auto& [name, ch] : kEntities) {
                if (text.substr(i).starts_with(name)) {
                    out.push_back(ch);
                    i += name.size() - 1;
                    decoded = true;
                    break;
                }
            }
            if (decoded) continue;
        }
        out.push_back(c);
    }
    return out;
}

} // namespace

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config) {
    std::string cleaned;
    if (config.strip_html) {
        cleaned = strip_markup(text);
        text = cleaned;
    }
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && !is_alnum(text[i])) ++i;
        const std::size_t start = i;
        while (i < text.size() && is_alnum(text[i])) ++i;
        if (i > start && i - start >= config.min_token_length) {
            std::string token(text.substr(start, i - start));
            if (config.lowercase)
                for (char& ch : token)
                    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
            tokens.push_back(std::move(token));
        }
    }
    return tokens;
}

Stoplist parse_stoplist(std::string_view text) {
    Stoplist words;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(pos, end - pos);
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
        if (!line.empty() && line.front() != '#') words.emplace(line);
        pos = end + 1;
    }
    return words;
}

const Stoplist& default_stoplist() {
    static const Stoplist words = parse_stoplist(kEmbeddedStoplistText);
    return words;
}

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const Stoplist& stoplist) {
    std::vector<std::string> kept;
    kept.reserve(tokens.size());
    for (const auto& t : tokens)
        if (!stoplist.contains(t)) kept.push_back(t);
    return kept;
}

Vocabulary::Vocabulary(std::vector<std::string> words, std::size_t min_document_frequency)
    : words_(std::move(words)), min_df_(min_document_frequency) {
    index_.reserve(words_.size());
    for (std::size_t k = 0; k < words_.size(); ++k) {
        if (k > 0 && !(words_[k - 1] < words_[k]))
            fail(ErrorKind::InvalidArgument, "vocabulary words must be sorted and unique");
        index_.emplace(words_[k], static_cast<std::uint32_t>(k));
    }
}

std::optional<std::uint32_t> Vocabulary::find(const std::string& word) const {
    auto it = index_.find(word);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::string Vocabulary::content_hash() const {
    std::ostringstream os;
    write_vocabulary(os, *this);
    return hex64(fnv1a(os.str()));
}

Vocabulary build_vocabulary(std::span<const std::vector<std::string>> documents,
                            std::size_t min_document_frequency) {
    require(!documents.empty(), ErrorKind::InvalidArgument,
            "cannot build a vocabulary from zero documents");
    require(min_document_frequency >= 1, ErrorKind::InvalidArgument, "min_df must be >= 1");

    std::unordered_map<std::string, std::size_t> document_frequency;
    std::vector<std::string> distinct;
    for (const auto& doc : documents) {
        distinct.assign(doc.begin(), doc.end());
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        for (auto& w : distinct) ++document_frequency[w];
    }
    std::vector<std::string> words;
    for (auto& [word, df] : document_frequency)
        if (df >= min_document_frequency) words.push_back(word);
    std::sort(words.begin(), words.end());
    return Vocabulary(std::move(words), min_document_frequency);
}

void write_vocabulary(std::ostream& out, const Vocabulary& vocab) {
    out << "#quill-vocab v1 size=" << vocab.size() << " min_df=" << vocab.min_document_frequency()
        << '\n';
    for (std::size_t k = 0; k < vocab.size(); ++k) out << vocab.word(k) << '\t' << k << '\n';
}

Vocabulary read_vocabulary(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || !line.starts_with("#quill-vocab v1 "))
        fail(ErrorKind::Format, "vocabulary: missing '#quill-vocab v1' header");
    std::size_t size = 0;
    std::size_t min_df = 1;
    bool have_size = false;
    std::istringstream header(line.substr(16));
    std::string token;
    while (header >> token) {
        if (token.starts_with("size=")) {
            size = std::stoull(token.substr(5));
            have_size = true;
        } else if (token.starts_with("min_df=")) {
            min_df = std::stoull(token.substr(7));
        }
    }
    require(have_size, ErrorKind::Format, "vocabulary: header lacks size=");

    std::vector<std::string> words;
    words.reserve(size);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        require(tab != std::string::npos, ErrorKind::Format,
                "vocabulary line " + std::to_string(words.size() + 2) + ": expected word<TAB>index");
        const auto index = std::stoull(line.substr(tab + 1));
        require(index == words.size(), ErrorKind::Format,
                "vocabulary line " + std::to_string(words.size() + 2) + ": index out of sequence");
        words.push_back(line.substr(0, tab));
    }
    require(words.size() == size, ErrorKind::Format,
            "vocabulary: header size " + std::to_string(size) + " but " +
                std::to_string(words.size()) + " entries");
    return Vocabulary(std::move(words), min_df);
}

SparseBinaryVector vectorize(const std::vector<std::string>& tokens, const Vocabulary& vocab) {
    SparseBinaryVector v;
    v.dimension = vocab.size();
    for (const auto& t : tokens)
        if (auto idx = vocab.find(t)) v.indices.push_back(*idx);
    std::sort(v.indices.begin(), v.indices.end());
    v.indices.erase(std::unique(v.indices.begin(), v.indices.end()), v.indices.end());
    return v;
}

std::string_view to_string(TextFields fields) noexcept {
    switch (fields) {
    case TextFields::TitleAndBody: return "title+body";
    case TextFields::Title: return "title";
    case TextFields::Body: return "body";
    }
    return "?";
}

std::optional<TextFields> parse_text_fields(std::string_view text) noexcept {
    for (auto f : {TextFields::TitleAndBody, TextFields::Title, TextFields::Body})
        if (to_string(f) == text) return f;
    return std::nullopt;
}

std::string TextPipeline::text_of(const QuestionRecord& record) const {
    switch (fields) {
    case TextFields::Title: return record.title;
    case TextFields::Body: return record.body;
    case TextFields::TitleAndBody: break;
    }
    return record.title + "\n" + record.body;
}

std::vector<std::string> TextPipeline::tokens(std::string_view text) const {
    auto toks = tokenize(text, tokenizer);
    if (remove_stopwords) toks = quill::remove_stopwords(toks, default_stoplist());
    return toks;
}

} // namespace quill
