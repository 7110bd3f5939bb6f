#include "quill/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "quill/error.hpp"
#include "quill/random.hpp"

namespace quill {

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool after_quote = false; // just closed a quoted field
    bool row_has_content = false;
    std::size_t line = 1;

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        after_quote = false;
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
        row_has_content = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                    after_quote = true;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        if (c == ',') {
            end_field();
            row_has_content = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            if (row_has_content || after_quote || !row.empty())
                end_row(); // blank lines are skipped
            ++line;
        } else if (after_quote) {
            fail(ErrorKind::Parse, "csv line " + std::to_string(line) +
                                       ": unexpected character after closing quote");
        } else if (c == '"' && field.empty()) {
            in_quotes = true;
            row_has_content = true;
        } else {
            field.push_back(c);
            row_has_content = true;
        }
    }
    if (in_quotes)
        fail(ErrorKind::Parse, "csv line " + std::to_string(line) + ": unterminated quoted field");
    if (row_has_content || !field.empty() || after_quote || !row.empty()) end_row();
    return rows;
}

namespace {

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) fail(ErrorKind::Parse, "missing column '" + name + "'");
    return static_cast<std::size_t>(std::distance(header.begin(), it));
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

std::vector<QuestionRecord> parse_dataset(std::string_view csv_text, const ColumnSchema& schema) {
    auto rows = parse_csv(csv_text);
    if (rows.empty()) fail(ErrorKind::Parse, "csv has no header row");

    const auto& header = rows.front();
    const std::size_t id_col = column_index(header, schema.id);
    const std::size_t title_col = column_index(header, schema.title);
    const std::size_t body_col = column_index(header, schema.body);
    const std::size_t tags_col = column_index(header, schema.tags);
    const std::size_t date_col = column_index(header, schema.creation_date);
    const std::size_t label_col = column_index(header, schema.label);

    std::vector<QuestionRecord> records;
    records.reserve(rows.size() - 1);
    std::unordered_set<std::string> seen;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        auto& row = rows[r];
        const std::string where = "row " + std::to_string(r);
        if (row.size() != header.size())
            fail(ErrorKind::Parse, where + ": expected " + std::to_string(header.size()) +
                                       " columns, found " + std::to_string(row.size()));
        auto label = parse_label(row[label_col]);
        if (!label) fail(ErrorKind::Label, where + ": unknown label '" + row[label_col] + "'");
        if (row[id_col].empty()) fail(ErrorKind::Parse, where + ": empty id");
        if (!seen.insert(row[id_col]).second)
            fail(ErrorKind::Parse, where + ": duplicate id '" + row[id_col] + "'");

        records.push_back(QuestionRecord{
            .id = std::move(row[id_col]),
            .title = std::move(row[title_col]),
            .body = std::move(row[body_col]),
            .tags = std::move(row[tags_col]),
            .creation_date = std::move(row[date_col]),
            .label = *label,
        });
    }
    return records;
}

std::vector<QuestionRecord> load_dataset(const std::filesystem::path& path,
                                         const ColumnSchema& schema) {
    const std::string text = read_file(path);
    try {
        return parse_dataset(text, schema);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

namespace {

void check_fractions(double test_fraction, double validation_fraction) {
    require(test_fraction > 0.0 && test_fraction < 1.0, ErrorKind::InvalidArgument,
            "test_fraction must be in (0, 1)");
    require(validation_fraction >= 0.0 && validation_fraction < 1.0, ErrorKind::InvalidArgument,
            "validation_fraction must be in [0, 1)");
}

std::size_t round_count(double x) { return static_cast<std::size_t>(std::llround(x)); }

/// Largest-remainder apportionment of `total` across groups in proportion
/// to `weights`; ties go to the lower group index.
std::vector<std::size_t> apportion(std::size_t total, const std::vector<std::size_t>& weights) {
    const std::size_t sum = std::accumulate(weights.begin(), weights.end(), std::size_t{0});
    std::vector<std::size_t> share(weights.size(), 0);
    if (sum == 0) return share;
    std::vector<std::pair<std::size_t, std::size_t>> remainders; // (remainder numerator, group)
    std::size_t assigned = 0;
    for (std::size_t g = 0; g < weights.size(); ++g) {
        share[g] = total * weights[g] / sum;
        assigned += share[g];
        remainders.emplace_back(total * weights[g] % sum, g);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; assigned < total && k < remainders.size(); ++k, ++assigned)
        ++share[remainders[k].second];
    return share;
}

} // namespace

DatasetSplit split_dataset(const std::vector<QuestionRecord>& records,
                           const SplitOptions& options) {
    require(!records.empty(), ErrorKind::InvalidArgument, "cannot split an empty dataset");
    check_fractions(options.test_fraction, options.validation_fraction);

    const std::size_t n = records.size();
    const std::size_t n_test = round_count(options.test_fraction * static_cast<double>(n));
    const std::size_t n_val =
        round_count(options.validation_fraction * static_cast<double>(n - n_test));

    DatasetSplit split;
    split.seed = options.seed;
    split.fractions = {1.0 - options.test_fraction -
                           options.validation_fraction * (1.0 - options.test_fraction),
                       options.validation_fraction * (1.0 - options.test_fraction),
                       options.test_fraction};

    Engine engine(options.seed);
    if (!options.stratified) {
        const auto order = shuffled_indices(n, engine);
        for (std::size_t k = 0; k < n; ++k) {
            const auto& record = records[order[k]];
            if (k < n_test)
                split.test.push_back(record);
            else if (k < n_test + n_val)
                split.validation.push_back(record);
            else
                split.train.push_back(record);
        }
        return split;
    }

    std::vector<std::vector<std::size_t>> by_class(kNumClasses);
    for (std::size_t i = 0; i < n; ++i) by_class[index_of(records[i].label)].push_back(i);
    std::vector<std::size_t> sizes;
    for (auto& members : by_class) {
        fisher_yates(members, engine);
        sizes.push_back(members.size());
    }
    const auto test_share = apportion(n_test, sizes);
    std::vector<std::size_t> rest(kNumClasses);
    for (std::size_t c = 0; c < kNumClasses; ++c) rest[c] = sizes[c] - test_share[c];
    const auto val_share = apportion(n_val, rest);
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        const auto& members = by_class[c];
        for (std::size_t k = 0; k < members.size(); ++k) {
            const auto& record = records[members[k]];
            if (k < test_share[c])
                split.test.push_back(record);
            else if (k < test_share[c] + val_share[c])
                split.validation.push_back(record);
            else
                split.train.push_back(record);
        }
    }
    return split;
}

DatasetSplit split_dataset(const std::vector<QuestionRecord>& records, double test_fraction,
                           double validation_fraction, std::uint64_t seed) {
    return split_dataset(records, SplitOptions{test_fraction, validation_fraction, seed, false});
}

namespace {

std::string format_real(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

std::vector<std::string> ids_of(const std::vector<QuestionRecord>& records) {
    std::vector<std::string> ids;
    ids.reserve(records.size());
    for (const auto& r : records) ids.push_back(r.id);
    return ids;
}

} // namespace

SplitManifest make_manifest(const DatasetSplit& split, std::string dataset_hash) {
    SplitManifest m;
    m.dataset_hash = std::move(dataset_hash);
    m.seed = split.seed;
    m.test_fraction = split.fractions.test;
    const double remaining = 1.0 - split.fractions.test;
    m.validation_fraction = remaining > 0.0 ? split.fractions.validation / remaining : 0.0;
    m.train = ids_of(split.train);
    m.validation = ids_of(split.validation);
    m.test = ids_of(split.test);
    return m;
}

void write_manifest(std::ostream& out, const SplitManifest& m) {
    out << "#quill-split v1 dataset=" << m.dataset_hash << " seed=" << m.seed
        << " test_fraction=" << format_real(m.test_fraction)
        << " validation_fraction=" << format_real(m.validation_fraction) << '\n';
    auto section = [&](const char* name, const std::vector<std::string>& ids) {
        out << '[' << name << "]\n";
        for (const auto& id : ids) out << id << '\n';
    };
    section("train", m.train);
    section("validation", m.validation);
    section("test", m.test);
}

SplitManifest read_manifest(std::istream& in) {
    SplitManifest m;
    std::string line;
    if (!std::getline(in, line) || !line.starts_with("#quill-split v1"))
        fail(ErrorKind::Format, "split manifest: missing '#quill-split v1' header");
    std::istringstream header(line.substr(15));
    std::string token;
    while (header >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        const auto key = token.substr(0, eq);
        const auto value = token.substr(eq + 1);
        if (key == "dataset") m.dataset_hash = value;
        else if (key == "seed") m.seed = std::stoull(value);
        else if (key == "test_fraction") m.test_fraction = std::stod(value);
        else if (key == "validation_fraction") m.validation_fraction = std::stod(value);
    }
    std::vector<std::string>* current = nullptr;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line == "[train]") current = &m.train;
        else if (line == "[validation]") current = &m.validation;
        else if (line == "[test]") current = &m.test;
        else if (current == nullptr)
            fail(ErrorKind::Format, "split manifest: id before any section heading");
        else
            current->push_back(line);
    }
    return m;
}

DatasetSplit apply_manifest(const std::vector<QuestionRecord>& records,
                            const SplitManifest& manifest) {
    std::unordered_map<std::string_view, const QuestionRecord*> by_id;
    by_id.reserve(records.size());
    for (const auto& r : records) by_id.emplace(r.id, &r);

    auto resolve = [&](const std::vector<std::string>& ids) {
        std::vector<QuestionRecord> out;
        out.reserve(ids.size());
        for (const auto& id : ids) {
            auto it = by_id.find(id);
            if (it == by_id.end())
                fail(ErrorKind::Mismatch, "split manifest references unknown id '" + id + "'");
            out.push_back(*it->second);
        }
        return out;
    };

    DatasetSplit split;
    split.seed = manifest.seed;
    split.train = resolve(manifest.train);
    split.validation = resolve(manifest.validation);
    split.test = resolve(manifest.test);
    const double n = static_cast<double>(records.size());
    split.fractions = {static_cast<double>(split.train.size()) / n,
                       static_cast<double>(split.validation.size()) / n,
                       static_cast<double>(split.test.size()) / n};
    return split;
}

std::pair<std::size_t, std::size_t> synthetic_class_block(const SyntheticSpec& spec,
                                                          std::size_t class_index) {
    const std::size_t v = spec.vocabulary_size;
    const std::size_t k = spec.n_classes;
    return {class_index * v / k, (class_index + 1) * v / k};
}

std::vector<QuestionRecord> generate_synthetic(const SyntheticSpec& spec) {
    require(spec.n_records > 0, ErrorKind::InvalidArgument, "synthetic: n_records must be positive");
    require(spec.vocabulary_size > 0, ErrorKind::InvalidArgument,
            "synthetic: vocabulary_size must be positive");
    require(spec.n_classes == kNumClasses, ErrorKind::InvalidArgument,
            "synthetic: n_classes must be 3");
    require(spec.class_separation >= 0.0 && spec.class_separation <= 1.0,
            ErrorKind::InvalidArgument, "synthetic: class_separation must be in [0, 1]");
    require(spec.class_separation < 1.0 || spec.vocabulary_size >= spec.n_classes,
            ErrorKind::InvalidArgument,
            "synthetic: vocabulary_size < n_classes cannot give disjoint class word sets");

    Engine engine(spec.seed);
    std::vector<std::size_t> labels(spec.n_records);
    for (std::size_t i = 0; i < spec.n_records; ++i) labels[i] = i % spec.n_classes;
    fisher_yates(labels, engine);

    auto draw_word = [&](std::size_t cls) {
        const auto [first, last] = synthetic_class_block(spec, cls);
        const bool own = uniform_unit(engine) < spec.class_separation;
        std::size_t w;
        if (own && last > first)
            w = first + uniform_index(engine, last - first);
        else
            w = uniform_index(engine, spec.vocabulary_size);
        return "w" + std::to_string(w);
    };
    auto sentence = [&](std::size_t cls, std::size_t min_words, std::size_t max_words) {
        const std::size_t n = min_words + uniform_index(engine, max_words - min_words + 1);
        std::string text;
        for (std::size_t i = 0; i < n; ++i) {
            if (i) text.push_back(' ');
            text += draw_word(cls);
        }
        return text;
    };

    const int width = static_cast<int>(std::to_string(spec.n_records).size());
    std::vector<QuestionRecord> records;
    records.reserve(spec.n_records);
    for (std::size_t i = 0; i < spec.n_records; ++i) {
        std::string id = std::to_string(i);
        id.insert(0, static_cast<std::size_t>(width) - id.size(), '0');
        QuestionRecord r;
        r.id = "syn-" + id;
        r.label = label_at(labels[i]);
        r.title = sentence(labels[i], 3, 8);
        r.body = "<p>" + sentence(labels[i], 8, 24) + "</p>";
        r.tags = "<synthetic>";
        r.creation_date = "2020-01-01 00:00:00";
        records.push_back(std::move(r));
    }
    return records;
}

std::array<std::size_t, kNumClasses> class_counts(const std::vector<QuestionRecord>& records) {
    std::array<std::size_t, kNumClasses> counts{};
    for (const auto& r : records) ++counts[index_of(r.label)];
    return counts;
}

} // namespace quill
