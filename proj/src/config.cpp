#include "quill/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "quill/error.hpp"

namespace quill {

SplitOptions RunConfig::split_options() const {
    return SplitOptions{test_fraction, validation_fraction, seed, stratified};
}

SvmOptions RunConfig::svm_options() const { return SvmOptions{svm_lambda, svm_epochs, seed}; }

LogisticOptions RunConfig::lr_options() const {
    return LogisticOptions{lr_grid, lr_folds, seed, lr_solver};
}

NetworkSpec RunConfig::network_spec(std::size_t input_dimension) const {
    NetworkSpec spec = family == ModelFamily::Model1 ? NetworkSpec::model1(input_dimension, seed)
                                                     : NetworkSpec::model2(input_dimension, seed);
    spec.output_activation = output_activation;
    return spec;
}

TrainConfig RunConfig::train_config() const {
    TrainConfig c = train;
    c.seed = seed;
    c.validation_fraction = validation_fraction;
    return c;
}

void RunConfig::validate() const {
    auto check = [](bool ok, const std::string& what) {
        if (!ok) fail(ErrorKind::Config, what);
    };
    check(synthetic || !dataset_path.empty(), "no data source: set data.path or data.synthetic");
    check(test_fraction > 0.0 && test_fraction < 1.0, "split.test_fraction must be in (0, 1)");
    check(validation_fraction >= 0.0 && validation_fraction < 1.0,
          "split.validation_fraction must be in [0, 1)");
    check(min_df >= 1, "vocab.min_df must be >= 1");
    check(nb_alpha > 0.0, "nb.alpha must be positive");
    check(svm_lambda > 0.0, "svm.lambda must be positive");
    check(svm_epochs >= 1, "svm.epochs must be >= 1");
    check(!lr_grid.empty(), "lr.grid must not be empty");
    check(lr_folds >= 2, "lr.folds must be >= 2");
    check(train.epochs >= 1, "train.epochs must be >= 1");
    check(train.batch_size >= 1, "train.batch_size must be >= 1");
    check(train.learning_rate > 0.0, "train.learning_rate must be positive");
    check(output_activation == Activation::Sigmoid || output_activation == Activation::Softmax,
          "train.output_activation must be sigmoid or softmax");
    check(overfit_patience >= 1, "eval.patience must be >= 1");
    check(synthetic_spec.n_records > 0 && synthetic_spec.vocabulary_size > 0,
          "synthetic.records and synthetic.vocabulary_size must be positive");
}

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
    fail(ErrorKind::Config, "invalid value for " + key + ": '" + value + "'");
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    bad_value(key, v);
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        if (!v.empty() && v.front() != '-') {
            const auto x = std::stoull(v, &used);
            if (used == v.size()) return x;
        }
    } catch (const std::exception&) {
    }
    bad_value(key, v);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const auto x = std::stod(v, &used);
        if (used == v.size()) return x;
    } catch (const std::exception&) {
    }
    bad_value(key, v);
}

std::string real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string boolean(bool b) { return b ? "true" : "false"; }

struct Setting {
    std::string key;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define QUILL_SIZE(KEY, FIELD)                                                                    \
    Setting {                                                                                     \
        KEY, [](RunConfig& c, const std::string& v) { c.FIELD = to_u64(KEY, v); },               \
            [](const RunConfig& c) { return std::to_string(c.FIELD); }                            \
    }
#define QUILL_REAL(KEY, FIELD)                                                                    \
    Setting {                                                                                     \
        KEY, [](RunConfig& c, const std::string& v) { c.FIELD = to_double(KEY, v); },            \
            [](const RunConfig& c) { return real(c.FIELD); }                                      \
    }
#define QUILL_BOOL(KEY, FIELD)                                                                    \
    Setting {                                                                                     \
        KEY, [](RunConfig& c, const std::string& v) { c.FIELD = to_bool(KEY, v); },              \
            [](const RunConfig& c) { return boolean(c.FIELD); }                                   \
    }
#define QUILL_TEXT(KEY, FIELD)                                                                    \
    Setting {                                                                                     \
        KEY, [](RunConfig& c, const std::string& v) { c.FIELD = v; },                            \
            [](const RunConfig& c) { return std::string(c.FIELD); }                               \
    }

const std::vector<Setting>& all_settings() {
    static const std::vector<Setting> table = {
        Setting{"data.path", [](RunConfig& c, const std::string& v) { c.dataset_path = v; },
                [](const RunConfig& c) { return c.dataset_path.string(); }},
        QUILL_BOOL("data.synthetic", synthetic),
        QUILL_TEXT("data.id_column", schema.id),
        QUILL_TEXT("data.title_column", schema.title),
        QUILL_TEXT("data.body_column", schema.body),
        QUILL_TEXT("data.tags_column", schema.tags),
        QUILL_TEXT("data.date_column", schema.creation_date),
        QUILL_TEXT("data.label_column", schema.label),
        QUILL_SIZE("synthetic.records", synthetic_spec.n_records),
        QUILL_SIZE("synthetic.vocabulary_size", synthetic_spec.vocabulary_size),
        QUILL_REAL("synthetic.separation", synthetic_spec.class_separation),
        QUILL_SIZE("synthetic.seed", synthetic_spec.seed),
        QUILL_SIZE("run.seed", seed),
        Setting{"run.out", [](RunConfig& c, const std::string& v) { c.out_dir = v; },
                [](const RunConfig& c) { return c.out_dir.string(); }},
        QUILL_REAL("split.test_fraction", test_fraction),
        QUILL_REAL("split.validation_fraction", validation_fraction),
        QUILL_BOOL("split.stratified", stratified),
        Setting{"text.fields",
                [](RunConfig& c, const std::string& v) {
                    auto f = parse_text_fields(v);
                    if (!f) bad_value("text.fields", v);
                    c.text.fields = *f;
                },
                [](const RunConfig& c) { return std::string(to_string(c.text.fields)); }},
        QUILL_BOOL("text.lowercase", text.tokenizer.lowercase),
        QUILL_BOOL("text.strip_html", text.tokenizer.strip_html),
        QUILL_SIZE("text.min_token_length", text.tokenizer.min_token_length),
        QUILL_BOOL("text.remove_stopwords", text.remove_stopwords),
        QUILL_SIZE("vocab.min_df", min_df),
        Setting{"vocab.source",
                [](RunConfig& c, const std::string& v) {
                    if (v == "train") c.vocab_source = VocabularySource::TrainOnly;
                    else if (v == "full") c.vocab_source = VocabularySource::FullCorpus;
                    else bad_value("vocab.source", v);
                },
                [](const RunConfig& c) {
                    return std::string(c.vocab_source == VocabularySource::TrainOnly ? "train"
                                                                                     : "full");
                }},
        Setting{"model.family",
                [](RunConfig& c, const std::string& v) {
                    auto f = parse_model_family(v);
                    if (!f) bad_value("model.family", v);
                    c.family = *f;
                },
                [](const RunConfig& c) { return std::string(to_string(c.family)); }},
        QUILL_REAL("nb.alpha", nb_alpha),
        QUILL_SIZE("dt.max_depth", tree.max_depth),
        QUILL_SIZE("dt.min_samples_split", tree.min_samples_split),
        QUILL_REAL("svm.lambda", svm_lambda),
        QUILL_SIZE("svm.epochs", svm_epochs),
        Setting{"lr.grid",
                [](RunConfig& c, const std::string& v) {
                    std::vector<double> grid;
                    std::stringstream ss(v);
                    std::string item;
                    while (std::getline(ss, item, ',')) {
                        const auto first = item.find_first_not_of(' ');
                        const auto last = item.find_last_not_of(' ');
                        if (first == std::string::npos) bad_value("lr.grid", v);
                        grid.push_back(to_double("lr.grid", item.substr(first, last - first + 1)));
                    }
                    if (grid.empty()) bad_value("lr.grid", v);
                    c.lr_grid = grid;
                },
                [](const RunConfig& c) {
                    std::string s;
                    for (double g : c.lr_grid) s += (s.empty() ? "" : ",") + real(g);
                    return s;
                }},
        QUILL_SIZE("lr.folds", lr_folds),
        QUILL_SIZE("lr.max_iterations", lr_solver.max_iterations),
        QUILL_REAL("lr.tolerance", lr_solver.gradient_tolerance),
        QUILL_SIZE("train.epochs", train.epochs),
        QUILL_SIZE("train.batch_size", train.batch_size),
        QUILL_REAL("train.learning_rate", train.learning_rate),
        Setting{"train.optimizer",
                [](RunConfig& c, const std::string& v) {
                    auto o = parse_optimizer(v);
                    if (!o) bad_value("train.optimizer", v);
                    c.train.optimizer = *o;
                },
                [](const RunConfig& c) { return std::string(to_string(c.train.optimizer)); }},
        QUILL_REAL("train.beta1", train.beta1),
        QUILL_REAL("train.beta2", train.beta2),
        QUILL_REAL("train.epsilon", train.epsilon),
        Setting{"train.output_activation",
                [](RunConfig& c, const std::string& v) {
                    auto a = parse_activation(v);
                    if (!a || (*a != Activation::Sigmoid && *a != Activation::Softmax))
                        bad_value("train.output_activation", v);
                    c.output_activation = *a;
                },
                [](const RunConfig& c) { return std::string(to_string(c.output_activation)); }},
        QUILL_SIZE("eval.patience", overfit_patience),
    };
    return table;
}

#undef QUILL_SIZE
#undef QUILL_REAL
#undef QUILL_BOOL
#undef QUILL_TEXT

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

} // namespace

void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
    for (const auto& s : all_settings()) {
        if (s.key == key) {
            s.set(config, value);
            return;
        }
    }
    fail(ErrorKind::Config, "unknown setting '" + key + "'");
}

void apply_config_text(RunConfig& config, std::istream& in) {
    std::string line, section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#' || line.front() == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                fail(ErrorKind::Config, "config line " + std::to_string(line_no) + ": bad heading");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorKind::Config, "config line " + std::to_string(line_no) + ": expected key = value");
        if (section.empty())
            fail(ErrorKind::Config,
                 "config line " + std::to_string(line_no) + ": setting outside a [section]");
        apply_setting(config, section + "." + trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open config '" + path.string() + "'");
    RunConfig config;
    apply_config_text(config, in);
    return config;
}

std::map<std::string, std::string> settings_of(const RunConfig& config) {
    std::map<std::string, std::string> out;
    for (const auto& s : all_settings()) out.emplace(s.key, s.get(config));
    return out;
}

} // namespace quill
