#include "quill/pipeline.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>

#include "quill/error.hpp"
#include "quill/hash.hpp"

namespace quill {

namespace fs = std::filesystem;

fs::path model_file(const RunConfig& config) {
    return config.out_dir / ("model-" + std::string(to_string(config.family)) + ".qmdl");
}

fs::path curves_file(const RunConfig& config) {
    return config.out_dir / ("curves-" + std::string(to_string(config.family)) + ".csv");
}

fs::path metrics_file(const RunConfig& config, std::string_view part) {
    return config.out_dir /
           ("metrics-" + std::string(part) + "-" + std::string(to_string(config.family)) + ".csv");
}

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot read '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot write '" + path.string() + "'");
    return out;
}

void write_text_file(const fs::path& path, const std::string& text) {
    auto out = open_output(path);
    out << text;
    if (!out) fail(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

std::string real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fixed4(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", x);
    return buf;
}

std::string manifest_text(const SplitManifest& m) {
    std::ostringstream s;
    write_manifest(s, m);
    return s.str();
}

std::string vocabulary_text(const Vocabulary& v) {
    std::ostringstream s;
    write_vocabulary(s, v);
    return s.str();
}

std::string metrics_text(const std::string& name, const MetricsReport& report) {
    std::ostringstream s;
    write_metrics_header(s);
    write_metrics_row(s, name, report);
    return s.str();
}

void log_metrics(std::ostream& log, const std::string& what, const MetricsReport& r) {
    log << what << ": accuracy " << fixed4(r.accuracy) << ", macro F1 " << fixed4(r.macro_f1)
        << '\n';
}

} // namespace

LoadedDataset load_source(const RunConfig& config) {
    LoadedDataset out;
    if (config.synthetic) {
        const auto& s = config.synthetic_spec;
        const std::string identity = "synthetic records=" + std::to_string(s.n_records) +
                                     " vocabulary=" + std::to_string(s.vocabulary_size) +
                                     " classes=" + std::to_string(s.n_classes) +
                                     " separation=" + real(s.class_separation) +
                                     " seed=" + std::to_string(s.seed);
        out.records = generate_synthetic(s);
        out.hash = hex64(fnv1a(identity));
        return out;
    }
    const auto bytes = read_file(config.dataset_path);
    try {
        out.records = parse_dataset(bytes, config.schema);
    } catch (const Error& e) {
        throw Error(e.kind(), config.dataset_path.string() + ": " + e.what());
    }
    out.hash = hex64(fnv1a(bytes));
    return out;
}

PreparedData prepare_data(const RunConfig& config) {
    PreparedData p;
    p.dataset = load_source(config);
    p.split = split_dataset(p.dataset.records, config.split_options());
    const auto& source = config.vocab_source == VocabularySource::TrainOnly ? p.split.train
                                                                            : p.dataset.records;
    std::vector<std::vector<std::string>> docs;
    docs.reserve(source.size());
    for (const auto& r : source) docs.push_back(config.text.tokens(r));
    p.vocabulary = build_vocabulary(docs, config.min_df);
    return p;
}

std::vector<LabeledVector> vectorize_records(const std::vector<QuestionRecord>& records,
                                             const TextPipeline& text, const Vocabulary& vocab) {
    std::vector<LabeledVector> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back({vectorize(text.tokens(r), vocab), r.label});
    return out;
}

TrainedModel train_model(const RunConfig& config, std::span<const LabeledVector> train,
                         std::span<const LabeledVector> validation,
                         std::vector<EpochTrace>& traces) {
    traces.clear();
    TrainedModel out;
    out.family = config.family;
    switch (config.family) {
    case ModelFamily::NaiveBayes: out.model = train_naive_bayes(train, config.nb_alpha); break;
    case ModelFamily::DecisionTree: out.model = train_decision_tree(train, config.tree); break;
    case ModelFamily::LinearSVM: out.model = train_linear_svm(train, config.svm_options()); break;
    case ModelFamily::LogisticRegression:
        out.model = train_logistic_regression(train, config.lr_options());
        break;
    case ModelFamily::Model1:
    case ModelFamily::Model2: {
        const auto dim = common_dimension(train);
        auto result = quill::train(init_network<float>(config.network_spec(dim)), train, validation,
                                   config.train_config());
        traces = std::move(result.traces);
        out.model = std::move(result.model);
        break;
    }
    }
    return canonicalize(out);
}

MetricsReport evaluate_model(const TrainedModel& model, std::span<const LabeledVector> data,
                             std::vector<QualityLabel>* predictions) {
    std::vector<QualityLabel> preds, truths;
    preds.reserve(data.size());
    truths.reserve(data.size());
    for (const auto& s : data) {
        preds.push_back(predict(model.model, s.x).label);
        truths.push_back(s.y);
    }
    auto report = precision_recall_f1(confusion(preds, truths));
    if (predictions) *predictions = std::move(preds);
    return report;
}

TextPipeline text_pipeline_of(const ModelArtifact& artifact) {
    RunConfig c;
    for (const char* key : {"text.fields", "text.lowercase", "text.strip_html",
                            "text.min_token_length", "text.remove_stopwords"}) {
        try {
            apply_setting(c, key, artifact.get(std::string("config.") + key));
        } catch (const Error& e) {
            throw Error(ErrorKind::Format, std::string("model tokenizer settings: ") + e.what());
        }
    }
    return c.text;
}

OutputLock::OutputLock(const fs::path& dir) : path_(dir / std::string(kLockFile)) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorKind::Io, "cannot create output directory '" + dir.string() + "'");
    const int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_EXCL, 0644);
    if (fd < 0) {
        if (errno == EEXIST)
            fail(ErrorKind::Io, "output directory '" + dir.string() +
                                    "' is in use (remove '" + path_.string() + "' if stale)");
        fail(ErrorKind::Io, "cannot create lock '" + path_.string() + "': " + std::strerror(errno));
    }
    const std::string pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto written = ::write(fd, pid.data(), pid.size());
    ::close(fd);
}

OutputLock::~OutputLock() {
    std::error_code ec;
    fs::remove(path_, ec);
}

void cmd_prepare(const RunConfig& config, std::ostream& log) {
    config.validate();
    OutputLock lock(config.out_dir);
    const auto p = prepare_data(config);

    write_text_file(config.out_dir / kManifestFile,
                    manifest_text(make_manifest(p.split, p.dataset.hash)));
    write_text_file(config.out_dir / kVocabularyFile, vocabulary_text(p.vocabulary));

    std::ostringstream report;
    report << "dataset: " << (config.synthetic ? "synthetic" : config.dataset_path.string()) << '\n'
           << "dataset_hash: " << p.dataset.hash << '\n'
           << "records: " << p.dataset.records.size() << '\n'
           << "train: " << p.split.train.size() << '\n'
           << "validation: " << p.split.validation.size() << '\n'
           << "test: " << p.split.test.size() << '\n'
           << "vocabulary_size: " << p.vocabulary.size() << '\n'
           << "vocabulary_hash: " << p.vocabulary.content_hash() << '\n';
    const auto counts = class_counts(p.dataset.records);
    std::size_t present = 0;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        report << "class " << to_string(label_at(c)) << ": " << counts[c] << '\n';
        present += counts[c] > 0;
    }
    report << "classes: " << present << '\n';
    write_text_file(config.out_dir / kPrepareReportFile, report.str());
    log << report.str();
}

fs::path cmd_train(const RunConfig& config, std::ostream& log) {
    config.validate();
    OutputLock lock(config.out_dir);
    const auto p = prepare_data(config);

    const auto manifest_path = config.out_dir / kManifestFile;
    const auto vocab_path = config.out_dir / kVocabularyFile;
    const auto manifest = manifest_text(make_manifest(p.split, p.dataset.hash));
    const auto vocab = vocabulary_text(p.vocabulary);
    for (const auto& [path, text] : {std::pair{manifest_path, manifest}, std::pair{vocab_path, vocab}}) {
        if (fs::exists(path)) {
            if (read_file(path) != text)
                fail(ErrorKind::Mismatch, "'" + path.string() +
                                              "' was prepared with different settings; rerun "
                                              "prepare or use another --out");
        } else {
            write_text_file(path, text);
        }
    }

    const auto train = vectorize_records(p.split.train, config.text, p.vocabulary);
    const auto validation = vectorize_records(p.split.validation, config.text, p.vocabulary);
    log << "training " << to_string(config.family) << " on " << train.size() << " records, "
        << p.vocabulary.size() << " features\n";

    std::vector<EpochTrace> traces;
    const auto model = train_model(config, train, validation, traces);

    auto artifact = to_artifact(model);
    artifact.metadata["vocab_hash"] = p.vocabulary.content_hash();
    artifact.metadata["vocab_file"] = std::string(kVocabularyFile);
    artifact.metadata["dataset_hash"] = p.dataset.hash;
    for (const auto& [key, value] : settings_of(config)) artifact.metadata["config." + key] = value;

    if (!validation.empty()) {
        const auto report = evaluate_model(model, validation);
        artifact.metadata["metrics.validation_accuracy"] = real(report.accuracy);
        artifact.metadata["metrics.validation_macro_f1"] = real(report.macro_f1);
        write_text_file(metrics_file(config, "validation"),
                        metrics_text(std::string(to_string(config.family)), report));
        log_metrics(log, "validation", report);
    } else {
        log << "validation: empty portion, no metrics written\n";
    }
    if (!traces.empty()) {
        const auto& last = traces.back();
        artifact.metadata["metrics.final_train_loss"] = real(last.train_loss);
        artifact.metadata["metrics.final_train_accuracy"] = real(last.train_accuracy);
        std::ostringstream csv;
        write_traces_csv(csv, traces);
        write_text_file(curves_file(config), csv.str());
        log << "curves: " << curves_file(config).string() << " (" << traces.size() << " epochs)\n";
    }
    if (is_network(config.family))
        log << "parameters: " << artifact.get("net.param_count") << '\n';

    const auto path = model_file(config);
    save_model(artifact, path);
    log << "model: " << path.string() << '\n';
    return path;
}

MetricsReport cmd_evaluate(const RunConfig& config, const fs::path& model_path,
                           const fs::path& manifest_path, std::ostream& log) {
    config.validate();
    OutputLock lock(config.out_dir);
    const auto artifact = load_model(model_path);
    const auto model = from_artifact(artifact);

    std::ifstream manifest_in(manifest_path);
    if (!manifest_in) fail(ErrorKind::Io, "cannot read manifest '" + manifest_path.string() + "'");
    const auto manifest = read_manifest(manifest_in);
    const auto dataset = load_source(config);
    if (manifest.dataset_hash != dataset.hash)
        fail(ErrorKind::Mismatch, "manifest '" + manifest_path.string() + "' describes dataset " +
                                      manifest.dataset_hash + ", but the data source hashes to " +
                                      dataset.hash);

    const auto vocab_path = manifest_path.parent_path() / kVocabularyFile;
    std::ifstream vocab_in(vocab_path);
    if (!vocab_in) fail(ErrorKind::Io, "cannot read vocabulary '" + vocab_path.string() + "'");
    const auto vocab = read_vocabulary(vocab_in);
    if (vocab.content_hash() != artifact.get("vocab_hash"))
        fail(ErrorKind::Mismatch, "vocabulary '" + vocab_path.string() + "' (" +
                                      vocab.content_hash() + ") is not the one the model was " +
                                      "trained on (" + artifact.get("vocab_hash") + ")");

    const auto split = apply_manifest(dataset.records, manifest);
    const auto test = vectorize_records(split.test, text_pipeline_of(artifact), vocab);
    std::vector<QualityLabel> predictions;
    const auto report = evaluate_model(model, test, &predictions);

    const std::string family = artifact.get("family");
    write_text_file(config.out_dir / ("metrics-test-" + family + ".csv"),
                    metrics_text(family, report));
    std::ostringstream preds;
    preds << "id\tlabel\tpredicted\n";
    for (std::size_t i = 0; i < split.test.size(); ++i)
        preds << split.test[i].id << '\t' << to_string(split.test[i].label) << '\t'
              << to_string(predictions[i]) << '\n';
    write_text_file(config.out_dir / ("predictions-test-" + family + ".tsv"), preds.str());

    log << "test records: " << test.size() << '\n';
    log_metrics(log, "test", report);
    return report;
}

void cmd_predict(const fs::path& model_path, const std::optional<fs::path>& vocab_path,
                 std::istream& in, std::ostream& out) {
    const auto artifact = load_model(model_path);
    const auto model = from_artifact(artifact);
    const auto path = vocab_path ? *vocab_path : model_path.parent_path() / artifact.get("vocab_file");
    std::ifstream vocab_in(path);
    if (!vocab_in) fail(ErrorKind::Io, "cannot read vocabulary '" + path.string() + "'");
    const auto vocab = read_vocabulary(vocab_in);
    if (vocab.content_hash() != artifact.get("vocab_hash"))
        fail(ErrorKind::Mismatch, "vocabulary '" + path.string() + "' does not match the model");
    const auto text = text_pipeline_of(artifact);

    std::string line;
    char buf[64];
    while (std::getline(in, line)) {
        const auto p = predict(model.model, vectorize(text.tokens(line), vocab));
        out << to_string(p.label);
        for (Eigen::Index c = 0; c < p.scores.size(); ++c) {
            std::snprintf(buf, sizeof buf, "\t%.6g", p.scores(c));
            out << buf;
        }
        out << '\n';
    }
    if (in.bad()) fail(ErrorKind::Io, "error reading prediction input");
}

void cmd_curves(const std::vector<fs::path>& files, std::ostream& out, std::size_t patience,
                std::ostream& log) {
    require(!files.empty(), ErrorKind::InvalidArgument, "no curve files given");
    std::vector<CurveSeries> all;
    for (const auto& f : files) {
        std::ifstream in(f);
        if (!in) fail(ErrorKind::Io, "cannot read curves '" + f.string() + "'");
        CurveSeries s;
        s.model_name = f.stem().string();
        if (s.model_name.rfind("curves-", 0) == 0) s.model_name.erase(0, 7);
        try {
            s.traces = read_traces_csv(in);
            s.validate();
        } catch (const Error& e) {
            throw Error(e.kind(), f.string() + ": " + e.what());
        }
        all.push_back(std::move(s));
    }

    std::ostringstream body;
    write_traces_csv(body, {});
    out << "model," << body.str();
    for (const auto& s : all) {
        std::ostringstream rows;
        write_traces_csv(rows, s.traces);
        std::string line;
        std::istringstream lines(rows.str());
        std::getline(lines, line); // header
        while (std::getline(lines, line)) out << s.model_name << ',' << line << '\n';

        const auto hit = detect_overfitting(s, patience);
        if (hit)
            log << s.model_name << ": overfitting detected at epoch " << *hit << '\n';
        else
            log << s.model_name << ": no overfitting detected\n";
    }
}

} // namespace quill
