#include "quill/artifact.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "quill/error.hpp"
#include "quill/hash.hpp"

namespace quill {

std::string_view to_string(ModelFamily family) noexcept {
    switch (family) {
    case ModelFamily::NaiveBayes: return "nb";
    case ModelFamily::DecisionTree: return "dt";
    case ModelFamily::LinearSVM: return "svm";
    case ModelFamily::LogisticRegression: return "lr";
    case ModelFamily::Model1: return "model1";
    case ModelFamily::Model2: return "model2";
    }
    return "?";
}

std::optional<ModelFamily> parse_model_family(std::string_view text) noexcept {
    for (auto f : {ModelFamily::NaiveBayes, ModelFamily::DecisionTree, ModelFamily::LinearSVM,
                   ModelFamily::LogisticRegression, ModelFamily::Model1, ModelFamily::Model2})
        if (to_string(f) == text) return f;
    return std::nullopt;
}

std::size_t model_dimension(const AnyModel& model) {
    return std::visit(
        [](const auto& m) -> std::size_t {
            if constexpr (requires { m.dimension(); })
                return m.dimension();
            else
                return m.dimension;
        },
        model);
}

Prediction predict(const AnyModel& model, const SparseBinaryVector& x) {
    return std::visit(
        [&](const auto& m) -> Prediction {
            if constexpr (requires { m.spec; })
                return predict_network(m, x);
            else
                return quill::predict(m, x);
        },
        model);
}

const std::string& ModelArtifact::get(const std::string& key) const {
    auto it = metadata.find(key);
    if (it == metadata.end()) fail(ErrorKind::Format, "model metadata lacks '" + key + "'");
    return it->second;
}

namespace {

template <typename T>
void put_le(std::string& out, T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i)
        out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff));
}

template <typename T>
T get_le(std::string_view bytes, std::size_t offset) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
    return static_cast<T>(v);
}

constexpr std::size_t kHeaderSize = 8 + 4 + 8;

std::uint64_t checksum(std::string_view bytes) { return fnv1a(bytes); }

} // namespace

std::string serialize(const ModelArtifact& artifact) {
    std::string meta;
    for (const auto& [key, value] : artifact.metadata) {
        require(!key.empty() && key.find_first_of("=\n") == std::string::npos, ErrorKind::Format,
                "invalid metadata key '" + key + "'");
        require(value.find('\n') == std::string::npos, ErrorKind::Format,
                "metadata value for '" + key + "' contains a newline");
        meta += key;
        meta += '=';
        meta += value;
        meta += '\n';
    }
    std::string out(kModelMagic);
    put_le<std::uint32_t>(out, artifact.version);
    put_le<std::uint64_t>(out, meta.size());
    out += meta;
    put_le<std::uint64_t>(out, artifact.parameters.size());
    out.reserve(out.size() + 4 * artifact.parameters.size() + 8);
    for (float p : artifact.parameters) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(p));
    put_le<std::uint64_t>(out, checksum(out));
    return out;
}

ModelArtifact deserialize(std::string_view bytes) {
    require(bytes.size() >= kHeaderSize + 8 + 8, ErrorKind::Format,
            "model file truncated (" + std::to_string(bytes.size()) + " bytes)");
    require(bytes.substr(0, 8) == kModelMagic, ErrorKind::Format, "not a model file (bad magic)");
    const auto body = bytes.substr(0, bytes.size() - 8);
    require(checksum(body) == get_le<std::uint64_t>(bytes, bytes.size() - 8), ErrorKind::Checksum,
            "model file checksum mismatch (corrupt or truncated)");

    ModelArtifact artifact;
    artifact.version = get_le<std::uint32_t>(bytes, 8);
    require(artifact.version == kModelFormatVersion, ErrorKind::Format,
            "unsupported model format version " + std::to_string(artifact.version));

    const auto meta_len = get_le<std::uint64_t>(bytes, 12);
    require(meta_len <= body.size() - kHeaderSize - 8, ErrorKind::Format,
            "model metadata length exceeds file size");
    const auto meta = body.substr(kHeaderSize, meta_len);
    std::size_t pos = 0;
    while (pos < meta.size()) {
        auto end = meta.find('\n', pos);
        require(end != std::string_view::npos, ErrorKind::Format, "unterminated metadata line");
        const auto line = meta.substr(pos, end - pos);
        const auto eq = line.find('=');
        require(eq != std::string_view::npos, ErrorKind::Format, "metadata line without '='");
        artifact.metadata.emplace(std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
        pos = end + 1;
    }

    const std::size_t count_at = kHeaderSize + meta_len;
    const auto count = get_le<std::uint64_t>(bytes, count_at);
    require(count <= (body.size() - count_at - 8) / 4 && body.size() == count_at + 8 + 4 * count,
            ErrorKind::Format, "model parameter section length does not match file size");
    artifact.parameters.resize(count);
    for (std::size_t i = 0; i < count; ++i)
        artifact.parameters[i] = std::bit_cast<float>(get_le<std::uint32_t>(bytes, count_at + 8 + 4 * i));
    return artifact;
}

void save_model(const ModelArtifact& artifact, const std::filesystem::path& path) {
    const auto bytes = serialize(artifact);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot write '" + path.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

ModelArtifact load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open model '" + path.string() + "'");
    const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    try {
        return deserialize(bytes);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// family <-> parameters

namespace {

std::string real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::size_t to_size(const std::string& text, const std::string& key) {
    try {
        std::size_t used = 0;
        const auto v = std::stoull(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    fail(ErrorKind::Format, "model metadata '" + key + "' is not an integer: '" + text + "'");
}

double to_real(const std::string& text, const std::string& key) {
    try {
        std::size_t used = 0;
        const auto v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    fail(ErrorKind::Format, "model metadata '" + key + "' is not a number: '" + text + "'");
}

class ParamWriter {
public:
    explicit ParamWriter(std::vector<float>& out) : out_(out) {}
    template <typename Derived>
    void put(const Eigen::DenseBase<Derived>& m) {
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            for (Eigen::Index i = 0; i < m.rows(); ++i) out_.push_back(static_cast<float>(m(i, j)));
    }
    void put_exact_integer(std::int64_t v) {
        require(v >= -(1 << 24) && v <= (1 << 24), ErrorKind::Format,
                "integer parameter too large for f32: " + std::to_string(v));
        out_.push_back(static_cast<float>(v));
    }

private:
    std::vector<float>& out_;
};

class ParamReader {
public:
    explicit ParamReader(const std::vector<float>& in) : in_(in) {}
    template <typename Derived>
    void get(Eigen::DenseBase<Derived>& m) {
        require(pos_ + static_cast<std::size_t>(m.size()) <= in_.size(), ErrorKind::Format,
                "model parameter section too short");
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            for (Eigen::Index i = 0; i < m.rows(); ++i)
                m(i, j) = static_cast<typename Derived::Scalar>(in_[pos_++]);
    }
    std::int64_t get_integer() {
        require(pos_ < in_.size(), ErrorKind::Format, "model parameter section too short");
        const float v = in_[pos_++];
        require(std::isfinite(v) && v == std::floor(v), ErrorKind::Format,
                "expected an integer parameter");
        return static_cast<std::int64_t>(v);
    }
    void finish() const {
        require(pos_ == in_.size(), ErrorKind::Format, "model parameter section has extra values");
    }

private:
    const std::vector<float>& in_;
    std::size_t pos_ = 0;
};

std::string join_units(const std::vector<std::size_t>& units) {
    std::string s;
    for (std::size_t k = 0; k < units.size(); ++k) {
        if (k) s += ',';
        s += std::to_string(units[k]);
    }
    return s;
}

std::vector<std::size_t> split_units(const std::string& text) {
    std::vector<std::size_t> units;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) units.push_back(to_size(part, "layer_units"));
    return units;
}

} // namespace

ModelArtifact to_artifact(const TrainedModel& trained) {
    ModelArtifact a;
    a.metadata["family"] = std::string(to_string(trained.family));
    a.metadata["label_encoding"] = "HQ:0,LQ_CLOSE:1,LQ_EDIT:2";
    ParamWriter w(a.parameters);

    std::visit(
        [&](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, NaiveBayesModel>) {
                a.metadata["dimension"] = std::to_string(m.dimension);
                a.metadata["nb.alpha"] = real(m.smoothing_alpha);
                w.put(m.log_prior);
                w.put(m.log_likelihood_present);
                w.put(m.log_likelihood_absent);
            } else if constexpr (std::is_same_v<M, DecisionTreeModel>) {
                a.metadata["dimension"] = std::to_string(m.dimension);
                a.metadata["dt.max_depth"] = std::to_string(m.max_depth);
                a.metadata["dt.min_samples_split"] = std::to_string(m.min_samples_split);
                a.metadata["dt.nodes"] = std::to_string(m.nodes.size());
                for (const auto& node : m.nodes) {
                    w.put_exact_integer(node.feature);
                    w.put_exact_integer(node.absent_child);
                    w.put_exact_integer(node.present_child);
                    w.put_exact_integer(node.depth);
                    for (auto c : node.counts) w.put_exact_integer(c);
                    w.put_exact_integer(static_cast<std::int64_t>(index_of(node.label)));
                }
            } else if constexpr (std::is_same_v<M, LinearSVMModel>) {
                a.metadata["dimension"] = std::to_string(m.dimension);
                a.metadata["svm.lambda"] = real(m.regularization_lambda);
                a.metadata["svm.epochs"] = std::to_string(m.epochs);
                w.put(m.weights);
                w.put(m.bias);
            } else if constexpr (std::is_same_v<M, LogisticRegressionModel>) {
                a.metadata["dimension"] = std::to_string(m.dimension);
                a.metadata["lr.l2_lambda"] = real(m.l2_lambda);
                std::string report;
                for (const auto& g : m.grid_report) {
                    if (!report.empty()) report += ',';
                    report += real(g.l2_lambda) + ':' + real(g.mean_accuracy);
                }
                a.metadata["lr.grid_report"] = report;
                w.put(m.weights);
                w.put(m.bias);
            } else {
                const auto& spec = m.spec;
                a.metadata["dimension"] = std::to_string(spec.input_dimension);
                a.metadata["net.layer_units"] = join_units(spec.layer_units);
                a.metadata["net.hidden_activation"] = std::string(to_string(spec.hidden_activation));
                a.metadata["net.output_activation"] = std::string(to_string(spec.output_activation));
                a.metadata["net.seed"] = std::to_string(spec.seed);
                a.metadata["net.param_count"] = std::to_string(count_params(spec).total);
                for (const auto& layer : m.layers) {
                    w.put(layer.weights);
                    w.put(layer.bias);
                }
            }
        },
        trained.model);
    return a;
}

TrainedModel from_artifact(const ModelArtifact& a) {
    const auto family = parse_model_family(a.get("family"));
    require(family.has_value(), ErrorKind::Format, "unknown model family '" + a.get("family") + "'");
    const std::size_t dim = to_size(a.get("dimension"), "dimension");
    const auto d = static_cast<Eigen::Index>(dim);
    const Eigen::Index k = kNumClasses;
    ParamReader r(a.parameters);

    TrainedModel out;
    out.family = *family;
    switch (*family) {
    case ModelFamily::NaiveBayes: {
        NaiveBayesModel m;
        m.dimension = dim;
        m.smoothing_alpha = to_real(a.get("nb.alpha"), "nb.alpha");
        m.log_likelihood_present.resize(k, d);
        m.log_likelihood_absent.resize(k, d);
        r.get(m.log_prior);
        r.get(m.log_likelihood_present);
        r.get(m.log_likelihood_absent);
        m.refresh();
        out.model = std::move(m);
        break;
    }
    case ModelFamily::DecisionTree: {
        DecisionTreeModel m;
        m.dimension = dim;
        m.max_depth = to_size(a.get("dt.max_depth"), "dt.max_depth");
        m.min_samples_split = to_size(a.get("dt.min_samples_split"), "dt.min_samples_split");
        const std::size_t n_nodes = to_size(a.get("dt.nodes"), "dt.nodes");
        require(n_nodes > 0, ErrorKind::Format, "decision tree without nodes");
        for (std::size_t i = 0; i < n_nodes; ++i) {
            TreeNode node;
            node.feature = static_cast<std::int32_t>(r.get_integer());
            node.absent_child = static_cast<std::int32_t>(r.get_integer());
            node.present_child = static_cast<std::int32_t>(r.get_integer());
            node.depth = static_cast<std::uint32_t>(r.get_integer());
            for (auto& c : node.counts) c = static_cast<std::uint32_t>(r.get_integer());
            const auto label = r.get_integer();
            require(label >= 0 && label < static_cast<std::int64_t>(kNumClasses), ErrorKind::Format,
                    "decision tree node has an invalid label");
            node.label = label_at(static_cast<std::size_t>(label));
            if (!node.is_leaf()) {
                require(node.feature < static_cast<std::int64_t>(dim) && node.absent_child > 0 &&
                            node.present_child > 0 &&
                            node.absent_child < static_cast<std::int64_t>(n_nodes) &&
                            node.present_child < static_cast<std::int64_t>(n_nodes),
                        ErrorKind::Format, "decision tree node has an invalid link");
            }
            m.nodes.push_back(node);
        }
        out.model = std::move(m);
        break;
    }
    case ModelFamily::LinearSVM: {
        LinearSVMModel m;
        m.dimension = dim;
        m.regularization_lambda = to_real(a.get("svm.lambda"), "svm.lambda");
        m.epochs = to_size(a.get("svm.epochs"), "svm.epochs");
        m.weights.resize(k, d);
        r.get(m.weights);
        r.get(m.bias);
        out.model = std::move(m);
        break;
    }
    case ModelFamily::LogisticRegression: {
        LogisticRegressionModel m;
        m.dimension = dim;
        m.l2_lambda = to_real(a.get("lr.l2_lambda"), "lr.l2_lambda");
        std::stringstream ss(a.get("lr.grid_report"));
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto colon = item.find(':');
            require(colon != std::string::npos, ErrorKind::Format, "malformed lr.grid_report");
            GridPoint g;
            g.l2_lambda = to_real(item.substr(0, colon), "lr.grid_report");
            g.mean_accuracy = to_real(item.substr(colon + 1), "lr.grid_report");
            m.grid_report.push_back(g);
        }
        m.weights.resize(k, d);
        r.get(m.weights);
        r.get(m.bias);
        out.model = std::move(m);
        break;
    }
    case ModelFamily::Model1:
    case ModelFamily::Model2: {
        NetworkSpec spec;
        spec.input_dimension = dim;
        spec.layer_units = split_units(a.get("net.layer_units"));
        const auto hidden = parse_activation(a.get("net.hidden_activation"));
        const auto output = parse_activation(a.get("net.output_activation"));
        require(hidden && output, ErrorKind::Format, "unknown activation in model metadata");
        spec.hidden_activation = *hidden;
        spec.output_activation = *output;
        spec.seed = to_size(a.get("net.seed"), "net.seed");
        spec.validate();
        NetworkModel<float> m;
        m.spec = spec;
        std::size_t fan_in = dim;
        for (std::size_t i = 0; i < spec.layer_units.size(); ++i) {
            const auto units = static_cast<Eigen::Index>(spec.layer_units[i]);
            DenseLayer<float> layer;
            layer.weights.resize(units, static_cast<Eigen::Index>(fan_in));
            layer.bias.resize(units);
            r.get(layer.weights);
            r.get(layer.bias);
            layer.activation =
                i + 1 == spec.layer_units.size() ? spec.output_activation : spec.hidden_activation;
            m.layers.push_back(std::move(layer));
            fan_in = spec.layer_units[i];
        }
        out.model = std::move(m);
        break;
    }
    }
    r.finish();
    return out;
}

TrainedModel canonicalize(const TrainedModel& model) {
    return from_artifact(to_artifact(model));
}

} // namespace quill
