#include "quill/neuralnet.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace quill {

std::string_view to_string(Activation act) noexcept {
    switch (act) {
    case Activation::Identity: return "identity";
    case Activation::ReLU: return "relu";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Softmax: return "softmax";
    }
    return "?";
}

std::optional<Activation> parse_activation(std::string_view text) noexcept {
    for (auto a : {Activation::Identity, Activation::ReLU, Activation::Sigmoid, Activation::Softmax})
        if (to_string(a) == text) return a;
    return std::nullopt;
}

std::string_view to_string(Optimizer opt) noexcept {
    return opt == Optimizer::SGD ? "sgd" : "adam";
}

std::optional<Optimizer> parse_optimizer(std::string_view text) noexcept {
    if (text == "sgd") return Optimizer::SGD;
    if (text == "adam") return Optimizer::Adam;
    return std::nullopt;
}

NetworkSpec NetworkSpec::model1(std::size_t input_dimension, std::uint64_t seed) {
    NetworkSpec spec;
    spec.input_dimension = input_dimension;
    spec.layer_units = {10, 10, kNumClasses};
    spec.seed = seed;
    return spec;
}

NetworkSpec NetworkSpec::model2(std::size_t input_dimension, std::uint64_t seed) {
    NetworkSpec spec;
    spec.input_dimension = input_dimension;
    spec.layer_units = {10, kNumClasses};
    spec.seed = seed;
    return spec;
}

void NetworkSpec::validate() const {
    require(input_dimension > 0, ErrorKind::InvalidArgument, "network input dimension must be > 0");
    require(!layer_units.empty(), ErrorKind::InvalidArgument, "network needs at least one layer");
    for (auto u : layer_units)
        require(u > 0, ErrorKind::InvalidArgument, "layer units must be positive");
    require(layer_units.back() == kNumClasses, ErrorKind::InvalidArgument,
            "the output layer must have 3 units");
}

ParamCount count_params(const NetworkSpec& spec) {
    ParamCount count;
    std::size_t previous = spec.input_dimension;
    for (auto units : spec.layer_units) {
        count.per_layer.push_back(units * (previous + 1));
        count.total += count.per_layer.back();
        previous = units;
    }
    return count;
}

void TrainConfig::validate() const {
    require(epochs >= 1, ErrorKind::InvalidArgument, "epochs must be >= 1");
    require(batch_size >= 1, ErrorKind::InvalidArgument, "batch_size must be >= 1");
    require(learning_rate > 0.0, ErrorKind::InvalidArgument, "learning_rate must be positive");
    require(validation_fraction >= 0.0 && validation_fraction < 1.0, ErrorKind::InvalidArgument,
            "validation_fraction must be in [0, 1)");
}

namespace {

std::string g6(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

} // namespace

void write_traces_csv(std::ostream& out, const std::vector<EpochTrace>& traces) {
    out << "epoch,train_loss,train_accuracy,val_loss,val_accuracy\n";
    for (const auto& t : traces)
        out << t.epoch << ',' << g6(t.train_loss) << ',' << g6(t.train_accuracy) << ','
            << g6(t.val_loss) << ',' << g6(t.val_accuracy) << '\n';
}

std::vector<EpochTrace> read_traces_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("epoch,train_loss,train_accuracy,val_loss,val_accuracy", 0) != 0)
        fail(ErrorKind::Format, "curves csv: unexpected header");
    std::vector<EpochTrace> traces;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream fields(line);
        EpochTrace t;
        char c1 = 0, c2 = 0, c3 = 0, c4 = 0;
        fields >> t.epoch >> c1 >> t.train_loss >> c2 >> t.train_accuracy >> c3 >> t.val_loss >>
            c4 >> t.val_accuracy;
        if (!fields || c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',')
            fail(ErrorKind::Format, "curves csv row " + std::to_string(row) + ": malformed");
        traces.push_back(t);
    }
    return traces;
}

} // namespace quill
