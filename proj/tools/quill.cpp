// quill: prepare / train / evaluate / predict / curves.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "quill/error.hpp"
#include "quill/pipeline.hpp"

namespace {

struct GlobalFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string data_path;
    bool synthetic = false;
    std::vector<std::string> settings;
    std::string family;
};

quill::RunConfig build_config(const GlobalFlags& g) {
    quill::RunConfig config = g.config_path.empty() ? quill::RunConfig{} : quill::load_config(g.config_path);
    for (const auto& s : g.settings) {
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            quill::fail(quill::ErrorKind::Config, "--set expects key=value, got '" + s + "'");
        quill::apply_setting(config, s.substr(0, eq), s.substr(eq + 1));
    }
    if (g.seed) quill::apply_setting(config, "run.seed", std::to_string(*g.seed));
    if (!g.out_dir.empty()) quill::apply_setting(config, "run.out", g.out_dir);
    if (!g.data_path.empty()) {
        quill::apply_setting(config, "data.path", g.data_path);
        quill::apply_setting(config, "data.synthetic", "false");
    }
    if (g.synthetic) quill::apply_setting(config, "data.synthetic", "true");
    if (!g.family.empty()) quill::apply_setting(config, "model.family", g.family);
    config.validate();
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Question-quality classification: data preparation, training and evaluation"};
    app.require_subcommand(1);

    GlobalFlags g;
    app.add_option("--config", g.config_path, "Config file ([section] / key = value)");
    app.add_option("--seed", g.seed, "Seed for splits, initialization and shuffling");
    app.add_option("--out", g.out_dir, "Output directory");
    app.add_option("--data", g.data_path, "Dataset CSV");
    app.add_flag("--synthetic", g.synthetic, "Use the synthetic generator instead of a CSV");
    app.add_option("--set", g.settings, "Override one setting, section.key=value (repeatable)");

    auto* prepare = app.add_subcommand("prepare", "Write the split manifest and vocabulary");

    auto* train = app.add_subcommand("train", "Train one model family");
    train->add_option("--family", g.family, "nb, dt, svm, lr, model1 or model2");

    std::string model_path, manifest_path;
    auto* evaluate = app.add_subcommand("evaluate", "Metrics on the test part");
    evaluate->add_option("--family", g.family, "Family whose default model file to use");
    evaluate->add_option("--model", model_path, "Model file (default: <out>/model-<family>.qmdl)");
    evaluate->add_option("--manifest", manifest_path, "Split manifest (default: <out>/split.manifest)");

    std::string vocab_path, input_path;
    auto* predict = app.add_subcommand("predict", "Classify one text per input line");
    predict->add_option("--model", model_path, "Model file")->required();
    predict->add_option("--vocab", vocab_path, "Vocabulary file (default: next to the model)");
    predict->add_option("--input", input_path, "Input file (default: standard input)");

    std::vector<std::string> curve_files;
    std::string curves_output;
    std::optional<std::size_t> patience;
    auto* curves = app.add_subcommand("curves", "Merge curve CSVs and check for overfitting");
    curves->add_option("files", curve_files, "Curve CSV files")->required();
    curves->add_option("--output", curves_output, "Merged CSV (default: standard output)");
    curves->add_option("--patience", patience, "Consecutive validation-loss increases");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*prepare) {
            quill::cmd_prepare(build_config(g), std::cout);
        } else if (*train) {
            quill::cmd_train(build_config(g), std::cout);
        } else if (*evaluate) {
            const auto config = build_config(g);
            const auto model = model_path.empty() ? quill::model_file(config) : std::filesystem::path(model_path);
            const auto manifest = manifest_path.empty() ? config.out_dir / quill::kManifestFile
                                                        : std::filesystem::path(manifest_path);
            quill::cmd_evaluate(config, model, manifest, std::cout);
        } else if (*predict) {
            std::optional<std::filesystem::path> vocab;
            if (!vocab_path.empty()) vocab = vocab_path;
            if (input_path.empty()) {
                quill::cmd_predict(model_path, vocab, std::cin, std::cout);
            } else {
                std::ifstream in(input_path);
                if (!in) quill::fail(quill::ErrorKind::Io, "cannot read input '" + input_path + "'");
                quill::cmd_predict(model_path, vocab, in, std::cout);
            }
        } else if (*curves) {
            const auto config = g.config_path.empty() ? quill::RunConfig{} : quill::load_config(g.config_path);
            const std::size_t p = patience ? *patience : config.overfit_patience;
            std::vector<std::filesystem::path> files(curve_files.begin(), curve_files.end());
            if (curves_output.empty()) {
                quill::cmd_curves(files, std::cout, p, std::cerr);
            } else {
                std::ofstream out(curves_output, std::ios::binary | std::ios::trunc);
                if (!out) quill::fail(quill::ErrorKind::Io, "cannot write '" + curves_output + "'");
                quill::cmd_curves(files, out, p, std::cout);
            }
        }
    } catch (const quill::Error& e) {
        std::cerr << "quill: error[" << quill::to_string(e.kind()) << "]: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "quill: error[internal]: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
