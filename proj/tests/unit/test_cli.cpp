#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sys/wait.h>

#include "quill/artifact.hpp"
#include "../support.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int status = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Run quill_cli(const quill::testing::TempDir& dir, const std::string& args, const std::string& stdin_text = "") {
    std::ofstream(dir / "stdin.txt") << stdin_text;
    const std::string cmd = std::string("'") + QUILL_CLI_PATH + "' " + args + " < '" +
                            (dir / "stdin.txt").string() + "' > '" + (dir / "stdout.txt").string() +
                            "' 2> '" + (dir / "stderr.txt").string() + "'";
    const int raw = std::system(cmd.c_str());
    Run r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(dir / "stdout.txt");
    r.err = slurp(dir / "stderr.txt");
    return r;
}

} // namespace

TEST_CASE("end to end through the command line") {
    quill::testing::TempDir dir("cli");
    const std::string base = "--synthetic --set synthetic.records=450 --set synthetic.vocabulary_size=60 --out '" +
                             (dir / "out").string() + "' ";

    auto r = quill_cli(dir, base + "prepare");
    REQUIRE_MESSAGE(r.status == 0, r.err);
    CHECK(fs::exists(dir / "out" / "split.manifest"));

    r = quill_cli(dir, base + "--set train.epochs=4 train --family model2");
    REQUIRE_MESSAGE(r.status == 0, r.err);
    CHECK(fs::exists(dir / "out" / "model-model2.qmdl"));

    r = quill_cli(dir, base + "evaluate --family model2");
    REQUIRE_MESSAGE(r.status == 0, r.err);
    CHECK(fs::exists(dir / "out" / "metrics-test-model2.csv"));

    r = quill_cli(dir, "predict --model '" + (dir / "out" / "model-model2.qmdl").string() + "'",
                  "w1 w2 w3\n\n");
    REQUIRE_MESSAGE(r.status == 0, r.err);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 2);

    r = quill_cli(dir, "curves '" + (dir / "out" / "curves-model2.csv").string() + "'");
    REQUIRE_MESSAGE(r.status == 0, r.err);
    CHECK(r.out.rfind("model,epoch,", 0) == 0);
    CHECK(r.err.find("model2:") != std::string::npos);
}

TEST_CASE("errors exit nonzero with a kind prefix") {
    quill::testing::TempDir dir("cli-err");
    auto r = quill_cli(dir, "--data '" + (dir / "missing.csv").string() + "' --out '" +
                                (dir / "out").string() + "' prepare");
    CHECK(r.status != 0);
    CHECK(r.err.rfind("quill: error[io]: ", 0) == 0);
    CHECK(r.err.find("missing.csv") != std::string::npos);

    r = quill_cli(dir, "--synthetic --set no.such=1 prepare");
    CHECK(r.status != 0);
    CHECK(r.err.rfind("quill: error[config]: ", 0) == 0);

    std::ofstream(dir / "junk.qmdl") << "not a model";
    r = quill_cli(dir, "predict --model '" + (dir / "junk.qmdl").string() + "'", "x\n");
    CHECK(r.status != 0);
    CHECK(r.err.rfind("quill: error[", 0) == 0);

    r = quill_cli(dir, "");
    CHECK(r.status != 0);
}

TEST_CASE("flags override --set, which overrides the config file") {
    quill::testing::TempDir dir("cli-precedence");
    std::ofstream(dir / "q.conf") << "[data]\nsynthetic = true\n[synthetic]\nrecords = 300\nvocabulary_size = 30\n"
                                     "[run]\nseed = 1\nout = "
                                  << (dir / "from-config").string() << "\n[train]\nepochs = 2\n";
    const std::string conf = "--config '" + (dir / "q.conf").string() + "' ";

    auto r = quill_cli(dir, conf + "--set run.seed=2 --seed 3 --out '" + (dir / "from-flag").string() +
                                "' train --family model2");
    REQUIRE_MESSAGE(r.status == 0, r.err);
    CHECK_FALSE(fs::exists(dir / "from-config"));
    const auto a = quill::load_model(dir / "from-flag" / "model-model2.qmdl");
    CHECK(a.get("config.run.seed") == "3");
    CHECK(a.get("config.train.epochs") == "2");
    CHECK(a.get("config.synthetic.records") == "300");

    r = quill_cli(dir, conf + "--set run.seed=2 train --family nb");
    REQUIRE_MESSAGE(r.status == 0, r.err);
    CHECK(quill::load_model(dir / "from-config" / "model-nb.qmdl").get("config.run.seed") == "2");
}
