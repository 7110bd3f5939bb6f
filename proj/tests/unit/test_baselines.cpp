#include <doctest.h>

#include <cmath>
#include <set>

#include "quill/baselines.hpp"
#include "quill/corpus.hpp"
#include "quill/error.hpp"
#include "quill/random.hpp"
#include "quill/textprep.hpp"
#include "../oracles.hpp"
#include "../support.hpp"

using namespace quill;

namespace {

SparseBinaryVector bits(std::initializer_list<int> dense) {
    SparseBinaryVector x;
    x.dimension = dense.size();
    std::uint32_t i = 0;
    for (int v : dense) {
        if (v) x.indices.push_back(i);
        ++i;
    }
    return x;
}

using oracle::from_mask;

constexpr auto HQ = QualityLabel::HQ;
constexpr auto CLOSE = QualityLabel::LQ_CLOSE;
constexpr auto EDIT = QualityLabel::LQ_EDIT;

double accuracy_on(const auto& model, const std::vector<LabeledVector>& data) {
    std::size_t ok = 0;
    for (const auto& s : data) ok += predict(model, s.x).label == s.y;
    return static_cast<double>(ok) / static_cast<double>(data.size());
}

std::vector<LabeledVector> separable_data(std::size_t n, std::uint64_t seed) {
    const auto records = generate_synthetic(SyntheticSpec{n, 30, 3, 1.0, seed});
    std::vector<std::vector<std::string>> docs;
    TextPipeline text;
    for (const auto& r : records) docs.push_back(text.tokens(r));
    const auto vocab = build_vocabulary(docs, 1);
    std::vector<LabeledVector> out;
    for (std::size_t i = 0; i < records.size(); ++i)
        out.push_back({vectorize(docs[i], vocab), records[i].label});
    return out;
}

} // namespace

TEST_CASE("naive Bayes estimates") {
    const std::vector<LabeledVector> data{{bits({1, 0}), HQ}, {bits({0, 1}), CLOSE}};
    const auto m = train_naive_bayes(data, 1.0);
    CHECK(std::exp(m.log_likelihood_present(0, 0)) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(std::exp(m.log_likelihood_present(0, 1)) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(std::exp(m.log_prior(0)) == doctest::Approx(0.5));
    CHECK(std::isinf(m.log_prior(2)));

    SUBCASE("normalization invariants") {
        double prior_sum = 0;
        for (int c = 0; c < 3; ++c) {
            prior_sum += std::exp(m.log_prior(c));
            for (int i = 0; i < 2; ++i)
                CHECK(std::abs(std::exp(m.log_likelihood_present(c, i)) +
                               std::exp(m.log_likelihood_absent(c, i)) - 1.0) < 1e-12);
        }
        CHECK(std::abs(prior_sum - 1.0) < 1e-12);
    }
    SUBCASE("single class of identical documents") {
        const std::vector<LabeledVector> same(5, {bits({1, 1, 0}), EDIT});
        const auto s = train_naive_bayes(same);
        CHECK(std::exp(s.log_prior(2)) == 1.0);
        for (unsigned mask = 0; mask < 8; ++mask) CHECK(predict(s, from_mask(mask, 3)).label == EDIT);
    }
    SUBCASE("degenerate prior on HQ predicts HQ everywhere") {
        const std::vector<LabeledVector> hq{{bits({0, 1, 0}), HQ}, {bits({1, 1, 1}), HQ}};
        const auto s = train_naive_bayes(hq);
        for (unsigned mask = 0; mask < 8; ++mask) CHECK(predict(s, from_mask(mask, 3)).label == HQ);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(train_naive_bayes({}), Error);
        const std::vector<LabeledVector> mixed{{bits({1, 0}), HQ}, {bits({1, 0, 0}), HQ}};
        CHECK_THROWS_AS(train_naive_bayes(mixed), Error);
        CHECK_THROWS_AS(predict(m, bits({1, 0, 0})), Error);
    }
}

TEST_CASE("naive Bayes matches the Bayes formula on all tiny corpora") {
    const auto r = oracle::sweep_naive_bayes(4, 3);
    CHECK(r.corpora > 300000);
    CHECK(r.worst_posterior_error < 1e-12);
    CHECK(r.label_disagreements == 0);
}

TEST_CASE("gini") {
    CHECK(gini({5, 0, 0}) == 0.0);
    CHECK(gini({0, 0, 0}) == 0.0);
    CHECK(gini({3, 3, 0}) == 0.5);
    CHECK(gini({0, 7, 7}) == 0.5);
    CHECK(gini({1, 1, 1}) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("decision tree") {
    SUBCASE("pure data is one leaf") {
        const std::vector<LabeledVector> pure{{bits({1, 0}), CLOSE}, {bits({0, 1}), CLOSE}};
        const auto t = train_decision_tree(pure);
        CHECK(t.nodes.size() == 1);
        CHECK(gini(t.nodes[0].counts) == 0.0);
        for (unsigned mask = 0; mask < 4; ++mask) CHECK(predict(t, from_mask(mask, 2)).label == CLOSE);
    }
    SUBCASE("XOR at depth 2") {
        const std::vector<LabeledVector> xor_data{{bits({0, 0}), HQ},
                                                  {bits({1, 0}), CLOSE},
                                                  {bits({0, 1}), CLOSE},
                                                  {bits({1, 1}), HQ}};
        const auto t = train_decision_tree(xor_data, TreeOptions{2, 2});
        CHECK(accuracy_on(t, xor_data) == 1.0);
        CHECK(t.depth() <= 2);
        CHECK(t.nodes[0].feature == 0);
        const auto shallow = train_decision_tree(xor_data, TreeOptions{1, 2});
        CHECK(accuracy_on(shallow, xor_data) < 1.0);
    }
    SUBCASE("max_depth 0 predicts the majority") {
        const std::vector<LabeledVector> data{{bits({1, 0}), EDIT},
                                              {bits({0, 1}), EDIT},
                                              {bits({1, 1}), HQ}};
        const auto t = train_decision_tree(data, TreeOptions{0, 2});
        CHECK(t.nodes.size() == 1);
        for (unsigned mask = 0; mask < 4; ++mask) CHECK(predict(t, from_mask(mask, 2)).label == EDIT);
    }
    SUBCASE("ties in the leaf counts go to the lowest class") {
        const std::vector<LabeledVector> data{{bits({1}), EDIT}, {bits({1}), CLOSE}};
        const auto t = train_decision_tree(data);
        CHECK(predict(t, bits({1})).label == CLOSE);
    }
    SUBCASE("invariants on random data") {
        std::mt19937_64 rng(3);
        for (std::size_t trial = 0; trial < 50; ++trial) {
            std::vector<LabeledVector> data;
            for (int k = 0; k < 40; ++k)
                data.push_back({testing::random_vector(rng, 8, 0.3), testing::random_label(rng)});
            const std::size_t depth = trial % 6;
            const auto t = train_decision_tree(data, TreeOptions{depth, 2 + trial % 3});
            for (const auto& node : t.nodes) {
                CHECK(node.depth <= depth);
                if (node.is_leaf()) {
                    std::size_t best = 0;
                    for (std::size_t c = 1; c < 3; ++c)
                        if (node.counts[c] > node.counts[best]) best = c;
                    CHECK(node.label == label_at(best));
                }
            }
            const auto again = train_decision_tree(data, TreeOptions{depth, 2 + trial % 3});
            CHECK(again.nodes.size() == t.nodes.size());
        }
    }
    SUBCASE("errors") { CHECK_THROWS_AS(train_decision_tree({}), Error); }
}

TEST_CASE("linear SVM") {
    // Class CLOSE iff feature 0 is present.
    const std::vector<LabeledVector> data{{bits({0, 0}), HQ},
                                          {bits({1, 0}), CLOSE},
                                          {bits({0, 1}), HQ},
                                          {bits({1, 1}), CLOSE}};
    SUBCASE("separable set reaches training accuracy 1") {
        // Oracle: some line on a coarse grid separates the two classes.
        bool separable = false;
        for (double w0 = -2; w0 <= 2 && !separable; w0 += 0.5)
            for (double w1 = -2; w1 <= 2 && !separable; w1 += 0.5)
                for (double b = -2; b <= 2 && !separable; b += 0.25) {
                    bool all = true;
                    for (const auto& s : data) {
                        const double x0 = s.x.indices.size() && s.x.indices[0] == 0 ? 1 : 0;
                        const double x1 = std::count(s.x.indices.begin(), s.x.indices.end(), 1u);
                        const double margin = w0 * x0 + w1 * x1 + b;
                        all = all && (s.y == CLOSE ? margin > 0 : margin < 0);
                    }
                    separable = all;
                }
        REQUIRE(separable);
        const auto m = train_linear_svm(data, SvmOptions{0.01, 100, 1});
        CHECK(accuracy_on(m, data) == 1.0);
        CHECK(m.weights.rows() == 3);
        CHECK(m.weights.cols() == 2);
    }
    SUBCASE("single point") {
        const std::vector<LabeledVector> one{{bits({0, 1, 1}), EDIT}};
        const auto m = train_linear_svm(one, SvmOptions{1e-4, 5, 0});
        CHECK(predict(m, one[0].x).label == EDIT);
    }
    SUBCASE("deterministic per seed") {
        const auto train = separable_data(90, 4);
        const auto a = train_linear_svm(train, SvmOptions{1e-3, 3, 11});
        const auto b = train_linear_svm(train, SvmOptions{1e-3, 3, 11});
        CHECK(a.weights == b.weights);
        CHECK(a.bias == b.bias);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(train_linear_svm({}), Error);
        CHECK_THROWS_AS(train_linear_svm(data, SvmOptions{0.0, 5, 0}), Error);
        CHECK_THROWS_AS(train_linear_svm(data, SvmOptions{0.1, 0, 0}), Error);
    }
}

TEST_CASE("cross-validation folds") {
    for (std::size_t n : {10, 11, 29, 100}) {
        for (std::size_t k : {2, 3, 10}) {
            const auto folds = make_folds(n, k, n * 31 + k);
            CHECK(folds.size() == k);
            std::set<std::size_t> seen;
            std::size_t lo = n, hi = 0;
            for (const auto& f : folds) {
                lo = std::min(lo, f.size());
                hi = std::max(hi, f.size());
                for (auto i : f) CHECK(seen.insert(i).second);
            }
            CHECK(seen.size() == n);
            CHECK(*seen.rbegin() == n - 1);
            CHECK(hi - lo <= 1);
            CHECK(make_folds(n, k, n * 31 + k) == folds);
        }
    }
    CHECK_THROWS_AS(make_folds(3, 4, 0), Error);
    CHECK_THROWS_AS(make_folds(10, 1, 0), Error);
}

TEST_CASE("logistic regression") {
    const auto data = separable_data(120, 8);

    SUBCASE("singleton grid picks its only candidate") {
        const auto m = train_logistic_regression(data, LogisticOptions{{0.5}, 3, 1, {}});
        CHECK(m.l2_lambda == 0.5);
        CHECK(m.grid_report.size() == 1);
    }
    SUBCASE("CV scores recomputed from the folds; best candidate chosen") {
        const LogisticOptions opts{{1e-4, 1e-2, 1.0}, 10, 5, {}};
        const auto m = train_logistic_regression(data, opts);
        const auto folds = make_folds(data.size(), 10, 5);
        REQUIRE(m.grid_report.size() == 3);
        for (const auto& g : m.grid_report) {
            double sum = 0;
            REQUIRE(g.fold_accuracies.size() == 10);
            for (std::size_t f = 0; f < folds.size(); ++f) {
                std::vector<LabeledVector> train, held;
                for (std::size_t j = 0; j < folds.size(); ++j)
                    for (auto i : folds[j]) (j == f ? held : train).push_back(data[i]);
                const auto fit = fit_logistic(train, g.l2_lambda, opts.solver);
                const double acc = accuracy_on(fit, held);
                CHECK(acc == g.fold_accuracies[f]);
                sum += acc;
            }
            CHECK(std::abs(sum / 10 - g.mean_accuracy) < 1e-12);
            CHECK(m.grid_report[0].l2_lambda <= g.l2_lambda);
        }
        for (const auto& g : m.grid_report) {
            const auto& chosen = *std::find_if(m.grid_report.begin(), m.grid_report.end(),
                                               [&](const GridPoint& p) { return p.l2_lambda == m.l2_lambda; });
            CHECK(chosen.mean_accuracy >= g.mean_accuracy);
        }
        CHECK(accuracy_on(m, data) == 1.0);
    }
    SUBCASE("equal CV accuracy goes to the smaller lambda") {
        const auto m = train_logistic_regression(data, LogisticOptions{{1e-2, 1e-3}, 4, 2, {}});
        REQUIRE(m.grid_report[0].mean_accuracy == m.grid_report[1].mean_accuracy);
        CHECK(m.l2_lambda == 1e-3);
    }
    SUBCASE("softmax scores sum to one") {
        const auto m = fit_logistic(data, 1e-2);
        std::mt19937_64 rng(1);
        for (int k = 0; k < 200; ++k) {
            const auto s = m.scores(testing::random_vector(rng, data[0].x.dimension, 0.2));
            CHECK(std::abs(s.sum() - 1.0) < 1e-9);
        }
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(train_logistic_regression(data, LogisticOptions{{}, 10, 0, {}}), Error);
        const std::vector<LabeledVector> few(data.begin(), data.begin() + 5);
        CHECK_THROWS_AS(train_logistic_regression(few, LogisticOptions{{1.0}, 10, 0, {}}), Error);
    }
}

TEST_CASE("argmax is invariant under positive scaling of scores") {
    const auto data = separable_data(60, 2);
    const auto nb = train_naive_bayes(data);
    const auto dt = train_decision_tree(data);
    const auto svm = train_linear_svm(data);
    const auto lr = fit_logistic(data, 1e-2);
    std::mt19937_64 rng(6);
    for (int k = 0; k < 300; ++k) {
        const auto x = testing::random_vector(rng, data[0].x.dimension, 0.15);
        const double c = std::ldexp(1.0, static_cast<int>(rng() % 20) - 10) * 1.37;
        auto scaled = [c](const ClassScores& s) { return ClassScores(c * s); };
        CHECK(predict(nb, x, scaled).label == predict(nb, x).label);
        CHECK(predict(dt, x, scaled).label == predict(dt, x).label);
        CHECK(predict(svm, x, scaled).label == predict(svm, x).label);
        CHECK(predict(lr, x, scaled).label == predict(lr, x).label);
    }
}
