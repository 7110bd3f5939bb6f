#include <doctest.h>

#include <random>
#include <sstream>

#include "quill/error.hpp"
#include "quill/eval.hpp"
#include "../oracles.hpp"

using namespace quill;

namespace {

constexpr auto HQ = QualityLabel::HQ;
constexpr auto CLOSE = QualityLabel::LQ_CLOSE;
constexpr auto EDIT = QualityLabel::LQ_EDIT;

CurveSeries series_of(std::initializer_list<double> val_loss) {
    CurveSeries s;
    s.model_name = "m";
    std::size_t e = 0;
    for (double v : val_loss) s.traces.push_back({++e, 1.0 / static_cast<double>(e), 0.5, v, 0.5});
    return s;
}

} // namespace

TEST_CASE("confusion tallies") {
    const std::vector<QualityLabel> all_hq(7, HQ);
    const auto perfect = confusion(all_hq, all_hq);
    CHECK(perfect.counts(0, 0) == 7);
    CHECK(perfect.counts.sum() == 7);

    const std::vector<QualityLabel> truth{HQ, CLOSE}, pred{CLOSE, HQ};
    const auto swapped = confusion(pred, truth);
    CHECK(swapped.counts(0, 1) == 1);
    CHECK(swapped.counts(1, 0) == 1);
    CHECK(swapped.counts.trace() == 0);

    std::mt19937_64 rng(1);
    std::vector<QualityLabel> p(100), t(100);
    for (int i = 0; i < 100; ++i) {
        p[i] = label_at(rng() % 3);
        t[i] = label_at(rng() % 3);
    }
    const auto cm = confusion(p, t);
    CHECK(cm.total() == 100);
    for (std::size_t c = 0; c < 3; ++c) {
        CHECK(cm.tp(c) + cm.fn(c) == cm.counts.row(static_cast<Eigen::Index>(c)).sum());
        CHECK(cm.tp(c) + cm.fp(c) == cm.counts.col(static_cast<Eigen::Index>(c)).sum());
    }

    CHECK_THROWS_AS(confusion(std::vector<QualityLabel>{HQ}, std::vector<QualityLabel>{}), Error);
    CHECK_THROWS_AS(confusion(std::vector<QualityLabel>{}, std::vector<QualityLabel>{}), Error);
}

TEST_CASE("accuracy") {
    ConfusionMatrix cm;
    // class HQ against the rest: TP=3, FN=4, FP=1, TN=2
    cm.counts << 3, 4, 0,
                 1, 2, 0,
                 0, 0, 0;
    CHECK(cm.tp(0) == 3);
    CHECK(cm.fn(0) == 4);
    CHECK(cm.fp(0) == 1);
    CHECK(cm.tn(0) == 2);
    CHECK(one_vs_rest_accuracy(cm, 0) == 0.5);

    ConfusionMatrix diag;
    diag.counts.diagonal() << 4, 5, 6;
    CHECK(accuracy(diag) == 1.0);
    CHECK_THROWS_AS(accuracy(ConfusionMatrix{}), Error);
}

TEST_CASE("precision, recall, F1") {
    ConfusionMatrix diag;
    diag.counts.diagonal() << 4, 5, 6;
    const auto perfect = precision_recall_f1(diag);
    for (std::size_t c = 0; c < 3; ++c) {
        CHECK(perfect.precision[c] == 1.0);
        CHECK(perfect.recall[c] == 1.0);
        CHECK(perfect.f1[c] == 1.0);
    }
    CHECK(perfect.macro_f1 == 1.0);
    CHECK(perfect.weighted_f1 == 1.0);

    ConfusionMatrix absent;
    absent.counts << 5, 2, 0,
                     1, 3, 0,
                     0, 0, 0;
    const auto r = precision_recall_f1(absent);
    CHECK(r.precision[2] == 0.0);
    CHECK(r.recall[2] == 0.0);
    CHECK(r.f1[2] == 0.0);
    CHECK(r.support[2] == 0);
    CHECK(r.macro_precision == doctest::Approx((5.0 / 6 + 3.0 / 5 + 0) / 3));

    SUBCASE("random cell matrices against raw-cell formulas") {
        std::mt19937_64 rng(2);
        for (int trial = 0; trial < 1000; ++trial) {
            ConfusionMatrix cm;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) cm.counts(i, j) = static_cast<std::int64_t>(rng() % 21);
            if (cm.total() == 0) continue;
            const auto rep = precision_recall_f1(cm);
            double mp = 0, mr = 0, mf = 0;
            for (int c = 0; c < 3; ++c) {
                const double tp = static_cast<double>(cm.counts(c, c));
                double col = 0, row = 0;
                for (int k = 0; k < 3; ++k) {
                    col += static_cast<double>(cm.counts(k, c));
                    row += static_cast<double>(cm.counts(c, k));
                }
                const double p = col > 0 ? tp / col : 0, rc = row > 0 ? tp / row : 0;
                const double f = p + rc > 0 ? 2 * p * rc / (p + rc) : 0;
                CHECK(std::abs(rep.precision[c] - p) < 1e-12);
                CHECK(std::abs(rep.recall[c] - rc) < 1e-12);
                CHECK(std::abs(rep.f1[c] - f) < 1e-12);
                mp += p / 3;
                mr += rc / 3;
                mf += f / 3;
            }
            CHECK(std::abs(rep.macro_precision - mp) < 1e-12);
            CHECK(std::abs(rep.macro_recall - mr) < 1e-12);
            CHECK(std::abs(rep.macro_f1 - mf) < 1e-12);
        }
    }
}

TEST_CASE("metric identities on random prediction/truth pairs") {
    const auto r = oracle::sweep_metrics(1000, 77);
    CHECK(r.cases == 1000);
    CHECK(r.accuracy_failures == 0);
    CHECK(r.worst_macro_error < 1e-12);
    CHECK(r.one_vs_rest_failures == 0);
}

TEST_CASE("metrics CSV") {
    ConfusionMatrix cm;
    cm.counts << 2, 0, 0,
                 0, 1, 1,
                 0, 0, 0;
    std::ostringstream s;
    write_metrics_header(s);
    write_metrics_row(s, "nb", precision_recall_f1(cm));
    std::istringstream lines(s.str());
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    CHECK(header.rfind("model,accuracy,macro_precision,macro_recall,macro_f1,", 0) == 0);
    CHECK(header.find("precision_HQ,recall_HQ,f1_HQ") != std::string::npos);
    CHECK(header.find("f1_LQ_EDIT") != std::string::npos);
    CHECK(row.rfind("nb,0.7500,", 0) == 0);
    CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
}

TEST_CASE("overfitting detection") {
    CHECK(detect_overfitting(series_of({1.0, 0.8, 0.6, 0.7, 0.8}), 2) == 5u);
    CHECK_FALSE(detect_overfitting(series_of({1.0, 0.9, 0.8, 0.7}), 2).has_value());
    CHECK_FALSE(detect_overfitting(series_of({1.0, 0.9, 0.95}), 2).has_value());
    CHECK(detect_overfitting(series_of({1.0, 0.9, 0.95, 0.97, 0.99, 1.2}), 3) == 5u);
    CHECK_FALSE(detect_overfitting(series_of({1.0, 1.0, 1.0, 1.0}), 1).has_value());

    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 2000; ++trial) {
        CurveSeries s;
        const std::size_t n = 1 + rng() % 12;
        for (std::size_t e = 1; e <= n; ++e)
            s.traces.push_back({e, 0, 0, static_cast<double>(rng() % 5), 0});
        const std::size_t patience = 1 + rng() % 4;
        const auto hit = detect_overfitting(s, patience);
        if (hit) CHECK(*hit > patience);
    }

    CurveSeries gap = series_of({1.0, 0.9});
    gap.traces[1].epoch = 3;
    CHECK_THROWS_AS(gap.validate(), Error);
    CHECK_NOTHROW(series_of({1.0, 0.9}).validate());
}
