#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "plsavw/metrics.hpp"
#include "plsavw/rng.hpp"

using namespace plsavw;

namespace {

AnnotationRun random_run(std::uint64_t seed, std::size_t n_images, std::size_t n_keywords,
                         std::size_t k = 5) {
    Rng rng(seed);
    AnnotationRun run;
    for (std::size_t i = 0; i < n_images; ++i) {
        std::vector<double> scores(n_keywords);
        for (auto& v : scores)
            v = rng.uniform01();
        std::set<std::size_t> gt;
        const std::size_t gt_size = 1 + rng.uniform_index(4);
        while (gt.size() < gt_size)
            gt.insert(rng.uniform_index(n_keywords));
        std::vector<std::size_t> ids(n_keywords);
        for (std::size_t j = 0; j < n_keywords; ++j)
            ids[j] = j;
        std::stable_sort(ids.begin(), ids.end(),
                         [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
        ids.resize(std::min(k, ids.size()));
        run.scores.push_back(std::move(scores));
        run.ground_truth.push_back(std::move(gt));
        run.predicted.push_back(std::move(ids));
    }
    return run;
}

// Brute-force oracles, written against the metric definitions only.

double ap_oracle(const AnnotationRun& run) {
    double total = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < run.predicted.size(); ++i) {
        if (run.ground_truth[i].empty())
            continue;
        std::size_t hit = 0;
        for (auto id : run.predicted[i])
            if (run.ground_truth[i].count(id))
                ++hit;
        total += double(hit) / double(run.ground_truth[i].size());
        ++n;
    }
    return total / double(n);
}

std::vector<std::size_t> oracle_ranking(const AnnotationRun& run, std::size_t w) {
    // Selection-style ranking: repeatedly take the best remaining image.
    std::vector<bool> used(run.scores.size(), false);
    std::vector<std::size_t> order;
    for (std::size_t step = 0; step < run.scores.size(); ++step) {
        std::size_t best = run.scores.size();
        for (std::size_t i = 0; i < run.scores.size(); ++i) {
            if (used[i])
                continue;
            if (best == run.scores.size() || run.scores[i][w] > run.scores[best][w])
                best = i;
        }
        used[best] = true;
        order.push_back(best);
    }
    return order;
}

double map_oracle(const AnnotationRun& run, std::size_t n_keywords) {
    double total = 0.0;
    std::size_t counted = 0;
    for (std::size_t w = 0; w < n_keywords; ++w) {
        std::size_t relevant = 0;
        for (const auto& gt : run.ground_truth)
            relevant += gt.count(w);
        if (relevant == 0)
            continue;
        auto order = oracle_ranking(run, w);
        double sum = 0.0;
        std::size_t hits = 0;
        for (std::size_t r = 0; r < order.size(); ++r)
            if (run.ground_truth[order[r]].count(w)) {
                ++hits;
                sum += double(hits) / double(r + 1);
            }
        total += sum / double(relevant);
        ++counted;
    }
    return total / double(counted);
}

double rp_oracle(const AnnotationRun& run, std::size_t n_keywords, std::size_t m) {
    double total = 0.0;
    std::size_t counted = 0;
    for (std::size_t w = 0; w < n_keywords; ++w) {
        std::size_t relevant = 0;
        for (const auto& gt : run.ground_truth)
            relevant += gt.count(w);
        if (relevant == 0)
            continue;
        auto order = oracle_ranking(run, w);
        std::size_t hits = 0;
        for (std::size_t r = 0; r < std::min(m, order.size()); ++r)
            hits += run.ground_truth[order[r]].count(w);
        total += double(hits) / double(m);
        ++counted;
    }
    return total / double(counted);
}

double rsi_oracle(const AnnotationRun& run, std::size_t n_keywords) {
    std::size_t ever = 0;
    for (std::size_t w = 0; w < n_keywords; ++w) {
        bool found = false;
        for (std::size_t i = 0; i < run.predicted.size() && !found; ++i)
            found = run.ground_truth[i].count(w) &&
                    std::find(run.predicted[i].begin(), run.predicted[i].end(), w) !=
                        run.predicted[i].end();
        if (found)
            ++ever;
    }
    return 100.0 * double(ever) / double(n_keywords);
}

}  // namespace

TEST_CASE("annotation_precision: forced arithmetic cases") {
    AnnotationRun run;
    run.predicted = {{0, 1, 5, 6, 7}};
    run.scores = {{0, 0, 0, 0, 0, 0, 0, 0}};
    run.ground_truth = {{0, 1, 2}};  // sky, water, tree; two hit
    CHECK(annotation_precision(run) == doctest::Approx(2.0 / 3.0));

    run.predicted = {{0, 1, 2, 3, 4}};
    CHECK(annotation_precision(run) == doctest::Approx(1.0));  // superset of gt

    run.predicted = {{5, 6, 7}};
    CHECK(annotation_precision(run) == doctest::Approx(0.0));
}

TEST_CASE("annotation_precision: empty test set is an error") {
    CHECK_THROWS_AS(annotation_precision(AnnotationRun{}), std::invalid_argument);
}

TEST_CASE("mean_average_precision: hand-worked single keyword") {
    // Four images, keyword 0 relevant in images ranked 1st and 3rd.
    AnnotationRun run;
    run.scores = {{0.9}, {0.7}, {0.5}, {0.3}};
    run.ground_truth = {{0}, {}, {0}, {}};
    run.predicted = {{}, {}, {}, {}};
    CHECK(mean_average_precision(run) == doctest::Approx((1.0 + 2.0 / 3.0) / 2.0));
}

TEST_CASE("mean_average_precision: all images relevant saturates at 1") {
    AnnotationRun run;
    run.scores = {{0.9}, {0.7}, {0.5}};
    run.ground_truth = {{0}, {0}, {0}};
    run.predicted = {{}, {}, {}};
    CHECK(mean_average_precision(run) == doctest::Approx(1.0));
}

TEST_CASE("retrieval_precision: forced arithmetic and exclusion") {
    // Keyword 0 relevant at ranks 1 and 4; keyword 1 has no relevant images.
    AnnotationRun run;
    run.scores = {{0.9, 0.1}, {0.7, 0.2}, {0.5, 0.3}, {0.3, 0.4}};
    run.ground_truth = {{0}, {}, {}, {0}};
    run.predicted = {{}, {}, {}, {}};
    CHECK(retrieval_precision(run, 2) == doctest::Approx(0.5));
    // M larger than the pool keeps denominator M.
    CHECK(retrieval_precision(run, 8) == doctest::Approx(2.0 / 8.0));
}

TEST_CASE("rsi: floor, interior, ceiling") {
    AnnotationRun run;
    run.scores = {{0, 0, 0}, {0, 0, 0}};
    run.predicted = {{0, 1}, {2}};
    run.ground_truth = {{0}, {1, 2}};
    CHECK(rsi(run, 3) == doctest::Approx(100.0 * 2.0 / 3.0));

    run.predicted = {{1}, {0}};
    CHECK(rsi(run, 3) == doctest::Approx(0.0));

    run.predicted = {{0, 1}, {1, 2}};
    CHECK(rsi(run, 3) == doctest::Approx(100.0));
}

TEST_CASE("all four indexes match brute-force oracles on random instances") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto run = random_run(seed, 30, 15);
        CHECK(annotation_precision(run) == doctest::Approx(ap_oracle(run)).epsilon(1e-12));
        CHECK(mean_average_precision(run) ==
              doctest::Approx(map_oracle(run, 15)).epsilon(1e-12));
        CHECK(retrieval_precision(run, 7) ==
              doctest::Approx(rp_oracle(run, 15, 7)).epsilon(1e-12));
        CHECK(rsi(run, 15) == doctest::Approx(rsi_oracle(run, 15)).epsilon(1e-12));
    }
}

TEST_CASE("indexes are invariant under monotone rescaling of scores") {
    auto run = random_run(42, 20, 10);
    auto scaled = run;
    for (auto& row : scaled.scores)
        for (auto& v : row)
            v = 0.2 + 3.0 * v;
    CHECK(mean_average_precision(run) == mean_average_precision(scaled));
    CHECK(retrieval_precision(run, 5) == retrieval_precision(scaled, 5));
    CHECK(annotation_precision(run) == annotation_precision(scaled));
    CHECK(rsi(run, 10) == rsi(scaled, 10));
}

TEST_CASE("rsi is monotone in added correct predictions") {
    auto run = random_run(17, 15, 12);
    double base = rsi(run, 12);
    auto more = run;
    for (std::size_t i = 0; i < more.predicted.size(); ++i)
        for (auto id : more.ground_truth[i])
            if (std::find(more.predicted[i].begin(), more.predicted[i].end(), id) ==
                more.predicted[i].end())
                more.predicted[i].push_back(id);
    CHECK(rsi(more, 12) >= base);
}

TEST_CASE("frequency_prior_baseline: most frequent keywords everywhere") {
    CountMatrix train(3, 3);
    train.set(0, 0, 5);
    train.set(1, 1, 9);
    train.set(2, 2, 2);
    auto run = frequency_prior_baseline(train, 4, 2);
    for (const auto& pred : run.predicted)
        CHECK(pred == std::vector<std::size_t>{1, 0});

    auto one = frequency_prior_baseline(train, 2, 1);
    for (const auto& pred : one.predicted)
        CHECK(pred == std::vector<std::size_t>{1});

    CountMatrix uniform(1, 4);
    for (std::size_t j = 0; j < 4; ++j)
        uniform.set(0, j, 2.0);
    auto tied = frequency_prior_baseline(uniform, 1, 3);
    CHECK(tied.predicted[0] == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("frequency_coverage_report") {
    CountMatrix train(2, 4);
    train.set(0, 0, 60);
    train.set(0, 1, 10);
    train.set(1, 2, 40);
    // keyword 3 never appears in training

    AnnotationRun run;
    run.scores = {{0, 0, 0, 0}};
    run.predicted = {{0, 1}};
    run.ground_truth = {{1, 2}};

    auto report = frequency_coverage_report(train, run, 50.0);
    REQUIRE(report.rows.size() == 4);
    CHECK(report.rows[0].train_count == 60.0);
    CHECK_FALSE(report.rows[0].ever_correct);  // predicted but not in gt
    CHECK(report.rows[1].ever_correct);
    CHECK_FALSE(report.rows[3].ever_correct);
    CHECK(report.rows[3].train_count == 0.0);

    // Oracle: direct filter-and-count of ever-correct keywords below cutoff.
    std::size_t expect = 0;
    for (const auto& row : report.rows)
        if (row.ever_correct && row.train_count < 50.0)
            ++expect;
    CHECK(report.correct_below_cutoff == expect);
    CHECK(report.correct_below_cutoff == 1);

    AnnotationRun empty_run;
    auto empty_report = frequency_coverage_report(train, empty_run, 50.0);
    for (const auto& row : empty_report.rows)
        CHECK_FALSE(row.ever_correct);
}

TEST_CASE("evaluate: percentages within range and report text is stable") {
    auto run = random_run(5, 12, 8);
    auto report = evaluate(run, 8, 4);
    for (double v : {report.ap, report.map, report.rp, report.rsi}) {
        CHECK(v >= 0.0);
        CHECK(v <= 100.0);
    }
    auto text = report.to_text();
    CHECK(text.find("ap ") == 0);
    CHECK(text == evaluate(run, 8, 4).to_text());
}
