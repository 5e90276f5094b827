#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "plsavw/imagination.hpp"
#include "plsavw/rng.hpp"

using namespace plsavw;

namespace {

CountMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    CountMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            if (rows[i][j] != 0.0)
                m.set(i, j, rows[i][j]);
    return m;
}

SimilarityMatrix from_sim_rows(const std::vector<std::vector<double>>& rows) {
    SimilarityMatrix s(rows.size());
    for (std::size_t j = 0; j < rows.size(); ++j)
        for (std::size_t k = 0; k < rows.size(); ++k)
            s(j, k) = rows[j][k];
    return s;
}

// Independent oracle: direct triple-loop evaluation of the imagined counts.
std::vector<std::vector<double>> imagine_oracle(const CountMatrix& counts,
                                                const SimilarityMatrix& sim) {
    std::vector<std::vector<double>> out(counts.rows(),
                                         std::vector<double>(counts.cols(), 0.0));
    for (std::size_t i = 0; i < counts.rows(); ++i) {
        double total = 0.0;
        for (std::size_t k = 0; k < counts.cols(); ++k)
            total += counts.at(i, k);
        if (total == 0.0)
            continue;
        for (std::size_t j = 0; j < counts.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < counts.cols(); ++k)
                acc += counts.at(i, k) * sim.operator()(k, j);
            out[i][j] = acc / total;
        }
    }
    return out;
}

CountMatrix random_counts(std::uint64_t seed, std::size_t rows, std::size_t cols,
                          double density = 0.4) {
    Rng rng(seed);
    CountMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            if (rng.bernoulli(density))
                m.set(i, j, 0.1 + 5.0 * rng.uniform01());
    return m;
}

}  // namespace

TEST_CASE("similarity_matrix: identical, disjoint, and overlapping columns") {
    // Columns: 0 and 1 identical, 2 disjoint from both, 3 = [1,1,0], 4 = [1,0,1].
    auto counts = from_rows({
        {1, 1, 0, 1, 1},
        {2, 2, 0, 1, 0},
        {0, 0, 3, 0, 1},
    });
    auto sim = similarity_matrix(row_normalize(counts));
    CHECK(sim(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sim(0, 2) == doctest::Approx(0.0));
    CHECK(sim(1, 2) == doctest::Approx(0.0));
}

TEST_CASE("similarity_matrix: cosine of [1,1,0] and [1,0,1] is 0.5") {
    auto counts = from_rows({
        {1, 1},
        {1, 0},
        {0, 1},
    });
    auto sim = similarity_matrix(counts);  // already effectively per-row scaled below
    // Compute directly on an unnormalized matrix too: cosine is scale-free per column.
    CHECK(sim(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("similarity_matrix: all-zero columns have zero similarity, even to themselves") {
    auto counts = from_rows({
        {1, 0, 2},
        {1, 0, 0},
    });
    auto sim = similarity_matrix(row_normalize(counts));
    CHECK(sim(1, 1) == 0.0);
    CHECK(sim(1, 0) == 0.0);
    CHECK(sim(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("similarity_matrix: symmetric and bounded on random data") {
    for (std::uint64_t seed : {1, 2, 3}) {
        auto counts = random_counts(seed, 12, 9);
        auto sim = similarity_matrix(row_normalize(counts));
        for (std::size_t j = 0; j < sim.size(); ++j)
            for (std::size_t k = 0; k < sim.size(); ++k) {
                CHECK(std::abs(sim(j, k) - sim(k, j)) < 1e-12);
                CHECK(sim(j, k) >= 0.0);
                CHECK(sim(j, k) <= 1.0);
            }
    }
}

TEST_CASE("imagine_counts: identity similarity reproduces the normalized rows") {
    auto counts = random_counts(4, 6, 5);
    auto out = imagine_counts(counts, SimilarityMatrix::identity(5));
    CHECK(out == row_normalize(counts));
}

TEST_CASE("imagine_counts: single-keyword row copies a similarity row") {
    auto sim = from_sim_rows({{1, .5, .2}, {.5, 1, .4}, {.2, .4, 1}});
    auto counts = from_rows({{0, 1, 0}});
    auto out = imagine_counts(counts, sim);
    CHECK(out.at(0, 0) == doctest::Approx(0.5));
    CHECK(out.at(0, 1) == doctest::Approx(1.0));
    CHECK(out.at(0, 2) == doctest::Approx(0.4));
}

TEST_CASE("imagine_counts: scaled single-entry row") {
    auto sim = from_sim_rows({{1, .5, .2}, {.5, 1, .4}, {.2, .4, 1}});
    auto counts = from_rows({{2, 0, 0}});
    auto out = imagine_counts(counts, sim);
    // Frozen from the triple-loop oracle: 2*row0/2.
    CHECK(out.at(0, 0) == doctest::Approx(1.0));
    CHECK(out.at(0, 1) == doctest::Approx(0.5));
    CHECK(out.at(0, 2) == doctest::Approx(0.2));
}

TEST_CASE("imagine_counts: matches the triple-loop oracle on random instances") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto counts = random_counts(seed, 10, 8);
        auto sim = similarity_matrix(row_normalize(random_counts(seed + 100, 10, 8)));
        auto out = imagine_counts(counts, sim);
        auto expect = imagine_oracle(counts, sim);
        for (std::size_t i = 0; i < counts.rows(); ++i)
            for (std::size_t j = 0; j < counts.cols(); ++j) {
                CHECK(std::abs(out.at(i, j) - expect[i][j]) < 1e-12);
                CHECK(out.at(i, j) >= 0.0);
                CHECK(out.at(i, j) <= 1.0 + 1e-12);
            }
    }
}

TEST_CASE("imagine_counts: invariant under row scaling") {
    auto counts = random_counts(8, 6, 7);
    auto sim = similarity_matrix(row_normalize(random_counts(9, 6, 7)));
    CountMatrix scaled(counts.rows(), counts.cols());
    for (const auto& [pos, v] : counts.entries())
        scaled.set(pos.first, pos.second, 3.5 * v);
    auto a = imagine_counts(counts, sim);
    auto b = imagine_counts(scaled, sim);
    for (const auto& [pos, v] : a.entries())
        CHECK(b.at(pos.first, pos.second) == doctest::Approx(v).epsilon(1e-12));
}

TEST_CASE("imagine_counts: all-zero rows stay zero") {
    CountMatrix counts(3, 4);
    counts.set(1, 2, 1.0);
    auto sim = SimilarityMatrix::identity(4);
    auto out = imagine_counts(counts, sim);
    CHECK(out.row_sum(0) == 0.0);
    CHECK(out.row_sum(2) == 0.0);
}

TEST_CASE("select_imagined: mask then threshold") {
    auto imagined = from_rows({{0.5, 1.0, 0.4}});
    auto given = from_rows({{0, 1, 0}});
    ImaginationConfig cfg;
    cfg.mode = SelectionMode::threshold;
    cfg.tau = 0.45;
    auto out = select_imagined(imagined, given, cfg);
    CHECK(out.at(0, 0) == 0.5);
    CHECK(out.at(0, 1) == 0.0);  // masked: already annotated
    CHECK(out.at(0, 2) == 0.0);  // below threshold
}

TEST_CASE("select_imagined: tau=0 without masking is a no-op") {
    auto imagined = random_counts(5, 6, 6);
    auto given = random_counts(6, 6, 6);
    ImaginationConfig cfg;
    cfg.tau = 0.0;
    cfg.mask_annotated = false;
    CHECK(select_imagined(imagined, given, cfg) == imagined);
}

TEST_CASE("select_imagined: top-k keeping everything is a no-op") {
    auto imagined = random_counts(7, 5, 6);
    auto given = random_counts(8, 5, 6);
    ImaginationConfig cfg;
    cfg.mode = SelectionMode::top_k;
    cfg.k = 6;
    cfg.mask_annotated = false;
    CHECK(select_imagined(imagined, given, cfg) == imagined);
}

TEST_CASE("select_imagined: top-k ties break toward lower column ids") {
    auto imagined = from_rows({{0.3, 0.3, 0.3, 0.3}});
    auto given = from_rows({{0, 0, 0, 0}});
    ImaginationConfig cfg;
    cfg.mode = SelectionMode::top_k;
    cfg.k = 2;
    auto out = select_imagined(imagined, given, cfg);
    CHECK(out.at(0, 0) == 0.3);
    CHECK(out.at(0, 1) == 0.3);
    CHECK(out.at(0, 2) == 0.0);
    CHECK(out.at(0, 3) == 0.0);
}

TEST_CASE("select_imagined: masking and threshold monotonicity on random instances") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto counts = random_counts(seed, 10, 8);
        auto sim = similarity_matrix(row_normalize(counts));
        auto imagined = imagine_counts(counts, sim);

        ImaginationConfig cfg;
        cfg.tau = 0.1;
        auto low = select_imagined(imagined, counts, cfg);
        for (const auto& [pos, v] : counts.entries())
            CHECK(low.at(pos.first, pos.second) == 0.0);

        cfg.tau = 0.3;
        auto high = select_imagined(imagined, counts, cfg);
        // Raising tau never adds entries.
        for (const auto& [pos, v] : high.entries())
            CHECK(low.at(pos.first, pos.second) == v);
        CHECK(high.nonzero_count() <= low.nonzero_count());
    }
}

TEST_CASE("augment: elementwise sum with identities") {
    auto given = from_rows({{2, 0, 0}});
    auto selected = from_rows({{0, 0.5, 0}});
    auto out = augment(given, selected);
    CHECK(out.at(0, 0) == 2.0);
    CHECK(out.at(0, 1) == 0.5);
    CHECK(out.at(0, 2) == 0.0);

    CountMatrix zeros(1, 3);
    CHECK(augment(given, zeros) == given);
    CHECK(augment(zeros, selected) == selected);
}

TEST_CASE("imagine_pipeline: tau=1 keeps the dataset unchanged") {
    SyntheticSpec spec;
    spec.seed = 21;
    auto ds = generate_synthetic(spec).observed;
    ImaginationConfig cfg;
    cfg.tau = 1.0;
    auto r = imagine_pipeline(ds, cfg);
    CHECK(r.words_aug == ds.words);
}

TEST_CASE("imagine_pipeline: equals manual composition") {
    SyntheticSpec spec;
    spec.n_docs = 10;
    spec.seed = 22;
    auto ds = generate_synthetic(spec).observed;
    ImaginationConfig cfg;
    cfg.tau = 0.05;
    auto r = imagine_pipeline(ds, cfg);

    auto wsim = similarity_matrix(row_normalize(ds.words));
    auto expect = augment(ds.words, select_imagined(imagine_counts(ds.words, wsim), ds.words, cfg));
    CHECK(r.words_aug == expect);
    auto bsim = similarity_matrix(row_normalize(ds.blobs));
    auto expect_b = augment(ds.blobs, select_imagined(imagine_counts(ds.blobs, bsim), ds.blobs, cfg));
    CHECK(r.blobs_aug == expect_b);
    CHECK(r.word_sim == wsim);
    CHECK(r.blob_sim == bsim);
}

TEST_CASE("similarity matrix file round-trip") {
    auto counts = random_counts(30, 8, 6);
    auto sim = similarity_matrix(row_normalize(counts));
    auto path = (std::filesystem::temp_directory_path() / "plsavw_tests" / "sim.txt");
    std::filesystem::create_directories(path.parent_path());
    sim.save(path.string());
    auto back = SimilarityMatrix::load(path.string());
    CHECK(back == sim);
}
