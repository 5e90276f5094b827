#include "plsavw/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace plsavw {

namespace {

[[noreturn]] void stage_fail(const char* stage, const std::exception& e) {
    throw std::runtime_error(std::string("[") + stage + "] " + e.what());
}

std::set<std::size_t> row_support(const CountMatrix& m, std::size_t row) {
    std::set<std::size_t> out;
    for (const auto& [col, v] : m.row_entries(row))
        out.insert(col);
    return out;
}

double variance(const std::vector<double>& xs) {
    // Population variance across runs.
    if (xs.empty())
        return 0.0;
    double mean = 0.0;
    for (double x : xs)
        mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs)
        var += (x - mean) * (x - mean);
    return var / static_cast<double>(xs.size());
}

double mean(const std::vector<double>& xs) {
    double m = 0.0;
    for (double x : xs)
        m += x;
    return xs.empty() ? 0.0 : m / static_cast<double>(xs.size());
}

}  // namespace

PipelineResult run_pipeline(const RunConfig& cfg, const Dataset& train, const Dataset& test,
                            const CountMatrix* ground_truth_words) {
    train.validate();
    test.validate();
    if (!(train.word_vocab == test.word_vocab) || !(train.blob_vocab == test.blob_vocab))
        throw std::runtime_error("[setup] train and test vocabularies differ");

    PipelineResult result;
    const bool imagine = cfg.mode != ImaginationMode::off;

    CountMatrix train_words = train.words;
    CountMatrix train_blobs = train.blobs;
    if (imagine) {
        try {
            auto imagination = imagine_pipeline(train, cfg.imagination());
            train_words = std::move(imagination.words_aug);
            train_blobs = std::move(imagination.blobs_aug);
            result.word_sim = std::move(imagination.word_sim);
            result.blob_sim = std::move(imagination.blob_sim);
        } catch (const std::exception& e) {
            stage_fail("imagine", e);
        }
    }

    EmOptions em = cfg.em;
    em.seed = cfg.seed;

    try {
        result.model = train_plsa(train_words, cfg.topics, em).model;
    } catch (const std::exception& e) {
        stage_fail("train", e);
    }

    try {
        result.model = fold_in_features(result.model, train_blobs, em).model;
    } catch (const std::exception& e) {
        stage_fail("fold-features", e);
    }

    CountMatrix test_blobs = test.blobs;
    if (imagine) {
        try {
            // Test-time imagination reuses the training-derived blob
            // similarity; no masking or thresholding is applied here.
            test_blobs = augment(test.blobs, imagine_counts(test.blobs, *result.blob_sim));
        } catch (const std::exception& e) {
            stage_fail("imagine-test", e);
        }
    }

    try {
        result.mixtures = fold_in_documents(result.model, test_blobs, em).mixtures;
    } catch (const std::exception& e) {
        stage_fail("fold-documents", e);
    }

    try {
        result.run.scores = annotate(result.model, result.mixtures);
        for (const auto& row : result.run.scores)
            result.run.predicted.push_back(top_keywords(row, cfg.annotate_k));
        const CountMatrix& gt = ground_truth_words ? *ground_truth_words : test.words;
        if (gt.rows() != test.n_docs() || gt.cols() != test.word_vocab.size())
            throw std::runtime_error("ground-truth word matrix shape mismatch");
        for (std::size_t i = 0; i < test.n_docs(); ++i)
            result.run.ground_truth.push_back(row_support(gt, i));
    } catch (const std::exception& e) {
        stage_fail("annotate", e);
    }

    try {
        result.report = evaluate(result.run, test.word_vocab.size(), cfg.retrieval_m);
    } catch (const std::exception& e) {
        stage_fail("eval", e);
    }

    return result;
}

CompareResult compare_methods(const RunConfig& cfg, const Dataset& train, const Dataset& test,
                              const std::vector<std::uint64_t>& seeds,
                              const CountMatrix* ground_truth_words) {
    if (seeds.empty())
        throw std::invalid_argument("compare_methods: at least one seed required");

    CompareResult out;
    out.vw.method = "PLSA-vw";
    out.words.method = "PLSA-words";
    for (auto* row : {&out.vw, &out.words}) {
        const bool with_imagination = row == &out.vw;
        RunConfig run_cfg = cfg;
        if (!with_imagination)
            run_cfg.mode = ImaginationMode::off;
        else if (run_cfg.mode == ImaginationMode::off)
            run_cfg.mode = ImaginationMode::threshold;

        std::vector<double> ap, map, rp, rsi;
        for (auto seed : seeds) {
            run_cfg.seed = seed;
            auto r = run_pipeline(run_cfg, train, test, ground_truth_words);
            ap.push_back(r.report.ap);
            map.push_back(r.report.map);
            rp.push_back(r.report.rp);
            rsi.push_back(r.report.rsi);
        }
        row->ap_mean = mean(ap);
        row->ap_var = variance(ap);
        row->map_mean = mean(map);
        row->map_var = variance(map);
        row->rp_mean = mean(rp);
        row->rp_var = variance(rp);
        row->rsi_mean = mean(rsi);
        row->rsi_var = variance(rsi);
    }
    return out;
}

std::string CompareResult::to_text() const {
    char buf[256];
    std::ostringstream out;
    out << "method ap map rp rsi\n";
    for (const auto* row : {&vw, &words}) {
        std::snprintf(buf, sizeof(buf),
                      "%s %.2f (%.2f) %.2f (%.2f) %.2f (%.2f) %.2f (%.2f)\n",
                      row->method.c_str(), row->ap_mean, row->ap_var, row->map_mean, row->map_var,
                      row->rp_mean, row->rp_var, row->rsi_mean, row->rsi_var);
        out << buf;
    }
    return out.str();
}

}  // namespace plsavw
