#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plsavw/dataset.hpp"
#include "plsavw/imagination.hpp"
#include "plsavw/metrics.hpp"
#include "plsavw/plsa.hpp"

namespace plsavw {

enum class ImaginationMode { off, threshold, top_k };

struct RunConfig {
    std::size_t topics = 120;
    ImaginationMode mode = ImaginationMode::threshold;
    double tau = 0.01;
    std::size_t top_k = 5;
    std::size_t annotate_k = 5;
    std::size_t retrieval_m = 20;
    std::uint64_t seed = 0;
    EmOptions em;

    ImaginationConfig imagination() const {
        ImaginationConfig cfg;
        cfg.mode = mode == ImaginationMode::top_k ? SelectionMode::top_k : SelectionMode::threshold;
        cfg.tau = tau;
        cfg.k = top_k;
        return cfg;
    }
};

struct PipelineResult {
    PlsaModel model;
    std::optional<SimilarityMatrix> word_sim;  // absent when imagination is off
    std::optional<SimilarityMatrix> blob_sim;
    std::vector<std::vector<double>> mixtures;  // test-document topic mixtures
    AnnotationRun run;
    MetricsReport report;
};

/// End-to-end experiment: train-side imagination (unless off), PLSA training
/// on the word counts, blob fold-in, test-time blob imagination with the
/// training-derived similarity, document fold-in, annotation, and metrics.
/// Ground truth defaults to the test set's given annotations;
/// `ground_truth_words` overrides it (e.g. with pre-drop truth).
PipelineResult run_pipeline(const RunConfig& cfg, const Dataset& train, const Dataset& test,
                            const CountMatrix* ground_truth_words = nullptr);

struct CompareRow {
    std::string method;  // "PLSA-vw" or "PLSA-words"
    double ap_mean = 0.0, ap_var = 0.0;
    double map_mean = 0.0, map_var = 0.0;
    double rp_mean = 0.0, rp_var = 0.0;
    double rsi_mean = 0.0, rsi_var = 0.0;
};

struct CompareResult {
    CompareRow vw;
    CompareRow words;
    std::string to_text() const;
};

/// Runs the pipeline per seed with imagination on (PLSA-vw) and off
/// (PLSA-words); reports per-index mean and variance across seeds.
CompareResult compare_methods(const RunConfig& cfg, const Dataset& train, const Dataset& test,
                              const std::vector<std::uint64_t>& seeds,
                              const CountMatrix* ground_truth_words = nullptr);

}  // namespace plsavw
