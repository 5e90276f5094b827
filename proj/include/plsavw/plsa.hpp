#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "plsavw/count_matrix.hpp"

namespace plsavw {

struct EmOptions {
    std::size_t max_iters = 500;
    double rel_tol = 1e-6;
    std::uint64_t seed = 0;
    std::size_t n_threads = 1;

    void validate() const;
};

/// PLSA parameters. Every row of each distribution matrix is a point on the
/// probability simplex.
struct PlsaModel {
    std::size_t n_topics = 0;
    std::vector<std::vector<double>> word_given_topic;   // T x q
    std::vector<std::vector<double>> blob_given_topic;   // T x p, empty until folded in
    std::vector<std::vector<double>> topic_given_doc;    // N x T

    bool has_blobs() const { return !blob_given_topic.empty(); }
    std::size_t n_words() const { return word_given_topic.empty() ? 0 : word_given_topic[0].size(); }
    std::size_t n_blobs() const { return blob_given_topic.empty() ? 0 : blob_given_topic[0].size(); }
    std::size_t n_docs() const { return topic_given_doc.size(); }

    void save(const std::string& path) const;
    static PlsaModel load(const std::string& path);

    bool operator==(const PlsaModel&) const = default;
};

struct TrainResult {
    PlsaModel model;
    std::vector<double> ll_trace;  // log-likelihood after each EM iteration
};

/// Fits p(w|t) and p(t|I) by EM on a (possibly real-valued) count matrix.
/// Deterministic given opts.seed; the trace is nondecreasing.
TrainResult train_plsa(const CountMatrix& counts, std::size_t n_topics, const EmOptions& opts);

struct FoldFeaturesResult {
    PlsaModel model;               // word_given_topic and topic_given_doc untouched
    std::vector<double> ll_trace;
};

/// Estimates p(b|t) by EM with the document mixtures frozen.
FoldFeaturesResult fold_in_features(const PlsaModel& model, const CountMatrix& blob_counts,
                                    const EmOptions& opts);

struct FoldDocumentsResult {
    std::vector<std::vector<double>> mixtures;  // Ntest x T, row-stochastic
    std::vector<double> ll_trace;               // aggregate over documents
};

/// Infers p(t|I_test) per document by EM with p(b|t) frozen. Documents with
/// no blob evidence get the uniform mixture.
FoldDocumentsResult fold_in_documents(const PlsaModel& model, const CountMatrix& test_blob_counts,
                                      const EmOptions& opts);

/// Keyword scores per test document: scores(i,j) = sum_t mixtures(i,t) p(w_j|t).
std::vector<std::vector<double>> annotate(const PlsaModel& model,
                                          const std::vector<std::vector<double>>& mixtures);

/// Ids of the k highest-scoring keywords, descending score, ties broken by
/// lower id.
std::vector<std::size_t> top_keywords(const std::vector<double>& scores, std::size_t k);

/// sum_ij counts(i,j) log sum_t mixtures(i,t) item_given_topic(t,j); zero
/// counts contribute nothing. A positive count whose mixture probability is
/// zero yields -infinity.
double log_likelihood(const CountMatrix& counts,
                      const std::vector<std::vector<double>>& mixtures,
                      const std::vector<std::vector<double>>& item_given_topic);

}  // namespace plsavw
