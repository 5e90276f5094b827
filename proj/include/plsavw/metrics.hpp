#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "plsavw/count_matrix.hpp"

namespace plsavw {

/// Predictions, full score rows, and ground-truth keyword sets for a set of
/// test images.
struct AnnotationRun {
    std::vector<std::vector<std::size_t>> predicted;   // per image, ordered keyword ids
    std::vector<std::vector<double>> scores;           // per image, full keyword score row
    std::vector<std::set<std::size_t>> ground_truth;   // per image, keyword id set
};

/// The four evaluation indexes as percentages, plus per-keyword detail.
struct MetricsReport {
    double ap = 0.0;
    double map = 0.0;
    double rp = 0.0;
    double rsi = 0.0;
    std::map<std::size_t, double> per_keyword_ap;
    std::map<std::size_t, bool> per_keyword_correct;

    // Filled by multi-run aggregation; variance of the per-run percentages.
    std::optional<double> ap_var, map_var, rp_var, rsi_var;

    void save(const std::string& path) const;
    std::string to_text() const;
};

/// Mean over test images of |predicted ∩ groundTruth| / |groundTruth|,
/// in [0, 1]. Images with empty ground truth are excluded.
double annotation_precision(const AnnotationRun& run);

/// Mean over keywords (with >= 1 relevant image) of average precision over
/// the score-ranked image list, in [0, 1]. Ties rank lower image index first.
double mean_average_precision(const AnnotationRun& run);

/// Mean over keywords (with >= 1 relevant image) of precision among the
/// top-M ranked images, in [0, 1]. The denominator stays M even when fewer
/// images exist.
double retrieval_precision(const AnnotationRun& run, std::size_t m);

/// Percentage of vocabulary keywords correctly annotated at least once.
double rsi(const AnnotationRun& run, std::size_t vocab_size);

/// Per-keyword average precision for every keyword with >= 1 relevant image.
std::map<std::size_t, double> per_keyword_average_precision(const AnnotationRun& run);

/// Keywords that appear in predicted ∩ groundTruth of at least one image.
std::set<std::size_t> correct_keywords(const AnnotationRun& run);

/// Predicts the k globally most frequent training keywords for every test
/// image (ties broken by lower id); scores are the shared frequency totals.
AnnotationRun frequency_prior_baseline(const CountMatrix& train_words, std::size_t n_test,
                                       std::size_t k);

struct KeywordCoverageRow {
    std::size_t keyword = 0;
    double train_count = 0.0;
    bool ever_correct = false;
};

struct FrequencyCoverageReport {
    std::vector<KeywordCoverageRow> rows;     // one per keyword
    double cutoff = 50.0;
    std::size_t correct_below_cutoff = 0;     // ever-correct keywords with train_count < cutoff
};

FrequencyCoverageReport frequency_coverage_report(const CountMatrix& train_words,
                                                  const AnnotationRun& run, double cutoff = 50.0);

/// Full report for a run: the four indexes scaled to percentages plus the
/// per-keyword tables.
MetricsReport evaluate(const AnnotationRun& run, std::size_t vocab_size, std::size_t retrieval_m);

}  // namespace plsavw
