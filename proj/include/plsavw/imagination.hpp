#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "plsavw/count_matrix.hpp"
#include "plsavw/dataset.hpp"

namespace plsavw {

/// Dense symmetric vocabulary-by-vocabulary similarity matrix with entries
/// in [0, 1]. All-zero columns have similarity 0 against everything,
/// including themselves.
class SimilarityMatrix {
public:
    SimilarityMatrix() = default;
    explicit SimilarityMatrix(std::size_t size) : size_(size), data_(size * size, 0.0) {}

    std::size_t size() const { return size_; }
    double operator()(std::size_t j, std::size_t k) const { return data_[j * size_ + k]; }
    double& operator()(std::size_t j, std::size_t k) { return data_[j * size_ + k]; }

    static SimilarityMatrix identity(std::size_t size);

    void save(const std::string& path) const;
    static SimilarityMatrix load(const std::string& path);

    bool operator==(const SimilarityMatrix&) const = default;

private:
    std::size_t size_ = 0;
    std::vector<double> data_;
};

enum class SelectionMode { threshold, top_k };

struct ImaginationConfig {
    SelectionMode mode = SelectionMode::threshold;
    double tau = 0.01;          // threshold mode
    std::size_t k = 5;          // top-k mode
    bool mask_annotated = true; // imagination applies only to missing tokens
};

/// Cosine similarity between the columns of a row-normalized count matrix.
SimilarityMatrix similarity_matrix(const CountMatrix& norm);

/// Per-row similarity average: out(i,j) = sum_k counts(i,k) sim(k,j) divided
/// by the row total of counts. All-zero rows stay zero; every output entry
/// lies in [0, 1].
CountMatrix imagine_counts(const CountMatrix& counts, const SimilarityMatrix& sim);

/// Masks positions already annotated in `given` (when cfg.mask_annotated),
/// then keeps entries >= tau (threshold mode) or the k largest per row
/// (top-k mode, ties broken by lower column id).
CountMatrix select_imagined(const CountMatrix& imagined, const CountMatrix& given,
                            const ImaginationConfig& cfg);

/// Elementwise sum of the given and selected imagined counts.
CountMatrix augment(const CountMatrix& given, const CountMatrix& selected);

struct ImaginationResult {
    CountMatrix words_aug;
    CountMatrix blobs_aug;
    SimilarityMatrix word_sim;
    SimilarityMatrix blob_sim;  // reused for test-time blob imagination
};

/// Full training-side imagination: augment both the word and blob matrices
/// of a dataset and return the similarity matrices for reuse on test data.
ImaginationResult imagine_pipeline(const Dataset& ds, const ImaginationConfig& cfg);

}  // namespace plsavw
