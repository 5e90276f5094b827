#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "plsavw/count_matrix.hpp"

namespace plsavw {

/// Ordered set of unique tokens; the index of a token is its id.
class Vocabulary {
public:
    Vocabulary() = default;
    explicit Vocabulary(std::vector<std::string> tokens);

    std::size_t size() const { return tokens_.size(); }
    const std::string& token(std::size_t id) const { return tokens_.at(id); }
    const std::vector<std::string>& tokens() const { return tokens_; }

    /// Id of a token, or npos if unknown.
    std::size_t find(const std::string& token) const;
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    bool operator==(const Vocabulary& o) const { return tokens_ == o.tokens_; }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Paired word/blob count matrices over shared document rows.
struct Dataset {
    CountMatrix words;   // N x q
    CountMatrix blobs;   // N x p
    Vocabulary word_vocab;
    Vocabulary blob_vocab;
    std::vector<std::string> doc_ids;

    std::size_t n_docs() const { return doc_ids.size(); }

    /// Throws std::invalid_argument if the shape invariants are violated.
    void validate() const;

    bool operator==(const Dataset&) const = default;
};

enum class DatasetFormat { native, corel_jmlr };

/// Reads a dataset. For the native format `path` is a file; for corel-jmlr
/// it is a sample directory (see README for the expected layout) and
/// `split_prefix` selects the subset ("" = training, "test_1_", "test_3_").
Dataset load_dataset(const std::string& path, DatasetFormat format,
                     const std::string& split_prefix = "");

void write_dataset(const Dataset& ds, const std::string& path);

struct SyntheticSpec {
    std::size_t n_docs = 30;
    std::size_t n_words = 20;
    std::size_t n_blobs = 25;
    std::size_t n_topics_true = 4;
    std::size_t words_per_doc = 5;
    std::size_t blobs_per_doc = 8;
    double drop_rate = 0.0;       // in [0, 1)
    std::uint64_t seed = 0;

    void validate() const;
};

struct SyntheticCorpus {
    Dataset full_truth;  // complete annotations
    Dataset observed;    // words thinned by drop_rate, blobs untouched
};

/// Samples a corpus from a hidden topic model, then drops each annotated
/// keyword independently with probability drop_rate. Every observed document
/// keeps at least one keyword. Deterministic given spec.seed.
SyntheticCorpus generate_synthetic(const SyntheticSpec& spec);

}  // namespace plsavw
