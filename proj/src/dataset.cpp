#include "plsavw/dataset.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "plsavw/rng.hpp"

namespace plsavw {

namespace {

[[noreturn]] void parse_fail(const std::string& path, std::size_t line, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

std::string format_count(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
    if (tokens_.empty())
        throw std::invalid_argument("Vocabulary must contain at least one token");
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        auto [it, inserted] = index_.emplace(tokens_[i], i);
        if (!inserted)
            throw std::invalid_argument("duplicate vocabulary token: " + tokens_[i]);
    }
}

std::size_t Vocabulary::find(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? npos : it->second;
}

void Dataset::validate() const {
    if (words.rows() != blobs.rows() || words.rows() != doc_ids.size())
        throw std::invalid_argument("Dataset: document counts disagree across words/blobs/docIds");
    if (words.cols() != word_vocab.size())
        throw std::invalid_argument("Dataset: words.cols != word vocabulary size");
    if (blobs.cols() != blob_vocab.size())
        throw std::invalid_argument("Dataset: blobs.cols != blob vocabulary size");
}

namespace {

std::vector<std::string> default_doc_ids(std::size_t n) {
    std::vector<std::string> ids;
    ids.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        ids.push_back("doc" + std::to_string(i));
    return ids;
}

Dataset load_native(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open dataset file: " + path);

    std::size_t lineno = 0;
    std::string line;
    auto next_line = [&]() {
        if (!std::getline(in, line))
            parse_fail(path, lineno + 1, "unexpected end of file");
        ++lineno;
    };

    next_line();
    std::size_t n, q, nnz_w, p, nnz_b;
    {
        std::istringstream hs(line);
        if (!(hs >> n >> q >> nnz_w >> p >> nnz_b))
            parse_fail(path, lineno, "malformed header, expected 'N q nnz_w p nnz_b'");
    }

    auto read_entries = [&](CountMatrix& m, std::size_t nnz, std::size_t vocab_size,
                            const char* kind) {
        for (std::size_t e = 0; e < nnz; ++e) {
            next_line();
            std::istringstream es(line);
            std::size_t doc, token;
            double count;
            if (!(es >> doc >> token >> count))
                parse_fail(path, lineno, std::string("malformed ") + kind + " entry");
            if (doc >= n)
                parse_fail(path, lineno, "document index out of range");
            if (token >= vocab_size)
                parse_fail(path, lineno, std::string("unknown ") + kind + " token id");
            if (!(count >= 0.0))
                parse_fail(path, lineno, "negative or non-numeric count");
            m.add(doc, token, count);  // duplicates sum
        }
    };

    Dataset ds;
    ds.words = CountMatrix(n, q);
    ds.blobs = CountMatrix(n, p);
    read_entries(ds.words, nnz_w, q, "word");
    read_entries(ds.blobs, nnz_b, p, "blob");

    auto read_vocab = [&](std::size_t size, const char* kind) {
        std::vector<std::string> tokens;
        tokens.reserve(size);
        for (std::size_t i = 0; i < size; ++i) {
            next_line();
            if (line.empty())
                parse_fail(path, lineno, std::string("empty ") + kind + " token");
            tokens.push_back(line);
        }
        return Vocabulary(std::move(tokens));
    };
    ds.word_vocab = read_vocab(q, "word");
    ds.blob_vocab = read_vocab(p, "blob");
    ds.doc_ids = default_doc_ids(n);
    ds.validate();
    return ds;
}

// Best-effort adapter for the JMLR-2003 Corel distribution. A sample
// directory holds, per split, `<prefix>document_words` (one line per
// document, whitespace-separated keyword tokens) and `<prefix>document_blobs`
// (one line per document, whitespace-separated 1-based blob ids, optionally
// `id:count`). The shared `words` file lists the word vocabulary; `nblobs`,
// when present, fixes the blob vocabulary size, otherwise the maximum blob
// id seen is used.
Dataset load_corel_jmlr(const std::string& dir, const std::string& prefix) {
    namespace fs = std::filesystem;
    const std::string words_path = (fs::path(dir) / (prefix + "document_words")).string();
    const std::string blobs_path = (fs::path(dir) / (prefix + "document_blobs")).string();
    const std::string vocab_path = (fs::path(dir) / "words").string();
    const std::string nblobs_path = (fs::path(dir) / "nblobs").string();

    std::ifstream vf(vocab_path);
    if (!vf)
        throw std::runtime_error("cannot open word vocabulary file: " + vocab_path);
    std::vector<std::string> word_tokens;
    for (std::string line; std::getline(vf, line);) {
        std::istringstream ls(line);
        std::string tok;
        if (ls >> tok)
            word_tokens.push_back(tok);
    }
    Vocabulary word_vocab(std::move(word_tokens));

    std::ifstream wf(words_path);
    if (!wf)
        throw std::runtime_error("cannot open document_words file: " + words_path);
    std::vector<std::vector<std::size_t>> doc_words;
    std::size_t lineno = 0;
    for (std::string line; std::getline(wf, line);) {
        ++lineno;
        std::istringstream ls(line);
        std::vector<std::size_t> ids;
        std::string tok;
        while (ls >> tok) {
            std::size_t id = word_vocab.find(tok);
            if (id == Vocabulary::npos)
                parse_fail(words_path, lineno, "unknown keyword token: " + tok);
            ids.push_back(id);
        }
        doc_words.push_back(std::move(ids));
    }

    std::ifstream bf(blobs_path);
    if (!bf)
        throw std::runtime_error("cannot open document_blobs file: " + blobs_path);
    std::vector<std::vector<std::pair<std::size_t, double>>> doc_blobs;
    std::size_t max_blob_id = 0;
    lineno = 0;
    for (std::string line; std::getline(bf, line);) {
        ++lineno;
        std::istringstream ls(line);
        std::vector<std::pair<std::size_t, double>> ids;
        std::string tok;
        while (ls >> tok) {
            double count = 1.0;
            auto colon = tok.find(':');
            if (colon != std::string::npos) {
                count = std::stod(tok.substr(colon + 1));
                tok = tok.substr(0, colon);
            }
            std::size_t id = 0;
            try {
                id = std::stoul(tok);
            } catch (const std::exception&) {
                parse_fail(blobs_path, lineno, "malformed blob id: " + tok);
            }
            if (id == 0)
                parse_fail(blobs_path, lineno, "blob ids are 1-based");
            max_blob_id = std::max(max_blob_id, id);
            ids.emplace_back(id - 1, count);
        }
        doc_blobs.push_back(std::move(ids));
    }

    if (doc_words.size() != doc_blobs.size())
        throw std::runtime_error("corel-jmlr: document_words and document_blobs disagree on N (" +
                                 std::to_string(doc_words.size()) + " vs " +
                                 std::to_string(doc_blobs.size()) + ")");

    std::size_t p = max_blob_id;
    if (std::ifstream nf(nblobs_path); nf) {
        if (!(nf >> p) || p < max_blob_id)
            throw std::runtime_error("corel-jmlr: invalid nblobs value in " + nblobs_path);
    }

    std::vector<std::string> blob_tokens;
    blob_tokens.reserve(p);
    for (std::size_t i = 1; i <= p; ++i)
        blob_tokens.push_back("b" + std::to_string(i));

    const std::size_t n = doc_words.size();
    Dataset ds;
    ds.word_vocab = word_vocab;
    ds.blob_vocab = Vocabulary(std::move(blob_tokens));
    ds.words = CountMatrix(n, ds.word_vocab.size());
    ds.blobs = CountMatrix(n, p);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t id : doc_words[i])
            ds.words.add(i, id, 1.0);
        for (const auto& [id, count] : doc_blobs[i])
            ds.blobs.add(i, id, count);
    }
    ds.doc_ids = default_doc_ids(n);
    ds.validate();
    return ds;
}

}  // namespace

Dataset load_dataset(const std::string& path, DatasetFormat format,
                     const std::string& split_prefix) {
    switch (format) {
        case DatasetFormat::native:
            return load_native(path);
        case DatasetFormat::corel_jmlr:
            return load_corel_jmlr(path, split_prefix);
    }
    throw std::invalid_argument("unknown dataset format");
}

void write_dataset(const Dataset& ds, const std::string& path) {
    ds.validate();
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    out << ds.n_docs() << ' ' << ds.word_vocab.size() << ' ' << ds.words.nonzero_count() << ' '
        << ds.blob_vocab.size() << ' ' << ds.blobs.nonzero_count() << '\n';
    for (const auto& [pos, v] : ds.words.entries())
        out << pos.first << ' ' << pos.second << ' ' << format_count(v) << '\n';
    for (const auto& [pos, v] : ds.blobs.entries())
        out << pos.first << ' ' << pos.second << ' ' << format_count(v) << '\n';
    for (const auto& tok : ds.word_vocab.tokens())
        out << tok << '\n';
    for (const auto& tok : ds.blob_vocab.tokens())
        out << tok << '\n';
    if (!out)
        throw std::runtime_error("write failure: " + path);
}

void SyntheticSpec::validate() const {
    if (n_docs < 1 || n_words < 1 || n_blobs < 1 || words_per_doc < 1 || blobs_per_doc < 1)
        throw std::invalid_argument("SyntheticSpec: all counts must be >= 1");
    if (n_topics_true < 1)
        throw std::invalid_argument("SyntheticSpec: nTopicsTrue must be >= 1");
    if (!(drop_rate >= 0.0 && drop_rate < 1.0))
        throw std::invalid_argument("SyntheticSpec: dropRate must lie in [0, 1)");
}

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);

    std::vector<std::vector<double>> topic_words, topic_blobs;
    for (std::size_t t = 0; t < spec.n_topics_true; ++t)
        topic_words.push_back(rng.simplex(spec.n_words));
    for (std::size_t t = 0; t < spec.n_topics_true; ++t)
        topic_blobs.push_back(rng.simplex(spec.n_blobs));

    std::vector<std::string> word_tokens, blob_tokens;
    for (std::size_t j = 0; j < spec.n_words; ++j)
        word_tokens.push_back("w" + std::to_string(j));
    for (std::size_t j = 0; j < spec.n_blobs; ++j)
        blob_tokens.push_back("b" + std::to_string(j));

    Dataset truth;
    truth.word_vocab = Vocabulary(std::move(word_tokens));
    truth.blob_vocab = Vocabulary(std::move(blob_tokens));
    truth.words = CountMatrix(spec.n_docs, spec.n_words);
    truth.blobs = CountMatrix(spec.n_docs, spec.n_blobs);
    truth.doc_ids = default_doc_ids(spec.n_docs);

    for (std::size_t i = 0; i < spec.n_docs; ++i) {
        auto mixture = rng.simplex(spec.n_topics_true);
        for (std::size_t s = 0; s < spec.words_per_doc; ++s) {
            std::size_t t = rng.sample_discrete(mixture);
            truth.words.add(i, rng.sample_discrete(topic_words[t]), 1.0);
        }
        for (std::size_t s = 0; s < spec.blobs_per_doc; ++s) {
            std::size_t t = rng.sample_discrete(mixture);
            truth.blobs.add(i, rng.sample_discrete(topic_blobs[t]), 1.0);
        }
    }

    Dataset observed = truth;
    for (std::size_t i = 0; i < spec.n_docs; ++i) {
        auto annotated = truth.words.row_entries(i);
        std::vector<bool> dropped(annotated.size());
        std::size_t n_dropped = 0;
        for (std::size_t k = 0; k < annotated.size(); ++k) {
            dropped[k] = rng.bernoulli(spec.drop_rate);
            if (dropped[k])
                ++n_dropped;
        }
        // Never empty a document: keep one uniformly chosen keyword.
        if (n_dropped == annotated.size() && !annotated.empty())
            dropped[rng.uniform_index(annotated.size())] = false;
        for (std::size_t k = 0; k < annotated.size(); ++k)
            if (dropped[k])
                observed.words.set(i, annotated[k].first, 0.0);
    }

    return {std::move(truth), std::move(observed)};
}

}  // namespace plsavw
