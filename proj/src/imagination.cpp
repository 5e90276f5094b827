#include "plsavw/imagination.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace plsavw {

SimilarityMatrix SimilarityMatrix::identity(std::size_t size) {
    SimilarityMatrix m(size);
    for (std::size_t j = 0; j < size; ++j)
        m(j, j) = 1.0;
    return m;
}

void SimilarityMatrix::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    out << size_ << '\n';
    char buf[64];
    for (std::size_t j = 0; j < size_; ++j) {
        for (std::size_t k = 0; k < size_; ++k) {
            std::snprintf(buf, sizeof(buf), "%.17g", (*this)(j, k));
            out << buf << (k + 1 == size_ ? '\n' : ' ');
        }
    }
    if (!out)
        throw std::runtime_error("write failure: " + path);
}

SimilarityMatrix SimilarityMatrix::load(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open similarity matrix file: " + path);
    std::size_t size;
    if (!(in >> size))
        throw std::runtime_error(path + ": malformed similarity matrix header");
    SimilarityMatrix m(size);
    for (std::size_t j = 0; j < size; ++j)
        for (std::size_t k = 0; k < size; ++k)
            if (!(in >> m(j, k)))
                throw std::runtime_error(path + ": truncated similarity matrix");
    return m;
}

SimilarityMatrix similarity_matrix(const CountMatrix& norm) {
    const std::size_t q = norm.cols();
    // Column-major view of the sparse entries.
    std::vector<std::vector<std::pair<std::size_t, double>>> cols(q);
    for (const auto& [pos, v] : norm.entries())
        cols[pos.second].emplace_back(pos.first, v);

    std::vector<double> col_norm(q, 0.0);
    for (std::size_t j = 0; j < q; ++j) {
        double sq = 0.0;
        for (const auto& [r, v] : cols[j])
            sq += v * v;
        col_norm[j] = std::sqrt(sq);
    }

    SimilarityMatrix sim(q);
    std::vector<double> dense(norm.rows());
    for (std::size_t j = 0; j < q; ++j) {
        if (col_norm[j] == 0.0)
            continue;  // all-zero columns stay at similarity 0
        std::fill(dense.begin(), dense.end(), 0.0);
        for (const auto& [r, v] : cols[j])
            dense[r] = v;
        for (std::size_t k = j; k < q; ++k) {
            if (col_norm[k] == 0.0)
                continue;
            double dot = 0.0;
            for (const auto& [r, v] : cols[k])
                dot += dense[r] * v;
            double s = dot / (col_norm[j] * col_norm[k]);
            s = std::clamp(s, 0.0, 1.0);
            sim(j, k) = s;
            sim(k, j) = s;
        }
    }
    return sim;
}

CountMatrix imagine_counts(const CountMatrix& counts, const SimilarityMatrix& sim) {
    if (counts.cols() != sim.size())
        throw std::invalid_argument("imagine_counts: column count does not match similarity size");
    CountMatrix out(counts.rows(), counts.cols());
    for (std::size_t i = 0; i < counts.rows(); ++i) {
        auto row = counts.row_entries(i);
        if (row.empty())
            continue;
        double total = 0.0;
        for (const auto& [k, v] : row)
            total += v;
        for (std::size_t j = 0; j < counts.cols(); ++j) {
            double acc = 0.0;
            for (const auto& [k, v] : row)
                acc += v * sim(k, j);
            if (acc > 0.0)
                out.set(i, j, acc / total);
        }
    }
    return out;
}

CountMatrix select_imagined(const CountMatrix& imagined, const CountMatrix& given,
                            const ImaginationConfig& cfg) {
    if (imagined.rows() != given.rows() || imagined.cols() != given.cols())
        throw std::invalid_argument("select_imagined: shape mismatch");
    if (cfg.mode == SelectionMode::top_k && cfg.k < 1)
        throw std::invalid_argument("select_imagined: top-k mode requires k >= 1");

    CountMatrix out(imagined.rows(), imagined.cols());
    for (std::size_t i = 0; i < imagined.rows(); ++i) {
        std::vector<std::pair<std::size_t, double>> surviving;
        for (const auto& [j, v] : imagined.row_entries(i)) {
            if (cfg.mask_annotated && given.at(i, j) > 0.0)
                continue;
            surviving.emplace_back(j, v);
        }
        if (cfg.mode == SelectionMode::threshold) {
            for (const auto& [j, v] : surviving)
                if (v >= cfg.tau)
                    out.set(i, j, v);
        } else {
            // Descending value, ties broken by lower column id.
            std::stable_sort(surviving.begin(), surviving.end(),
                             [](const auto& a, const auto& b) { return a.second > b.second; });
            const std::size_t keep = std::min(cfg.k, surviving.size());
            for (std::size_t s = 0; s < keep; ++s)
                out.set(i, surviving[s].first, surviving[s].second);
        }
    }
    return out;
}

CountMatrix augment(const CountMatrix& given, const CountMatrix& selected) {
    if (given.rows() != selected.rows() || given.cols() != selected.cols())
        throw std::invalid_argument("augment: shape mismatch");
    CountMatrix out = given;
    for (const auto& [pos, v] : selected.entries())
        out.add(pos.first, pos.second, v);
    return out;
}

ImaginationResult imagine_pipeline(const Dataset& ds, const ImaginationConfig& cfg) {
    ds.validate();
    ImaginationResult r;
    r.word_sim = similarity_matrix(row_normalize(ds.words));
    r.blob_sim = similarity_matrix(row_normalize(ds.blobs));
    r.words_aug = augment(ds.words,
                          select_imagined(imagine_counts(ds.words, r.word_sim), ds.words, cfg));
    r.blobs_aug = augment(ds.blobs,
                          select_imagined(imagine_counts(ds.blobs, r.blob_sim), ds.blobs, cfg));
    return r;
}

}  // namespace plsavw
