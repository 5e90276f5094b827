#include "plsavw/plsa.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "plsavw/rng.hpp"

namespace plsavw {

namespace {

using Matrix = std::vector<std::vector<double>>;

struct SparseRows {
    std::vector<std::vector<std::pair<std::size_t, double>>> rows;

    explicit SparseRows(const CountMatrix& m) : rows(m.rows()) {
        for (const auto& [pos, v] : m.entries())
            rows[pos.first].emplace_back(pos.second, v);
    }
};

void normalize_row(std::vector<double>& row) {
    double total = 0.0;
    for (double v : row)
        total += v;
    if (total > 0.0) {
        for (double& v : row)
            v /= total;
    } else {
        // No mass reached this row; fall back to the uniform distribution.
        const double u = 1.0 / static_cast<double>(row.size());
        for (double& v : row)
            v = u;
    }
}

Matrix random_stochastic(std::size_t rows, std::size_t cols, Rng& rng) {
    Matrix m(rows, std::vector<double>(cols));
    for (auto& row : m) {
        for (double& v : row)
            v = 1.0 - rng.uniform01();  // positive draw in (0, 1]
        normalize_row(row);
    }
    return m;
}

void write_matrix(std::ofstream& out, const Matrix& m) {
    char buf[64];
    for (const auto& row : m) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", row[j]);
            out << buf << (j + 1 == row.size() ? '\n' : ' ');
        }
    }
}

Matrix read_matrix(std::ifstream& in, std::size_t rows, std::size_t cols, const std::string& path) {
    Matrix m(rows, std::vector<double>(cols));
    for (auto& row : m)
        for (double& v : row)
            if (!(in >> v))
                throw std::runtime_error(path + ": truncated model file");
    return m;
}

/// One EM sweep on `data` updating `item_given_topic` (and, unless frozen,
/// `topic_given_doc`). Document blocks are processed independently and
/// reduced in a fixed block order, so the result depends on n_threads only
/// through final-bit rounding of the reduction.
void em_sweep(const SparseRows& data, Matrix& topic_given_doc, Matrix& item_given_topic,
              bool freeze_mixtures, std::size_t n_threads) {
    const std::size_t n_docs = data.rows.size();
    const std::size_t n_topics = item_given_topic.size();
    const std::size_t n_items = item_given_topic[0].size();

    const std::size_t blocks = std::max<std::size_t>(1, std::min(n_threads, n_docs));
    std::vector<Matrix> acc_item(blocks, Matrix(n_topics, std::vector<double>(n_items, 0.0)));
    Matrix acc_doc(n_docs, std::vector<double>(n_topics, 0.0));

    auto process_block = [&](std::size_t b) {
        const std::size_t lo = n_docs * b / blocks;
        const std::size_t hi = n_docs * (b + 1) / blocks;
        std::vector<double> resp(n_topics);
        for (std::size_t i = lo; i < hi; ++i) {
            for (const auto& [j, count] : data.rows[i]) {
                double denom = 0.0;
                for (std::size_t t = 0; t < n_topics; ++t) {
                    resp[t] = topic_given_doc[i][t] * item_given_topic[t][j];
                    denom += resp[t];
                }
                if (denom == 0.0)
                    continue;  // no topic explains this item; skip its mass
                for (std::size_t t = 0; t < n_topics; ++t) {
                    const double r = count * resp[t] / denom;
                    acc_item[b][t][j] += r;
                    acc_doc[i][t] += r;
                }
            }
        }
    };

    if (blocks == 1) {
        process_block(0);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(blocks);
        for (std::size_t b = 0; b < blocks; ++b)
            threads.emplace_back(process_block, b);
        for (auto& th : threads)
            th.join();
    }

    for (std::size_t t = 0; t < n_topics; ++t) {
        auto& row = item_given_topic[t];
        std::fill(row.begin(), row.end(), 0.0);
        for (std::size_t b = 0; b < blocks; ++b)
            for (std::size_t j = 0; j < n_items; ++j)
                row[j] += acc_item[b][t][j];
        normalize_row(row);
    }
    if (!freeze_mixtures) {
        for (std::size_t i = 0; i < n_docs; ++i) {
            topic_given_doc[i] = acc_doc[i];
            normalize_row(topic_given_doc[i]);
        }
    }
}

double sparse_log_likelihood(const SparseRows& data, const Matrix& topic_given_doc,
                             const Matrix& item_given_topic) {
    const std::size_t n_topics = item_given_topic.size();
    double ll = 0.0;
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
        for (const auto& [j, count] : data.rows[i]) {
            double p = 0.0;
            for (std::size_t t = 0; t < n_topics; ++t)
                p += topic_given_doc[i][t] * item_given_topic[t][j];
            if (p == 0.0)
                return -std::numeric_limits<double>::infinity();
            ll += count * std::log(p);
        }
    }
    return ll;
}

bool converged(const std::vector<double>& trace, double rel_tol) {
    if (trace.size() < 2)
        return false;
    const double prev = trace[trace.size() - 2];
    const double cur = trace.back();
    return cur == prev || std::abs(cur - prev) < rel_tol * std::abs(prev);
}

}  // namespace

void EmOptions::validate() const {
    if (max_iters < 1)
        throw std::invalid_argument("EmOptions: maxIters must be >= 1");
    if (!(rel_tol > 0.0))
        throw std::invalid_argument("EmOptions: relTol must be > 0");
}

TrainResult train_plsa(const CountMatrix& counts, std::size_t n_topics, const EmOptions& opts) {
    opts.validate();
    if (n_topics < 1)
        throw std::invalid_argument("train_plsa: T must be >= 1");
    if (counts.nonzero_count() == 0)
        throw std::invalid_argument("train_plsa: count matrix has no nonzero entries");

    SparseRows data(counts);
    Rng rng(opts.seed);
    PlsaModel model;
    model.n_topics = n_topics;
    model.topic_given_doc = random_stochastic(counts.rows(), n_topics, rng);
    model.word_given_topic = random_stochastic(n_topics, counts.cols(), rng);

    std::vector<double> trace;
    for (std::size_t iter = 0; iter < opts.max_iters; ++iter) {
        em_sweep(data, model.topic_given_doc, model.word_given_topic,
                 /*freeze_mixtures=*/false, opts.n_threads);
        trace.push_back(sparse_log_likelihood(data, model.topic_given_doc, model.word_given_topic));
        if (converged(trace, opts.rel_tol))
            break;
    }
    return {std::move(model), std::move(trace)};
}

FoldFeaturesResult fold_in_features(const PlsaModel& model, const CountMatrix& blob_counts,
                                    const EmOptions& opts) {
    opts.validate();
    if (model.topic_given_doc.size() != blob_counts.rows())
        throw std::invalid_argument("fold_in_features: document count mismatch");

    SparseRows data(blob_counts);
    PlsaModel out = model;
    // Warm-start from an existing blob distribution of the right shape, so
    // folding a converged model again is a fixed point.
    if (out.blob_given_topic.size() != model.n_topics ||
        out.blob_given_topic[0].size() != blob_counts.cols()) {
        Rng rng(opts.seed);
        out.blob_given_topic = random_stochastic(model.n_topics, blob_counts.cols(), rng);
    }

    std::vector<double> trace;
    for (std::size_t iter = 0; iter < opts.max_iters; ++iter) {
        em_sweep(data, out.topic_given_doc, out.blob_given_topic,
                 /*freeze_mixtures=*/true, opts.n_threads);
        trace.push_back(sparse_log_likelihood(data, out.topic_given_doc, out.blob_given_topic));
        if (converged(trace, opts.rel_tol))
            break;
    }
    return {std::move(out), std::move(trace)};
}

FoldDocumentsResult fold_in_documents(const PlsaModel& model, const CountMatrix& test_blob_counts,
                                      const EmOptions& opts) {
    opts.validate();
    if (!model.has_blobs())
        throw std::invalid_argument("fold_in_documents: model has no blob distributions");
    if (test_blob_counts.cols() != model.n_blobs())
        throw std::invalid_argument("fold_in_documents: blob vocabulary size mismatch");

    const std::size_t n_docs = test_blob_counts.rows();
    const std::size_t n_topics = model.n_topics;
    SparseRows data(test_blob_counts);

    // Uniform start; the per-document objective is concave in the mixture,
    // so no random restarts are needed.
    Matrix mixtures(n_docs, std::vector<double>(n_topics, 1.0 / static_cast<double>(n_topics)));

    std::vector<double> trace;
    const auto& bt = model.blob_given_topic;
    std::vector<double> resp(n_topics);
    for (std::size_t iter = 0; iter < opts.max_iters; ++iter) {
        double ll = 0.0;
        for (std::size_t i = 0; i < n_docs; ++i) {
            if (data.rows[i].empty())
                continue;  // no evidence; mixture stays uniform
            std::vector<double> acc(n_topics, 0.0);
            for (const auto& [j, count] : data.rows[i]) {
                double denom = 0.0;
                for (std::size_t t = 0; t < n_topics; ++t) {
                    resp[t] = mixtures[i][t] * bt[t][j];
                    denom += resp[t];
                }
                if (denom == 0.0)
                    continue;
                for (std::size_t t = 0; t < n_topics; ++t)
                    acc[t] += count * resp[t] / denom;
            }
            mixtures[i] = acc;
            normalize_row(mixtures[i]);
            for (const auto& [j, count] : data.rows[i]) {
                double p = 0.0;
                for (std::size_t t = 0; t < n_topics; ++t)
                    p += mixtures[i][t] * bt[t][j];
                if (p == 0.0) {
                    ll = -std::numeric_limits<double>::infinity();
                    break;
                }
                ll += count * std::log(p);
            }
        }
        trace.push_back(ll);
        if (converged(trace, opts.rel_tol))
            break;
    }
    return {std::move(mixtures), std::move(trace)};
}

std::vector<std::vector<double>> annotate(const PlsaModel& model,
                                          const std::vector<std::vector<double>>& mixtures) {
    const std::size_t n_topics = model.n_topics;
    const std::size_t n_words = model.n_words();
    std::vector<std::vector<double>> scores(mixtures.size(), std::vector<double>(n_words, 0.0));
    for (std::size_t i = 0; i < mixtures.size(); ++i) {
        if (mixtures[i].size() != n_topics)
            throw std::invalid_argument("annotate: mixture width does not match topic count");
        for (std::size_t t = 0; t < n_topics; ++t) {
            const double w = mixtures[i][t];
            for (std::size_t j = 0; j < n_words; ++j)
                scores[i][j] += w * model.word_given_topic[t][j];
        }
    }
    return scores;
}

std::vector<std::size_t> top_keywords(const std::vector<double>& scores, std::size_t k) {
    if (k < 1)
        throw std::invalid_argument("top_keywords: k must be >= 1");
    std::vector<std::size_t> ids(scores.size());
    for (std::size_t j = 0; j < ids.size(); ++j)
        ids[j] = j;
    std::stable_sort(ids.begin(), ids.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    if (k < ids.size())
        ids.resize(k);
    return ids;
}

double log_likelihood(const CountMatrix& counts,
                      const std::vector<std::vector<double>>& mixtures,
                      const std::vector<std::vector<double>>& item_given_topic) {
    if (mixtures.size() != counts.rows())
        throw std::invalid_argument("log_likelihood: row count mismatch");
    SparseRows data(counts);
    return sparse_log_likelihood(data, mixtures, item_given_topic);
}

void PlsaModel::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    out << "plsavw-model 1\n";
    out << n_topics << ' ' << n_words() << ' ' << n_blobs() << ' ' << (has_blobs() ? 1 : 0) << ' '
        << n_docs() << '\n';
    write_matrix(out, word_given_topic);
    if (has_blobs())
        write_matrix(out, blob_given_topic);
    write_matrix(out, topic_given_doc);
    if (!out)
        throw std::runtime_error("write failure: " + path);
}

PlsaModel PlsaModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open model file: " + path);
    std::string tag;
    int version = 0;
    if (!(in >> tag >> version) || tag != "plsavw-model" || version != 1)
        throw std::runtime_error(path + ": unrecognized model file version");
    std::size_t t, q, p, n;
    int has_blobs;
    if (!(in >> t >> q >> p >> has_blobs >> n))
        throw std::runtime_error(path + ": malformed model header");
    PlsaModel m;
    m.n_topics = t;
    m.word_given_topic = read_matrix(in, t, q, path);
    if (has_blobs)
        m.blob_given_topic = read_matrix(in, t, p, path);
    m.topic_given_doc = read_matrix(in, n, t, path);
    return m;
}

}  // namespace plsavw
