#include "plsavw/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace plsavw {

namespace {

/// Image indices ranked by score for one keyword, descending; equal scores
/// rank by lower image index.
std::vector<std::size_t> rank_images(const AnnotationRun& run, std::size_t keyword) {
    std::vector<std::size_t> order(run.scores.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return run.scores[a][keyword] > run.scores[b][keyword];
    });
    return order;
}

std::size_t score_width(const AnnotationRun& run) {
    return run.scores.empty() ? 0 : run.scores[0].size();
}

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

double annotation_precision(const AnnotationRun& run) {
    if (run.predicted.empty())
        throw std::invalid_argument("annotation_precision: empty test set");
    double total = 0.0;
    std::size_t counted = 0;
    for (std::size_t i = 0; i < run.predicted.size(); ++i) {
        const auto& gt = run.ground_truth[i];
        if (gt.empty())
            continue;
        std::size_t correct = 0;
        for (std::size_t id : run.predicted[i])
            correct += gt.count(id);
        total += static_cast<double>(correct) / static_cast<double>(gt.size());
        ++counted;
    }
    if (counted == 0)
        throw std::invalid_argument("annotation_precision: no image has ground truth");
    return total / static_cast<double>(counted);
}

std::map<std::size_t, double> per_keyword_average_precision(const AnnotationRun& run) {
    std::map<std::size_t, double> out;
    const std::size_t q = score_width(run);
    for (std::size_t w = 0; w < q; ++w) {
        std::size_t n_relevant = 0;
        for (const auto& gt : run.ground_truth)
            n_relevant += gt.count(w);
        if (n_relevant == 0)
            continue;
        auto order = rank_images(run, w);
        double sum = 0.0;
        std::size_t hits = 0;
        for (std::size_t r = 0; r < order.size(); ++r) {
            if (run.ground_truth[order[r]].count(w)) {
                ++hits;
                sum += static_cast<double>(hits) / static_cast<double>(r + 1);
            }
        }
        out[w] = sum / static_cast<double>(n_relevant);
    }
    return out;
}

double mean_average_precision(const AnnotationRun& run) {
    auto per_keyword = per_keyword_average_precision(run);
    if (per_keyword.empty())
        return 0.0;
    double total = 0.0;
    for (const auto& [w, ap] : per_keyword)
        total += ap;
    return total / static_cast<double>(per_keyword.size());
}

double retrieval_precision(const AnnotationRun& run, std::size_t m) {
    if (m < 1)
        throw std::invalid_argument("retrieval_precision: M must be >= 1");
    const std::size_t q = score_width(run);
    double total = 0.0;
    std::size_t counted = 0;
    for (std::size_t w = 0; w < q; ++w) {
        std::size_t n_relevant = 0;
        for (const auto& gt : run.ground_truth)
            n_relevant += gt.count(w);
        if (n_relevant == 0)
            continue;
        auto order = rank_images(run, w);
        std::size_t hits = 0;
        const std::size_t pool = std::min(m, order.size());
        for (std::size_t r = 0; r < pool; ++r)
            hits += run.ground_truth[order[r]].count(w);
        total += static_cast<double>(hits) / static_cast<double>(m);
        ++counted;
    }
    return counted == 0 ? 0.0 : total / static_cast<double>(counted);
}

std::set<std::size_t> correct_keywords(const AnnotationRun& run) {
    std::set<std::size_t> out;
    for (std::size_t i = 0; i < run.predicted.size(); ++i)
        for (std::size_t id : run.predicted[i])
            if (run.ground_truth[i].count(id))
                out.insert(id);
    return out;
}

double rsi(const AnnotationRun& run, std::size_t vocab_size) {
    if (vocab_size == 0)
        throw std::invalid_argument("rsi: vocabulary size must be >= 1");
    return 100.0 * static_cast<double>(correct_keywords(run).size()) /
           static_cast<double>(vocab_size);
}

AnnotationRun frequency_prior_baseline(const CountMatrix& train_words, std::size_t n_test,
                                       std::size_t k) {
    if (k < 1)
        throw std::invalid_argument("frequency_prior_baseline: k must be >= 1");
    auto totals = train_words.column_sums();
    std::vector<std::size_t> order(totals.size());
    for (std::size_t j = 0; j < order.size(); ++j)
        order[j] = j;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return totals[a] > totals[b]; });
    order.resize(std::min(k, order.size()));

    AnnotationRun run;
    run.predicted.assign(n_test, order);
    run.scores.assign(n_test, totals);
    run.ground_truth.assign(n_test, {});
    return run;
}

FrequencyCoverageReport frequency_coverage_report(const CountMatrix& train_words,
                                                  const AnnotationRun& run, double cutoff) {
    auto totals = train_words.column_sums();
    auto correct = correct_keywords(run);
    FrequencyCoverageReport report;
    report.cutoff = cutoff;
    for (std::size_t w = 0; w < totals.size(); ++w) {
        bool ever = correct.count(w) > 0;
        report.rows.push_back({w, totals[w], ever});
        if (ever && totals[w] < cutoff)
            ++report.correct_below_cutoff;
    }
    return report;
}

MetricsReport evaluate(const AnnotationRun& run, std::size_t vocab_size, std::size_t retrieval_m) {
    MetricsReport r;
    r.ap = 100.0 * annotation_precision(run);
    r.map = 100.0 * mean_average_precision(run);
    r.rp = 100.0 * retrieval_precision(run, retrieval_m);
    r.rsi = rsi(run, vocab_size);
    r.per_keyword_ap = per_keyword_average_precision(run);
    auto correct = correct_keywords(run);
    for (std::size_t w = 0; w < vocab_size; ++w)
        r.per_keyword_correct[w] = correct.count(w) > 0;
    return r;
}

std::string MetricsReport::to_text() const {
    std::ostringstream out;
    out << "ap " << fmt2(ap) << '\n';
    out << "map " << fmt2(map) << '\n';
    out << "rp " << fmt2(rp) << '\n';
    out << "rsi " << fmt2(rsi) << '\n';
    if (ap_var)
        out << "ap_var " << fmt2(*ap_var) << '\n';
    if (map_var)
        out << "map_var " << fmt2(*map_var) << '\n';
    if (rp_var)
        out << "rp_var " << fmt2(*rp_var) << '\n';
    if (rsi_var)
        out << "rsi_var " << fmt2(*rsi_var) << '\n';
    out << "per_keyword keyword ap correct\n";
    for (const auto& [w, correct] : per_keyword_correct) {
        auto it = per_keyword_ap.find(w);
        out << w << ' ' << (it == per_keyword_ap.end() ? "-" : fmt2(100.0 * it->second)) << ' '
            << (correct ? 1 : 0) << '\n';
    }
    return out.str();
}

void MetricsReport::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    out << to_text();
    if (!out)
        throw std::runtime_error("write failure: " + path);
}

}  // namespace plsavw
