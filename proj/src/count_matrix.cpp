#include "plsavw/count_matrix.hpp"

#include <cmath>

namespace plsavw {

void CountMatrix::set(Index r, Index c, double v) {
    check_bounds(r, c);
    if (!std::isfinite(v) || v < 0.0)
        throw std::invalid_argument("CountMatrix entries must be finite and >= 0");
    if (v == 0.0)
        entries_.erase({r, c});
    else
        entries_[{r, c}] = v;
}

void CountMatrix::add(Index r, Index c, double v) {
    set(r, c, at(r, c) + v);
}

double CountMatrix::row_sum(Index r) const {
    double s = 0.0;
    auto it = entries_.lower_bound({r, 0});
    for (; it != entries_.end() && it->first.first == r; ++it)
        s += it->second;
    return s;
}

std::vector<std::pair<CountMatrix::Index, double>> CountMatrix::row_entries(Index r) const {
    std::vector<std::pair<Index, double>> out;
    auto it = entries_.lower_bound({r, 0});
    for (; it != entries_.end() && it->first.first == r; ++it)
        out.emplace_back(it->first.second, it->second);
    return out;
}

std::vector<double> CountMatrix::dense_row(Index r) const {
    std::vector<double> out(cols_, 0.0);
    for (const auto& [c, v] : row_entries(r))
        out[c] = v;
    return out;
}

std::vector<double> CountMatrix::column_sums() const {
    std::vector<double> out(cols_, 0.0);
    for (const auto& [pos, v] : entries_)
        out[pos.second] += v;
    return out;
}

CountMatrix row_normalize(const CountMatrix& m) {
    CountMatrix out(m.rows(), m.cols());
    std::vector<double> sums(m.rows(), 0.0);
    for (const auto& [pos, v] : m.entries())
        sums[pos.first] += v;
    for (const auto& [pos, v] : m.entries())
        out.set(pos.first, pos.second, v / sums[pos.first]);
    return out;
}

}  // namespace plsavw
