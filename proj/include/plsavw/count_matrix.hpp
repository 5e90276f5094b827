#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace plsavw {

/// Sparse nonnegative real-valued matrix. Stored zeros are not permitted;
/// entry iteration is row-major by (row, col).
class CountMatrix {
public:
    using Index = std::size_t;
    using EntryMap = std::map<std::pair<Index, Index>, double>;

    CountMatrix() = default;
    CountMatrix(Index rows, Index cols) : rows_(rows), cols_(cols) {}

    Index rows() const { return rows_; }
    Index cols() const { return cols_; }

    double at(Index r, Index c) const {
        check_bounds(r, c);
        auto it = entries_.find({r, c});
        return it == entries_.end() ? 0.0 : it->second;
    }

    /// Stores v at (r, c). v == 0 erases the entry (sparsity canonical form).
    void set(Index r, Index c, double v);

    /// Adds v to the existing entry; duplicate positions accumulate.
    void add(Index r, Index c, double v);

    const EntryMap& entries() const { return entries_; }
    Index nonzero_count() const { return entries_.size(); }

    double row_sum(Index r) const;

    /// Entries of row r as (col, value) pairs in ascending column order.
    std::vector<std::pair<Index, double>> row_entries(Index r) const;

    std::vector<double> dense_row(Index r) const;

    /// Per-column sums (length cols()).
    std::vector<double> column_sums() const;

    bool operator==(const CountMatrix&) const = default;

private:
    void check_bounds(Index r, Index c) const {
        if (r >= rows_ || c >= cols_)
            throw std::out_of_range("CountMatrix index out of range");
    }

    Index rows_ = 0;
    Index cols_ = 0;
    EntryMap entries_;
};

/// Scales every entry of a row to make it sum to 1; all-zero rows stay zero.
CountMatrix row_normalize(const CountMatrix& m);

}  // namespace plsavw
