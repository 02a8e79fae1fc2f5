#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace authentext {

using Column = std::uint32_t;

/// (column, weight) pairs with strictly increasing columns and no stored zeros.
struct SparseVector {
  std::vector<Column> indices;
  std::vector<double> values;

  std::size_t size() const noexcept { return indices.size(); }
  bool empty() const noexcept { return indices.empty(); }

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

/// Read-only view of one CSR row.
struct SparseRow {
  std::span<const Column> indices;
  std::span<const double> values;

  std::size_t size() const noexcept { return indices.size(); }
  /// Stored value at `column`, 0 when absent (binary search).
  double at(Column column) const noexcept;
};

/// Compressed sparse rows.
class SparseMatrix {
 public:
  explicit SparseMatrix(std::size_t n_cols = 0) : n_cols_(n_cols) {}

  /// Appends a row; Error(input) when it breaks the SparseVector invariants
  /// or has a column >= n_cols.
  void push_row(std::span<const Column> indices, std::span<const double> values);
  void push_row(const SparseVector& row) { push_row(row.indices, row.values); }

  std::size_t n_rows() const noexcept { return offsets_.size() - 1; }
  std::size_t n_cols() const noexcept { return n_cols_; }
  std::size_t nnz() const noexcept { return indices_.size(); }

  SparseRow row(std::size_t i) const noexcept {
    const std::size_t b = offsets_[i], e = offsets_[i + 1];
    return {std::span(indices_).subspan(b, e - b), std::span(values_).subspan(b, e - b)};
  }

  std::span<const std::size_t> offsets() const noexcept { return offsets_; }

  /// Builds from row-major dense data, dropping exact zeros.
  static SparseMatrix from_dense(std::span<const double> data, std::size_t n_rows,
                                 std::size_t n_cols);
  std::vector<double> to_dense() const;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  std::size_t n_cols_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Column> indices_;
  std::vector<double> values_;
};

}  // namespace authentext
