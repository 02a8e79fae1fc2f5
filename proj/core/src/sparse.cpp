#include "authentext/sparse.hpp"

#include <algorithm>
#include <string>

#include "authentext/error.hpp"

namespace authentext {

double SparseRow::at(Column column) const noexcept {
  auto it = std::lower_bound(indices.begin(), indices.end(), column);
  if (it == indices.end() || *it != column) return 0.0;
  return values[static_cast<std::size_t>(it - indices.begin())];
}

void SparseMatrix::push_row(std::span<const Column> indices, std::span<const double> values) {
  if (indices.size() != values.size()) {
    throw Error(ErrorCode::input, "sparse row has mismatched index/value lengths");
  }
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= n_cols_) {
      throw Error(ErrorCode::input, "sparse column " + std::to_string(indices[k]) +
                                        " out of range for width " + std::to_string(n_cols_));
    }
    if (k > 0 && indices[k] <= indices[k - 1]) {
      throw Error(ErrorCode::input, "sparse row columns must be strictly increasing");
    }
    if (values[k] == 0.0) throw Error(ErrorCode::input, "sparse row stores an explicit zero");
  }
  indices_.insert(indices_.end(), indices.begin(), indices.end());
  values_.insert(values_.end(), values.begin(), values.end());
  offsets_.push_back(indices_.size());
}

SparseMatrix SparseMatrix::from_dense(std::span<const double> data, std::size_t n_rows,
                                      std::size_t n_cols) {
  if (data.size() != n_rows * n_cols) {
    throw Error(ErrorCode::input, "dense data size does not match the requested shape");
  }
  SparseMatrix m(n_cols);
  std::vector<Column> idx;
  std::vector<double> val;
  for (std::size_t i = 0; i < n_rows; ++i) {
    idx.clear();
    val.clear();
    for (std::size_t j = 0; j < n_cols; ++j) {
      const double v = data[i * n_cols + j];
      if (v != 0.0) {
        idx.push_back(static_cast<Column>(j));
        val.push_back(v);
      }
    }
    m.push_row(idx, val);
  }
  return m;
}

std::vector<double> SparseMatrix::to_dense() const {
  std::vector<double> out(n_rows() * n_cols_, 0.0);
  for (std::size_t i = 0; i < n_rows(); ++i) {
    const auto r = row(i);
    for (std::size_t k = 0; k < r.size(); ++k) out[i * n_cols_ + r.indices[k]] = r.values[k];
  }
  return out;
}

}  // namespace authentext
