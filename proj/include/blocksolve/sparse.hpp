#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "blocksolve/dense.hpp"
#include "blocksolve/errors.hpp"

namespace blocksolve {

struct Triplet {
  int row;
  int col;
  double value;
};

// Coordinate-built sparse matrix with a compressed-column access path.
// Symmetric-marked matrices store the lower triangle only; every consumer
// (spmv, densify, factorizations) expands the mirrored part implicitly.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols, bool symmetric = false) : rows_(rows), cols_(cols), symmetric_(symmetric) {
    if (rows < 0 || cols < 0) throw DimensionMismatchError("SparseMatrix: negative dimension");
    if (symmetric && rows != cols) throw DimensionMismatchError("SparseMatrix: symmetric matrix must be square");
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool symmetric() const { return symmetric_; }
  bool finalized() const { return finalized_; }

  void add(int i, int j, double v) {
    if (finalized_) throw Error("SparseMatrix::add after finalize");
    if (i < 0 || i >= rows_ || j < 0 || j >= cols_)
      throw DimensionMismatchError("SparseMatrix::add: index (" + std::to_string(i) + "," + std::to_string(j) +
                                   ") out of range for " + std::to_string(rows_) + "x" + std::to_string(cols_));
    if (symmetric_ && i < j) throw Error("SparseMatrix::add: symmetric matrices take lower-triangle entries only");
    triplets_.push_back({i, j, v});
  }

  // Sorts by (col, row), combines duplicate coordinates by summation, and
  // builds the compressed-column arrays.
  void finalize() {
    if (finalized_) return;
    std::sort(triplets_.begin(), triplets_.end(),
              [](const Triplet& a, const Triplet& b) { return a.col != b.col ? a.col < b.col : a.row < b.row; });
    std::vector<Triplet> merged;
    merged.reserve(triplets_.size());
    for (const Triplet& t : triplets_) {
      if (!merged.empty() && merged.back().row == t.row && merged.back().col == t.col)
        merged.back().value += t.value;
      else
        merged.push_back(t);
    }
    triplets_ = std::move(merged);
    col_ptr_.assign(cols_ + 1, 0);
    row_ind_.resize(triplets_.size());
    values_.resize(triplets_.size());
    for (const Triplet& t : triplets_) ++col_ptr_[t.col + 1];
    std::partial_sum(col_ptr_.begin(), col_ptr_.end(), col_ptr_.begin());
    for (std::size_t k = 0; k < triplets_.size(); ++k) {
      row_ind_[k] = triplets_[k].row;
      values_[k] = triplets_[k].value;
    }
    finalized_ = true;
  }

  std::size_t nnz() const { return finalized_ ? values_.size() : triplets_.size(); }
  const std::vector<Triplet>& triplets() const { return triplets_; }
  std::span<const int> col_ptr() const { return col_ptr_; }
  std::span<const int> row_ind() const { return row_ind_; }
  std::span<const double> values() const { return values_; }

  std::span<const int> col_rows(int j) const { return {row_ind_.data() + col_ptr_[j], static_cast<std::size_t>(col_ptr_[j + 1] - col_ptr_[j])}; }
  std::span<const double> col_values(int j) const {
    return {values_.data() + col_ptr_[j], static_cast<std::size_t>(col_ptr_[j + 1] - col_ptr_[j])};
  }

  // y = M x, or M^T x with transpose set. Symmetric matrices ignore the
  // transpose flag.
  Vector multiply(std::span<const double> x, bool transpose = false) const {
    require_finalized();
    if (symmetric_) transpose = false;
    const int out_dim = transpose ? cols_ : rows_;
    const int in_dim = transpose ? rows_ : cols_;
    if (static_cast<int>(x.size()) != in_dim) throw DimensionMismatchError("SparseMatrix::multiply: size mismatch");
    Vector y(out_dim, 0.0);
    if (symmetric_) {
      for (int j = 0; j < cols_; ++j) {
        for (int k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) {
          const int i = row_ind_[k];
          const double v = values_[k];
          y[i] += v * x[j];
          if (i != j) y[j] += v * x[i];
        }
      }
    } else if (!transpose) {
      for (int j = 0; j < cols_; ++j)
        for (int k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) y[row_ind_[k]] += values_[k] * x[j];
    } else {
      for (int j = 0; j < cols_; ++j) {
        double s = 0.0;
        for (int k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) s += values_[k] * x[row_ind_[k]];
        y[j] = s;
      }
    }
    return y;
  }

  DenseMatrix to_dense() const {
    require_finalized();
    DenseMatrix d(rows_, cols_);
    for (int j = 0; j < cols_; ++j) {
      for (int k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) {
        const int i = row_ind_[k];
        d(i, j) = values_[k];
        if (symmetric_ && i != j) d(j, i) = values_[k];
      }
    }
    return d;
  }

  // Explicit transpose; result is general even when this is symmetric.
  SparseMatrix transposed() const {
    require_finalized();
    SparseMatrix t(cols_, rows_);
    for (int j = 0; j < cols_; ++j) {
      for (int k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) {
        t.add(j, row_ind_[k], values_[k]);
        if (symmetric_ && row_ind_[k] != j) t.add(row_ind_[k], j, values_[k]);
      }
    }
    t.finalize();
    return t;
  }

  static SparseMatrix identity(int n, double value = 1.0) {
    SparseMatrix m(n, n, true);
    for (int i = 0; i < n; ++i) m.add(i, i, value);
    m.finalize();
    return m;
  }

 private:
  void require_finalized() const {
    if (!finalized_) throw Error("SparseMatrix: finalize() required before use");
  }

  int rows_ = 0;
  int cols_ = 0;
  bool symmetric_ = false;
  bool finalized_ = false;
  std::vector<Triplet> triplets_;
  std::vector<int> col_ptr_;
  std::vector<int> row_ind_;
  std::vector<double> values_;
};

inline Vector spmv(const SparseMatrix& m, std::span<const double> x, bool transpose = false) {
  return m.multiply(x, transpose);
}

// Diagonal concatenation; row and column offsets accumulate independently,
// so rectangular blocks are allowed. The result is marked symmetric iff all
// blocks are.
inline SparseMatrix block_diag(std::span<const SparseMatrix* const> blocks) {
  int rows = 0, cols = 0;
  bool all_symmetric = !blocks.empty();
  for (const SparseMatrix* b : blocks) {
    rows += b->rows();
    cols += b->cols();
    all_symmetric = all_symmetric && b->symmetric();
  }
  SparseMatrix out(rows, cols, all_symmetric);
  int row_off = 0, col_off = 0;
  for (const SparseMatrix* b : blocks) {
    for (int j = 0; j < b->cols(); ++j)
      for (std::size_t k = 0; k < b->col_rows(j).size(); ++k)
        out.add(row_off + b->col_rows(j)[k], col_off + j, b->col_values(j)[k]);
    row_off += b->rows();
    col_off += b->cols();
  }
  out.finalize();
  return out;
}

inline SparseMatrix block_diag(const std::vector<SparseMatrix>& blocks) {
  std::vector<const SparseMatrix*> ptrs;
  ptrs.reserve(blocks.size());
  for (const SparseMatrix& b : blocks) ptrs.push_back(&b);
  return block_diag(std::span<const SparseMatrix* const>(ptrs));
}

// Dense A^T B from two conforming sparse matrices (shared row dimension).
// Both KKT assembly and the dense splitting go through this helper so the
// corresponding entries agree bitwise.
inline DenseMatrix atb_dense(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.symmetric() || b.symmetric()) throw Error("atb_dense: general matrices only");
  if (a.rows() != b.rows()) throw DimensionMismatchError("atb_dense: row dimension mismatch");
  DenseMatrix out(a.cols(), b.cols());
  for (int i = 0; i < a.cols(); ++i) {
    const auto ar = a.col_rows(i);
    const auto av = a.col_values(i);
    for (int j = 0; j < b.cols(); ++j) {
      const auto br = b.col_rows(j);
      const auto bv = b.col_values(j);
      double s = 0.0;
      std::size_t p = 0, q = 0;
      while (p < ar.size() && q < br.size()) {
        if (ar[p] == br[q])
          s += av[p++] * bv[q++];
        else if (ar[p] < br[q])
          ++p;
        else
          ++q;
      }
      out(i, j) = s;
    }
  }
  return out;
}

}  // namespace blocksolve
