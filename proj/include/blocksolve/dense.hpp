#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "blocksolve/errors.hpp"

namespace blocksolve {

using Vector = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void scale(double alpha, std::span<double> x) {
  for (double& v : x) v *= alpha;
}

// Column-major dense matrix. Used for factorization workspaces, Schur
// complements and the dense verification objects; sparse data lives in
// SparseMatrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0.0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(j) * rows_ + i]; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(j) * rows_ + i]; }

  std::span<double> col(int j) { return {a_.data() + static_cast<std::size_t>(j) * rows_, static_cast<std::size_t>(rows_)}; }
  std::span<const double> col(int j) const {
    return {a_.data() + static_cast<std::size_t>(j) * rows_, static_cast<std::size_t>(rows_)};
  }

  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }

  double max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
  }

  DenseMatrix transposed() const {
    DenseMatrix t(cols_, rows_);
    for (int j = 0; j < cols_; ++j)
      for (int i = 0; i < rows_; ++i) t(j, i) = (*this)(i, j);
    return t;
  }

  // y = A x  (or A^T x)
  void multiply(std::span<const double> x, std::span<double> y, bool transpose = false) const {
    const int m = transpose ? cols_ : rows_;
    const int n = transpose ? rows_ : cols_;
    if (static_cast<int>(x.size()) != n || static_cast<int>(y.size()) != m)
      throw DimensionMismatchError("DenseMatrix::multiply: size mismatch");
    std::fill(y.begin(), y.end(), 0.0);
    if (!transpose) {
      for (int j = 0; j < cols_; ++j) axpy(x[j], col(j), y);
    } else {
      for (int j = 0; j < cols_; ++j) y[j] = dot(col(j), x);
    }
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> a_;
};

}  // namespace blocksolve
