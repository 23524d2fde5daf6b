#pragma once

#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "blocksolve/dense.hpp"
#include "blocksolve/sparse.hpp"

namespace blocksolve {

struct Inertia {
  int positive = 0;
  int negative = 0;
  int zero = 0;
};

// A pivot counts as zero when its magnitude falls below this fraction of the
// largest entry of the matrix being factorized.
inline constexpr double kPivotZeroTol = 1e-12;

// Dense Bunch-Kaufman LDL^T factorization with symmetric partial pivoting
// (1x1 and 2x2 pivot blocks). Handles the indefinite saddle-point blocks
// K_s and the Schur complement; reports inertia from the pivot blocks.
// Immutable after construction; solve() is const and reentrant.
class SymIndefFactor {
 public:
  explicit SymIndefFactor(DenseMatrix a) : n_(a.rows()) {
    if (a.rows() != a.cols()) throw DimensionMismatchError("SymIndefFactor: matrix must be square");
    factorize(a);
  }
  explicit SymIndefFactor(const SparseMatrix& m) : SymIndefFactor(checked_dense(m)) {}

  int dim() const { return n_; }
  const Inertia& inertia() const { return inertia_; }

  Vector solve(std::span<const double> b) const {
    if (static_cast<int>(b.size()) != n_) throw DimensionMismatchError("SymIndefFactor::solve: rhs length mismatch");
    Vector x(b.begin(), b.end());
    solve_in_place(x);
    return x;
  }

  // Multi-RHS solve, column by column.
  DenseMatrix solve(const DenseMatrix& b) const {
    if (b.rows() != n_) throw DimensionMismatchError("SymIndefFactor::solve: rhs rows mismatch");
    DenseMatrix x = b;
    Vector work(n_);
    for (int j = 0; j < b.cols(); ++j) {
      auto c = x.col(j);
      std::copy(c.begin(), c.end(), work.begin());
      solve_in_place(work);
      std::copy(work.begin(), work.end(), c.begin());
    }
    return x;
  }

 private:
  static DenseMatrix checked_dense(const SparseMatrix& m) {
    if (!m.symmetric()) throw Error("SymIndefFactor: sparse input must carry the symmetric flag");
    return m.to_dense();
  }

  void factorize(DenseMatrix& w) {
    const double alpha = (1.0 + std::sqrt(17.0)) / 8.0;
    const double tol = kPivotZeroTol * std::max(1.0, w.max_abs());
    lower_ = DenseMatrix(n_, n_);
    diag_.assign(n_, 0.0);
    offdiag_.assign(n_, 0.0);
    two_by_two_.assign(n_, false);
    perm_.resize(n_);
    std::iota(perm_.begin(), perm_.end(), 0);

    int k = 0;
    while (k < n_) {
      // Largest subdiagonal entry of column k.
      double colmax = 0.0;
      int imax = k;
      for (int i = k + 1; i < n_; ++i) {
        const double v = std::abs(w(i, k));
        if (v > colmax) {
          colmax = v;
          imax = i;
        }
      }
      const double absakk = std::abs(w(k, k));
      if (std::max(absakk, colmax) <= tol)
        throw SingularMatrixError("symmetric indefinite factorization: zero pivot column at step " + std::to_string(k));

      bool use_two = false;
      if (absakk < alpha * colmax) {
        double rowmax = 0.0;
        for (int j = k; j < n_; ++j) {
          if (j == imax) continue;
          const double v = std::abs(w(imax, j));
          if (v > rowmax) rowmax = v;
        }
        if (absakk * rowmax < alpha * colmax * colmax) {
          if (std::abs(w(imax, imax)) >= alpha * rowmax) {
            interchange(w, k, imax, k);
          } else {
            interchange(w, k + 1, imax, k);
            use_two = true;
          }
        }
      }

      if (!use_two) {
        const double d = w(k, k);
        if (std::abs(d) <= tol)
          throw SingularMatrixError("symmetric indefinite factorization: zero 1x1 pivot at step " + std::to_string(k));
        diag_[k] = d;
        (d > 0.0 ? inertia_.positive : inertia_.negative) += 1;
        for (int i = k + 1; i < n_; ++i) lower_(i, k) = w(i, k) / d;
        for (int j = k + 1; j < n_; ++j) {
          const double wj = w(j, k);
          if (wj == 0.0) continue;
          const double s = wj / d;
          for (int i = k + 1; i < n_; ++i) w(i, j) -= s * w(i, k);
        }
        ++k;
      } else {
        const double a = w(k, k);
        const double b = w(k + 1, k);
        const double c = w(k + 1, k + 1);
        const double det = a * c - b * b;
        if (std::abs(det) <= tol * std::max({std::abs(a), std::abs(b), std::abs(c)}))
          throw SingularMatrixError("symmetric indefinite factorization: singular 2x2 pivot at step " + std::to_string(k));
        diag_[k] = a;
        diag_[k + 1] = c;
        offdiag_[k] = b;
        two_by_two_[k] = true;
        if (det < 0.0) {
          inertia_.positive += 1;
          inertia_.negative += 1;
        } else {
          (a > 0.0 ? inertia_.positive : inertia_.negative) += 2;
        }
        for (int i = k + 2; i < n_; ++i) {
          const double w1 = w(i, k);
          const double w2 = w(i, k + 1);
          lower_(i, k) = (c * w1 - b * w2) / det;
          lower_(i, k + 1) = (a * w2 - b * w1) / det;
        }
        for (int j = k + 2; j < n_; ++j) {
          const double wj1 = w(j, k);
          const double wj2 = w(j, k + 1);
          if (wj1 == 0.0 && wj2 == 0.0) continue;
          for (int i = k + 2; i < n_; ++i) w(i, j) -= lower_(i, k) * wj1 + lower_(i, k + 1) * wj2;
        }
        k += 2;
      }
    }
  }

  // Symmetric row/column interchange of the working matrix plus the
  // already computed rows of L and the permutation record. `done` is the
  // number of eliminated columns so far.
  void interchange(DenseMatrix& w, int s, int t, int done) {
    if (s == t) return;
    for (int j = 0; j < n_; ++j) std::swap(w(s, j), w(t, j));
    for (int i = 0; i < n_; ++i) std::swap(w(i, s), w(i, t));
    for (int j = 0; j < done; ++j) std::swap(lower_(s, j), lower_(t, j));
    std::swap(perm_[s], perm_[t]);
  }

  void solve_in_place(Vector& x) const {
    Vector z(n_);
    for (int i = 0; i < n_; ++i) z[i] = x[perm_[i]];
    // L y = z
    for (int j = 0; j < n_; ++j) {
      const double zj = z[j];
      if (zj == 0.0) continue;
      for (int i = j + 1; i < n_; ++i) z[i] -= lower_(i, j) * zj;
    }
    // D w = y
    int k = 0;
    while (k < n_) {
      if (two_by_two_[k]) {
        const double a = diag_[k], b = offdiag_[k], c = diag_[k + 1];
        const double det = a * c - b * b;
        const double z1 = z[k], z2 = z[k + 1];
        z[k] = (c * z1 - b * z2) / det;
        z[k + 1] = (a * z2 - b * z1) / det;
        k += 2;
      } else {
        z[k] /= diag_[k];
        ++k;
      }
    }
    // L^T v = w
    for (int j = n_ - 1; j >= 0; --j) {
      double s = z[j];
      for (int i = j + 1; i < n_; ++i) s -= lower_(i, j) * z[i];
      z[j] = s;
    }
    for (int i = 0; i < n_; ++i) x[perm_[i]] = z[i];
  }

  int n_ = 0;
  DenseMatrix lower_;
  std::vector<double> diag_;
  std::vector<double> offdiag_;
  std::vector<bool> two_by_two_;
  std::vector<int> perm_;
  Inertia inertia_;
};

// Dense Cholesky (L L^T) for symmetric positive definite matrices. Throws
// NotPositiveDefiniteError when a pivot drops below the definiteness
// threshold.
class SpdFactor {
 public:
  explicit SpdFactor(const DenseMatrix& a) : n_(a.rows()) {
    if (a.rows() != a.cols()) throw DimensionMismatchError("SpdFactor: matrix must be square");
    factorize(a);
  }
  explicit SpdFactor(const SparseMatrix& m) : SpdFactor(checked_dense(m)) {}

  int dim() const { return n_; }

  Vector solve(std::span<const double> b) const {
    if (static_cast<int>(b.size()) != n_) throw DimensionMismatchError("SpdFactor::solve: rhs length mismatch");
    Vector x(b.begin(), b.end());
    // L y = b
    for (int j = 0; j < n_; ++j) {
      x[j] /= lower_(j, j);
      const double xj = x[j];
      for (int i = j + 1; i < n_; ++i) x[i] -= lower_(i, j) * xj;
    }
    // L^T x = y
    for (int j = n_ - 1; j >= 0; --j) {
      double s = x[j];
      for (int i = j + 1; i < n_; ++i) s -= lower_(i, j) * x[i];
      x[j] = s / lower_(j, j);
    }
    return x;
  }

  DenseMatrix solve(const DenseMatrix& b) const {
    if (b.rows() != n_) throw DimensionMismatchError("SpdFactor::solve: rhs rows mismatch");
    DenseMatrix x(b.rows(), b.cols());
    for (int j = 0; j < b.cols(); ++j) {
      Vector c = solve(b.col(j));
      std::copy(c.begin(), c.end(), x.col(j).begin());
    }
    return x;
  }

 private:
  static DenseMatrix checked_dense(const SparseMatrix& m) {
    if (!m.symmetric()) throw Error("SpdFactor: sparse input must carry the symmetric flag");
    return m.to_dense();
  }

  void factorize(const DenseMatrix& a) {
    double max_diag = 0.0;
    for (int i = 0; i < n_; ++i) max_diag = std::max(max_diag, std::abs(a(i, i)));
    const double tol = kPivotZeroTol * std::max(1.0, max_diag);
    lower_ = DenseMatrix(n_, n_);
    for (int j = 0; j < n_; ++j) {
      double s = a(j, j);
      for (int k = 0; k < j; ++k) s -= lower_(j, k) * lower_(j, k);
      if (s <= tol)
        throw NotPositiveDefiniteError("Cholesky: nonpositive pivot " + std::to_string(s) + " at column " +
                                       std::to_string(j));
      const double ljj = std::sqrt(s);
      lower_(j, j) = ljj;
      for (int i = j + 1; i < n_; ++i) {
        double t = a(i, j);
        for (int k = 0; k < j; ++k) t -= lower_(i, k) * lower_(j, k);
        lower_(i, j) = t / ljj;
      }
    }
  }

  int n_ = 0;
  DenseMatrix lower_;
};

inline SymIndefFactor factorize_sym_indef(const SparseMatrix& m) { return SymIndefFactor(m); }
inline SpdFactor factorize_spd(const SparseMatrix& m) { return SpdFactor(m); }

inline Vector solve_factored(const SymIndefFactor& f, std::span<const double> rhs) { return f.solve(rhs); }
inline Vector solve_factored(const SpdFactor& f, std::span<const double> rhs) { return f.solve(rhs); }
inline DenseMatrix solve_factored(const SymIndefFactor& f, const DenseMatrix& rhs) { return f.solve(rhs); }
inline DenseMatrix solve_factored(const SpdFactor& f, const DenseMatrix& rhs) { return f.solve(rhs); }

}  // namespace blocksolve
