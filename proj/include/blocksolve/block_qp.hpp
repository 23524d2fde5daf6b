#pragma once

#include <span>
#include <string>
#include <vector>

#include "blocksolve/factorization.hpp"
#include "blocksolve/sparse.hpp"

namespace blocksolve {

// One variable partition of the block-structured QP:
//   min  1/2 x' hessian x + cost' x
//   s.t. eq_jac x = eq_rhs                 (multipliers lambda)
//        link_jac x + coupling_jac z = 0   (multipliers y)
struct Partition {
  SparseMatrix hessian;       // n_x by n_x, symmetric
  Vector cost;                // n_x
  SparseMatrix eq_jac;        // m by n_x, m may be 0
  Vector eq_rhs;              // m
  SparseMatrix link_jac;      // l by n_x
  SparseMatrix coupling_jac;  // l by n_z

  int num_vars() const { return hessian.rows(); }
  int num_eq() const { return eq_jac.rows(); }
  int num_link() const { return link_jac.rows(); }
};

// Offsets of each block of the stacked primal-dual point
// u = (x_1, lambda_1, ..., x_P, lambda_P, z, y_1, ..., y_P).
struct BlockLayout {
  std::vector<int> x_offset;
  std::vector<int> lambda_offset;
  std::vector<int> y_offset;
  std::vector<int> nx;
  std::vector<int> neq;
  std::vector<int> nlink;
  int z_offset = 0;
  int nz = 0;
  int dim = 0;

  std::span<double> x(Vector& u, int i) const { return {u.data() + x_offset[i], static_cast<std::size_t>(nx[i])}; }
  std::span<const double> x(const Vector& u, int i) const {
    return {u.data() + x_offset[i], static_cast<std::size_t>(nx[i])};
  }
  std::span<double> lambda(Vector& u, int i) const {
    return {u.data() + lambda_offset[i], static_cast<std::size_t>(neq[i])};
  }
  std::span<const double> lambda(const Vector& u, int i) const {
    return {u.data() + lambda_offset[i], static_cast<std::size_t>(neq[i])};
  }
  std::span<double> z(Vector& u) const { return {u.data() + z_offset, static_cast<std::size_t>(nz)}; }
  std::span<const double> z(const Vector& u) const { return {u.data() + z_offset, static_cast<std::size_t>(nz)}; }
  std::span<double> y(Vector& u, int i) const { return {u.data() + y_offset[i], static_cast<std::size_t>(nlink[i])}; }
  std::span<const double> y(const Vector& u, int i) const {
    return {u.data() + y_offset[i], static_cast<std::size_t>(nlink[i])};
  }
};

// The partitioned problem data plus the coupling dimension. Immutable after
// construction; all assembly operations are pure functions of it.
class BlockQp {
 public:
  BlockQp(std::vector<Partition> partitions, int coupling_dim)
      : partitions_(std::move(partitions)), coupling_dim_(coupling_dim) {
    if (coupling_dim_ < 0) throw DimensionMismatchError("BlockQp: negative coupling dimension");
    if (partitions_.empty()) throw DimensionMismatchError("BlockQp: at least one partition required");
    for (std::size_t i = 0; i < partitions_.size(); ++i) check_partition(partitions_[i], static_cast<int>(i));
    build_layout();
  }

  int num_partitions() const { return static_cast<int>(partitions_.size()); }
  const Partition& partition(int i) const { return partitions_[i]; }
  int coupling_dim() const { return coupling_dim_; }
  const BlockLayout& layout() const { return layout_; }

  // n = n_z + sum n_{x_i}
  int num_primal() const {
    int n = coupling_dim_;
    for (const Partition& p : partitions_) n += p.num_vars();
    return n;
  }
  // m = sum m_i
  int num_eq() const {
    int m = 0;
    for (const Partition& p : partitions_) m += p.num_eq();
    return m;
  }
  // l = sum l_i
  int num_link() const {
    int l = 0;
    for (const Partition& p : partitions_) l += p.num_link();
    return l;
  }
  int kkt_dim() const { return num_primal() + num_eq() + num_link(); }

 private:
  void check_partition(const Partition& p, int i) const {
    const std::string tag = "partition " + std::to_string(i) + ": ";
    if (!p.hessian.symmetric()) throw DimensionMismatchError(tag + "hessian must be symmetric-marked");
    const int nx = p.hessian.rows();
    if (static_cast<int>(p.cost.size()) != nx) throw DimensionMismatchError(tag + "cost length mismatch");
    if (p.eq_jac.cols() != nx) throw DimensionMismatchError(tag + "eq_jac column mismatch");
    if (static_cast<int>(p.eq_rhs.size()) != p.eq_jac.rows())
      throw DimensionMismatchError(tag + "eq_rhs length mismatch");
    if (p.link_jac.cols() != nx) throw DimensionMismatchError(tag + "link_jac column mismatch");
    if (p.coupling_jac.rows() != p.link_jac.rows())
      throw DimensionMismatchError(tag + "coupling_jac row count must match link_jac");
    if (p.coupling_jac.cols() != coupling_dim_)
      throw DimensionMismatchError(tag + "coupling_jac must have n_z columns");
    if (!p.hessian.finalized() || !p.eq_jac.finalized() || !p.link_jac.finalized() || !p.coupling_jac.finalized())
      throw Error(tag + "matrices must be finalized");
  }

  void build_layout() {
    const int np = num_partitions();
    layout_.x_offset.resize(np);
    layout_.lambda_offset.resize(np);
    layout_.y_offset.resize(np);
    layout_.nx.resize(np);
    layout_.neq.resize(np);
    layout_.nlink.resize(np);
    int off = 0;
    for (int i = 0; i < np; ++i) {
      const Partition& p = partitions_[i];
      layout_.x_offset[i] = off;
      layout_.nx[i] = p.num_vars();
      off += p.num_vars();
      layout_.lambda_offset[i] = off;
      layout_.neq[i] = p.num_eq();
      off += p.num_eq();
    }
    layout_.z_offset = off;
    layout_.nz = coupling_dim_;
    off += coupling_dim_;
    for (int i = 0; i < np; ++i) {
      layout_.y_offset[i] = off;
      layout_.nlink[i] = partitions_[i].num_link();
      off += partitions_[i].num_link();
    }
    layout_.dim = off;
  }

  std::vector<Partition> partitions_;
  int coupling_dim_ = 0;
  BlockLayout layout_;
};

// Stacked primal-dual point in the compact ordering of the owning BlockQp.
struct Iterate {
  Vector u;

  explicit Iterate(int dim = 0) : u(dim, 0.0) {}
  explicit Iterate(Vector values) : u(std::move(values)) {}
  int dim() const { return static_cast<int>(u.size()); }
};

inline Iterate zero_iterate(const BlockQp& qp) { return Iterate(qp.layout().dim); }

struct ValidationReport {
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

namespace detail {

// D_i + rho * A_i' A_i, densified; shared by ADMM setup, regularized KKT
// assembly and the dense splitting so their entries coincide exactly.
inline DenseMatrix regularized_hessian_dense(const Partition& p, double rho) {
  DenseMatrix d = p.hessian.to_dense();
  if (rho != 0.0 && p.num_link() > 0) {
    const DenseMatrix ata = atb_dense(p.link_jac, p.link_jac);
    for (int j = 0; j < d.cols(); ++j)
      for (int i = 0; i < d.rows(); ++i) d(i, j) += rho * ata(i, j);
  }
  return d;
}

// Dense [D J' A'; J 0 0; A 0 0] block for one partition.
inline DenseMatrix schur_block_dense(const Partition& p) {
  const int nx = p.num_vars(), m = p.num_eq(), l = p.num_link();
  const int n = nx + m + l;
  DenseMatrix k(n, n);
  const DenseMatrix d = p.hessian.to_dense();
  for (int j = 0; j < nx; ++j)
    for (int i = 0; i < nx; ++i) k(i, j) = d(i, j);
  for (int j = 0; j < nx; ++j) {
    for (std::size_t t = 0; t < p.eq_jac.col_rows(j).size(); ++t) {
      const int r = p.eq_jac.col_rows(j)[t];
      const double v = p.eq_jac.col_values(j)[t];
      k(nx + r, j) = v;
      k(j, nx + r) = v;
    }
    for (std::size_t t = 0; t < p.link_jac.col_rows(j).size(); ++t) {
      const int r = p.link_jac.col_rows(j)[t];
      const double v = p.link_jac.col_values(j)[t];
      k(nx + m + r, j) = v;
      k(j, nx + m + r) = v;
    }
  }
  return k;
}

}  // namespace detail

// Checks the blanket assumptions: every partition Hessian positive definite,
// every per-partition saddle block K_s nonsingular (stacked constraint
// Jacobian full row rank), and the stacked coupling matrix full column rank.
inline ValidationReport validate(const BlockQp& qp) {
  ValidationReport report;
  for (int i = 0; i < qp.num_partitions(); ++i) {
    const Partition& p = qp.partition(i);
    try {
      SpdFactor check(p.hessian);
    } catch (const NotPositiveDefiniteError&) {
      report.failures.push_back("partition " + std::to_string(i) + ": D not positive definite");
      continue;
    }
    try {
      SymIndefFactor check(detail::schur_block_dense(p));
    } catch (const SingularMatrixError&) {
      report.failures.push_back("partition " + std::to_string(i) +
                                ": stacked [J; A] rank deficient (K_s singular)");
    }
  }
  if (qp.coupling_dim() > 0) {
    DenseMatrix gram(qp.coupling_dim(), qp.coupling_dim());
    for (int i = 0; i < qp.num_partitions(); ++i) {
      if (qp.partition(i).num_link() == 0) continue;
      const DenseMatrix btb = atb_dense(qp.partition(i).coupling_jac, qp.partition(i).coupling_jac);
      for (int j = 0; j < gram.cols(); ++j)
        for (int r = 0; r < gram.rows(); ++r) gram(r, j) += btb(r, j);
    }
    try {
      SpdFactor check(gram);
    } catch (const NotPositiveDefiniteError&) {
      report.failures.push_back("B rank deficient (sum of B_i' B_i not positive definite)");
    }
  }
  return report;
}

}  // namespace blocksolve
