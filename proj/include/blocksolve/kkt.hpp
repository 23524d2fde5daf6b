#pragma once

#include <vector>

#include "blocksolve/block_qp.hpp"

namespace blocksolve {

enum class KktOrdering { Compact, SchurPermuted, Regularized };

// Assembled first-order optimality system H u = r (or the regularized
// H_rho u = r). The coefficient matrix is stored lower-triangle symmetric;
// the right-hand side is identical for all orderings of the same problem.
struct KktSystem {
  SparseMatrix matrix;
  Vector rhs;
  KktOrdering ordering = KktOrdering::Compact;
  double rho = 0.0;

  double residual_norm(const Vector& u) const {
    if (u.size() != rhs.size()) throw DimensionMismatchError("KktSystem::residual_norm: iterate length mismatch");
    Vector hu = matrix.multiply(u);
    for (std::size_t i = 0; i < hu.size(); ++i) hu[i] -= rhs[i];
    return norm2(hu);
  }
};

namespace detail {

inline void add_lower_dense(SparseMatrix& h, const DenseMatrix& block, int row_off, int col_off, double scale = 1.0) {
  for (int j = 0; j < block.cols(); ++j)
    for (int i = 0; i < block.rows(); ++i) {
      const double v = scale * block(i, j);
      if (v != 0.0 && row_off + i >= col_off + j) h.add(row_off + i, col_off + j, v);
    }
}

inline void add_sparse_at(SparseMatrix& h, const SparseMatrix& block, int row_off, int col_off, double scale = 1.0) {
  for (int j = 0; j < block.cols(); ++j)
    for (std::size_t k = 0; k < block.col_rows(j).size(); ++k)
      h.add(row_off + block.col_rows(j)[k], col_off + j, scale * block.col_values(j)[k]);
}

inline Vector assemble_rhs(const BlockQp& qp) {
  const BlockLayout& lay = qp.layout();
  Vector r(lay.dim, 0.0);
  for (int i = 0; i < qp.num_partitions(); ++i) {
    const Partition& p = qp.partition(i);
    for (int j = 0; j < p.num_vars(); ++j) r[lay.x_offset[i] + j] = -p.cost[j];
    for (int j = 0; j < p.num_eq(); ++j) r[lay.lambda_offset[i] + j] = p.eq_rhs[j];
  }
  return r;
}

}  // namespace detail

// Compact ordering (x_1, lambda_1, ..., z, y_1, ..., y_P):
//   [ K   0   A' ] [v]   [gamma]
//   [ 0   0   B' ] [z] = [  0  ]
//   [ A   B   0  ] [y]   [  0  ]
// with K = blkdiag{[D_i J_i'; J_i 0]} and gamma_i = (-c_i, b_i).
inline KktSystem assemble_kkt(const BlockQp& qp) {
  const BlockLayout& lay = qp.layout();
  SparseMatrix h(lay.dim, lay.dim, true);
  for (int i = 0; i < qp.num_partitions(); ++i) {
    const Partition& p = qp.partition(i);
    detail::add_sparse_at(h, p.hessian, lay.x_offset[i], lay.x_offset[i]);
    detail::add_sparse_at(h, p.eq_jac, lay.lambda_offset[i], lay.x_offset[i]);
    detail::add_sparse_at(h, p.link_jac, lay.y_offset[i], lay.x_offset[i]);
    detail::add_sparse_at(h, p.coupling_jac, lay.y_offset[i], lay.z_offset);
  }
  h.finalize();
  return {std::move(h), detail::assemble_rhs(qp), KktOrdering::Compact, 0.0};
}

// Regularized system H_rho with the same right-hand side:
//   [ K_rho      rho A'B   A' ]
//   [ rho B'A    rho B'B   B' ]
//   [ A          B         0  ]
// where K_rho has partition blocks [D_i + rho A_i'A_i, J_i'; J_i, 0].
// rho = 0 reproduces the compact system structurally.
inline KktSystem assemble_regularized_kkt(const BlockQp& qp, double rho) {
  if (rho < 0.0) throw Error("assemble_regularized_kkt: rho must be nonnegative");
  const BlockLayout& lay = qp.layout();
  SparseMatrix h(lay.dim, lay.dim, true);
  DenseMatrix coupling_gram(lay.nz, lay.nz);
  for (int i = 0; i < qp.num_partitions(); ++i) {
    const Partition& p = qp.partition(i);
    detail::add_lower_dense(h, detail::regularized_hessian_dense(p, rho), lay.x_offset[i], lay.x_offset[i]);
    detail::add_sparse_at(h, p.eq_jac, lay.lambda_offset[i], lay.x_offset[i]);
    detail::add_sparse_at(h, p.link_jac, lay.y_offset[i], lay.x_offset[i]);
    detail::add_sparse_at(h, p.coupling_jac, lay.y_offset[i], lay.z_offset);
    if (rho != 0.0 && p.num_link() > 0) {
      // rho B'A occupies the (z, x_i) block of the lower triangle.
      const DenseMatrix bta = atb_dense(p.coupling_jac, p.link_jac);
      detail::add_lower_dense(h, bta, lay.z_offset, lay.x_offset[i], rho);
      const DenseMatrix btb = atb_dense(p.coupling_jac, p.coupling_jac);
      for (int j = 0; j < lay.nz; ++j)
        for (int r = 0; r < lay.nz; ++r) coupling_gram(r, j) += btb(r, j);
    }
  }
  if (rho != 0.0) detail::add_lower_dense(h, coupling_gram, lay.z_offset, lay.z_offset, rho);
  h.finalize();
  return {std::move(h), detail::assemble_rhs(qp), KktOrdering::Regularized, rho};
}

// Permuted ordering (x_1, lambda_1, y_1, ..., x_P, lambda_P, y_P, z) used by
// Schur decomposition, plus the index map back to the compact ordering:
// to_compact[permuted index] = compact index.
struct SchurPermutedSystem {
  KktSystem system;
  std::vector<int> to_compact;
};

inline SchurPermutedSystem assemble_schur_permuted(const BlockQp& qp) {
  const BlockLayout& lay = qp.layout();
  std::vector<int> to_compact(lay.dim);
  int pos = 0;
  for (int i = 0; i < qp.num_partitions(); ++i) {
    for (int j = 0; j < lay.nx[i]; ++j) to_compact[pos++] = lay.x_offset[i] + j;
    for (int j = 0; j < lay.neq[i]; ++j) to_compact[pos++] = lay.lambda_offset[i] + j;
    for (int j = 0; j < lay.nlink[i]; ++j) to_compact[pos++] = lay.y_offset[i] + j;
  }
  for (int j = 0; j < lay.nz; ++j) to_compact[pos++] = lay.z_offset + j;

  SparseMatrix h(lay.dim, lay.dim, true);
  Vector rhs(lay.dim, 0.0);
  int off = 0;
  const int z_off = lay.dim - lay.nz;
  for (int i = 0; i < qp.num_partitions(); ++i) {
    const Partition& p = qp.partition(i);
    const int nx = p.num_vars(), m = p.num_eq(), l = p.num_link();
    detail::add_sparse_at(h, p.hessian, off, off);
    detail::add_sparse_at(h, p.eq_jac, off + nx, off);
    detail::add_sparse_at(h, p.link_jac, off + nx + m, off);
    // B_{s_i} = [0; 0; B_i] lands in the z columns; z is ordered last so the
    // block belongs to the lower triangle as (z row, y column) mirror.
    for (int j = 0; j < p.coupling_jac.cols(); ++j)
      for (std::size_t k = 0; k < p.coupling_jac.col_rows(j).size(); ++k)
        h.add(z_off + j, off + nx + m + p.coupling_jac.col_rows(j)[k], p.coupling_jac.col_values(j)[k]);
    for (int j = 0; j < nx; ++j) rhs[off + j] = -p.cost[j];
    for (int j = 0; j < m; ++j) rhs[off + nx + j] = p.eq_rhs[j];
    off += nx + m + l;
  }
  h.finalize();
  return {{std::move(h), std::move(rhs), KktOrdering::SchurPermuted, 0.0}, std::move(to_compact)};
}

// ||H u - r|| in the 2-norm against the compact, unregularized system; this
// is the convergence measure every solver reports.
inline double kkt_residual(const BlockQp& qp, const Iterate& it) {
  return assemble_kkt(qp).residual_norm(it.u);
}

}  // namespace blocksolve
