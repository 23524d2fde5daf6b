#pragma once

#include <chrono>
#include <memory>
#include <vector>

#include "blocksolve/admm.hpp"
#include "blocksolve/block_qp.hpp"
#include "blocksolve/kkt.hpp"
#include "blocksolve/report.hpp"

namespace blocksolve {

// Per-partition factorizations of K_{s_i}, the accumulated dense Schur
// complement S = sum B_{s_i}' K_{s_i}^{-1} B_{s_i} and its reduced
// right-hand side. Kept dense: S fills in even for sparse couplings.
struct SchurWorkspace {
  std::vector<std::unique_ptr<SymIndefFactor>> block_factors;
  DenseMatrix schur_complement;  // n_z by n_z
  Vector reduced_rhs;            // n_z
  int factorizations = 0;
};

namespace detail {

// Dense B_{s_i} = [0; 0; B_i] right-hand-side block for one partition;
// all-zero coupling columns are skipped by the caller.
inline DenseMatrix coupling_rhs_block(const Partition& p) {
  const int n = p.num_vars() + p.num_eq() + p.num_link();
  const int y_off = p.num_vars() + p.num_eq();
  DenseMatrix b(n, p.coupling_jac.cols());
  for (int j = 0; j < p.coupling_jac.cols(); ++j)
    for (std::size_t k = 0; k < p.coupling_jac.col_rows(j).size(); ++k)
      b(y_off + p.coupling_jac.col_rows(j)[k], j) = p.coupling_jac.col_values(j)[k];
  return b;
}

inline Vector partition_rhs(const Partition& p) {
  Vector g(p.num_vars() + p.num_eq() + p.num_link(), 0.0);
  for (int j = 0; j < p.num_vars(); ++j) g[j] = -p.cost[j];
  for (int j = 0; j < p.num_eq(); ++j) g[p.num_vars() + j] = p.eq_rhs[j];
  return g;
}

}  // namespace detail

// Factorizes every K_{s_i} and accumulates the Schur complement system.
// Accumulation order over partitions is irrelevant up to roundoff.
inline SchurWorkspace schur_factor(const BlockQp& qp) {
  SchurWorkspace ws;
  const int nz = qp.coupling_dim();
  ws.schur_complement = DenseMatrix(nz, nz);
  ws.reduced_rhs.assign(nz, 0.0);
  for (int i = 0; i < qp.num_partitions(); ++i) {
    const Partition& p = qp.partition(i);
    auto factor = std::make_unique<SymIndefFactor>(detail::schur_block_dense(p));
    ++ws.factorizations;

    const DenseMatrix bsi = detail::coupling_rhs_block(p);
    std::vector<int> active_cols;
    for (int j = 0; j < nz; ++j) {
      bool nonzero = false;
      for (int r = 0; r < bsi.rows() && !nonzero; ++r) nonzero = bsi(r, j) != 0.0;
      if (nonzero) active_cols.push_back(j);
    }
    if (!active_cols.empty()) {
      DenseMatrix rhs(bsi.rows(), static_cast<int>(active_cols.size()));
      for (std::size_t c = 0; c < active_cols.size(); ++c)
        std::copy(bsi.col(active_cols[c]).begin(), bsi.col(active_cols[c]).end(), rhs.col(static_cast<int>(c)).begin());
      const DenseMatrix solved = factor->solve(rhs);
      // S += B_{s_i}' K_{s_i}^{-1} B_{s_i}
      for (std::size_t c = 0; c < active_cols.size(); ++c) {
        const int j = active_cols[c];
        for (int r = 0; r < nz; ++r) {
          double s = 0.0;
          for (int t = 0; t < bsi.rows(); ++t) s += bsi(t, r) * solved(t, static_cast<int>(c));
          ws.schur_complement(r, j) += s;
        }
      }
    }
    const Vector gamma = detail::partition_rhs(p);
    const Vector kinv_gamma = factor->solve(gamma);
    for (int r = 0; r < nz; ++r) {
      double s = 0.0;
      for (int t = 0; t < bsi.rows(); ++t) s += bsi(t, r) * kinv_gamma[t];
      ws.reduced_rhs[r] += s;
    }
    ws.block_factors.push_back(std::move(factor));
  }
  return ws;
}

// Direct structured solve: eliminate every partition block, solve the dense
// coupling system S z = r_sc, then recover partition variables from
// K_{s_i} v_{s_i} = gamma_{s_i} - B_{s_i} z.
inline std::pair<Iterate, SolveReport> schur_solve(const BlockQp& qp, SchurWorkspace* workspace_out = nullptr) {
  const auto t0 = std::chrono::steady_clock::now();
  SchurWorkspace ws = schur_factor(qp);
  const auto t1 = std::chrono::steady_clock::now();

  Vector z;
  if (qp.coupling_dim() > 0) {
    SymIndefFactor schur_factorized(ws.schur_complement);
    ++ws.factorizations;
    z = schur_factorized.solve(ws.reduced_rhs);
  }

  const BlockLayout& lay = qp.layout();
  Iterate result(lay.dim);
  std::copy(z.begin(), z.end(), lay.z(result.u).begin());
  for (int i = 0; i < qp.num_partitions(); ++i) {
    const Partition& p = qp.partition(i);
    Vector rhs = detail::partition_rhs(p);
    if (p.num_link() > 0) {
      const Vector bz = p.coupling_jac.multiply(z);
      const int y_off = p.num_vars() + p.num_eq();
      for (int j = 0; j < p.num_link(); ++j) rhs[y_off + j] -= bz[j];
    }
    const Vector v = ws.block_factors[i]->solve(rhs);
    std::copy(v.begin(), v.begin() + p.num_vars(), lay.x(result.u, i).begin());
    std::copy(v.begin() + p.num_vars(), v.begin() + p.num_vars() + p.num_eq(), lay.lambda(result.u, i).begin());
    std::copy(v.begin() + p.num_vars() + p.num_eq(), v.end(), lay.y(result.u, i).begin());
  }
  const auto t2 = std::chrono::steady_clock::now();

  SolveReport report;
  report.method = "schur";
  report.iterations = 1;
  report.factorizations = ws.factorizations;
  const KktSystem compact = assemble_kkt(qp);
  report.residual_history.push_back(norm2(compact.rhs));
  report.final_residual = compact.residual_norm(result.u);
  report.residual_history.push_back(report.final_residual);
  report.status = SolveStatus::Converged;
  report.t_factor_s = std::chrono::duration<double>(t1 - t0).count();
  report.t_setup_s = report.t_factor_s;
  report.t_iterate_s = std::chrono::duration<double>(t2 - t1).count();
  if (workspace_out) *workspace_out = std::move(ws);
  return {std::move(result), std::move(report)};
}

// Full dense factorization of the compact KKT matrix; the unstructured
// baseline all structured methods are compared against.
inline std::pair<Iterate, SolveReport> direct_solve(const BlockQp& qp) {
  const auto t0 = std::chrono::steady_clock::now();
  const KktSystem compact = assemble_kkt(qp);
  SymIndefFactor factor(compact.matrix);
  const auto t1 = std::chrono::steady_clock::now();
  Iterate result(Vector(factor.solve(compact.rhs)));
  const auto t2 = std::chrono::steady_clock::now();

  SolveReport report;
  report.method = "direct";
  report.iterations = 1;
  report.factorizations = 1;
  report.residual_history.push_back(norm2(compact.rhs));
  report.final_residual = compact.residual_norm(result.u);
  report.residual_history.push_back(report.final_residual);
  report.status = SolveStatus::Converged;
  report.t_factor_s = std::chrono::duration<double>(t1 - t0).count();
  report.t_setup_s = report.t_factor_s;
  report.t_iterate_s = std::chrono::duration<double>(t2 - t1).count();
  return {std::move(result), std::move(report)};
}

}  // namespace blocksolve
