#pragma once

#include <chrono>
#include <memory>

#include "blocksolve/block_qp.hpp"
#include "blocksolve/kkt.hpp"
#include "blocksolve/report.hpp"

namespace blocksolve {

namespace detail {
inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}
}  // namespace detail

// Cached factorizations for repeated ADMM sweeps at a fixed penalty: the
// per-partition blocks [D_i + rho A_i'A_i, J_i'; J_i, 0] and the coupling
// Gram matrix sum B_i'B_i. Setup happens exactly once per rho.
class AdmmFactors {
 public:
  AdmmFactors(const BlockQp& qp, double rho) : qp_(&qp), rho_(rho) {
    if (rho <= 0.0) throw Error("AdmmFactors: rho must be positive");
    partition_blocks_.reserve(qp.num_partitions());
    partition_factors_.reserve(qp.num_partitions());
    for (int i = 0; i < qp.num_partitions(); ++i) {
      const Partition& p = qp.partition(i);
      const int nx = p.num_vars(), m = p.num_eq();
      DenseMatrix k(nx + m, nx + m);
      const DenseMatrix top = detail::regularized_hessian_dense(p, rho);
      for (int j = 0; j < nx; ++j)
        for (int r = 0; r < nx; ++r) k(r, j) = top(r, j);
      for (int j = 0; j < nx; ++j)
        for (std::size_t t = 0; t < p.eq_jac.col_rows(j).size(); ++t) {
          const int r = p.eq_jac.col_rows(j)[t];
          const double v = p.eq_jac.col_values(j)[t];
          k(nx + r, j) = v;
          k(j, nx + r) = v;
        }
      partition_blocks_.push_back(k);
      partition_factors_.push_back(std::make_unique<SymIndefFactor>(std::move(k)));
    }
    coupling_gram_ = DenseMatrix(qp.coupling_dim(), qp.coupling_dim());
    for (int i = 0; i < qp.num_partitions(); ++i) {
      if (qp.partition(i).num_link() == 0) continue;
      const DenseMatrix btb = atb_dense(qp.partition(i).coupling_jac, qp.partition(i).coupling_jac);
      for (int j = 0; j < coupling_gram_.cols(); ++j)
        for (int r = 0; r < coupling_gram_.rows(); ++r) coupling_gram_(r, j) += btb(r, j);
    }
    coupling_factor_ = std::make_unique<SpdFactor>(coupling_gram_);
  }

  const BlockQp& qp() const { return *qp_; }
  double rho() const { return rho_; }
  int factorization_count() const { return qp_->num_partitions() + 1; }

  // Dense K_{rho_i} and sum B_i'B_i, exposed for verification.
  const DenseMatrix& partition_matrix(int i) const { return partition_blocks_[i]; }
  const DenseMatrix& coupling_gram() const { return coupling_gram_; }

  const SymIndefFactor& partition_factor(int i) const { return *partition_factors_[i]; }
  const SpdFactor& coupling_factor() const { return *coupling_factor_; }

 private:
  const BlockQp* qp_;
  double rho_;
  std::vector<DenseMatrix> partition_blocks_;
  std::vector<std::unique_ptr<SymIndefFactor>> partition_factors_;
  DenseMatrix coupling_gram_;
  std::unique_ptr<SpdFactor> coupling_factor_;
};

inline AdmmFactors admm_setup(const BlockQp& qp, double rho) { return AdmmFactors(qp, rho); }

struct AdmmSettings {
  double rho = 1.0;
  int max_iterations = 2000;
  double tolerance = 1e-8;
  bool record_history = true;
};

// One alternating sweep u -> T_rho(u):
//   1. per partition solve K_{rho_i} (x,lambda) = (-c_i - rho A_i'B_i z - A_i'y_i, b_i)
//   2. z  = -(B'B)^{-1} (B'A x + (1/rho) B'y)
//   3. y_i = y_i + rho (A_i x_i + B_i z)
// The sweep coincides with the Richardson step of the splitting
// H_rho = M_rho - N_rho, which is what the verification suite checks.
inline Iterate admm_step(const BlockQp& qp, const AdmmFactors& factors, const Iterate& it) {
  const BlockLayout& lay = qp.layout();
  if (it.dim() != lay.dim) throw DimensionMismatchError("admm_step: iterate length mismatch");
  const double rho = factors.rho();
  Iterate next(lay.dim);

  for (int i = 0; i < qp.num_partitions(); ++i) {
    const Partition& p = qp.partition(i);
    const int nx = p.num_vars(), m = p.num_eq();
    Vector rhs(nx + m, 0.0);
    Vector bz = p.coupling_jac.multiply(lay.z(it.u));
    Vector at_bz = p.link_jac.multiply(bz, /*transpose=*/true);
    Vector at_y = p.link_jac.multiply(lay.y(it.u, i), /*transpose=*/true);
    for (int j = 0; j < nx; ++j) rhs[j] = -p.cost[j] - rho * at_bz[j] - at_y[j];
    for (int j = 0; j < m; ++j) rhs[nx + j] = p.eq_rhs[j];
    const Vector sol = factors.partition_factor(i).solve(rhs);
    std::copy(sol.begin(), sol.begin() + nx, lay.x(next.u, i).begin());
    std::copy(sol.begin() + nx, sol.end(), lay.lambda(next.u, i).begin());
  }

  if (qp.coupling_dim() > 0) {
    Vector zrhs(qp.coupling_dim(), 0.0);
    for (int i = 0; i < qp.num_partitions(); ++i) {
      const Partition& p = qp.partition(i);
      if (p.num_link() == 0) continue;
      Vector ax = p.link_jac.multiply(lay.x(next.u, i));  // A_i x_i^+
      Vector bt_ax = p.coupling_jac.multiply(ax, /*transpose=*/true);
      Vector bt_y = p.coupling_jac.multiply(lay.y(it.u, i), /*transpose=*/true);
      for (int j = 0; j < qp.coupling_dim(); ++j) zrhs[j] += bt_ax[j] + bt_y[j] / rho;
    }
    Vector znew = factors.coupling_factor().solve(zrhs);
    auto zspan = lay.z(next.u);
    for (int j = 0; j < qp.coupling_dim(); ++j) zspan[j] = -znew[j];
  }

  for (int i = 0; i < qp.num_partitions(); ++i) {
    const Partition& p = qp.partition(i);
    if (p.num_link() == 0) continue;
    Vector ax = p.link_jac.multiply(lay.x(next.u, i));
    Vector bz = p.coupling_jac.multiply(lay.z(next.u));
    auto yold = lay.y(it.u, i);
    auto ynew = lay.y(next.u, i);
    for (int j = 0; j < p.num_link(); ++j) ynew[j] = yold[j] + rho * (ax[j] + bz[j]);
  }
  return next;
}

// Alternating sweeps until both stopping norms fall below the tolerance:
// the stacked dual change ||y+ - y|| and the coupling-shift norm
// sqrt(sum_i ||rho A_i'B_i (z+ - z)||^2). Non-convergence is a status.
inline std::pair<Iterate, SolveReport> admm_solve(const BlockQp& qp, const AdmmSettings& settings,
                                                  const Iterate& start) {
  if (settings.rho <= 0.0 || settings.tolerance <= 0.0 || settings.max_iterations < 1)
    throw Error("admm_solve: settings require rho > 0, tolerance > 0, max_iterations >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  const AdmmFactors factors(qp, settings.rho);
  const KktSystem compact = assemble_kkt(qp);
  const auto t1 = std::chrono::steady_clock::now();

  SolveReport report;
  report.method = "admm";
  report.rho = settings.rho;
  report.factorizations = factors.factorization_count();
  report.status = SolveStatus::MaxIterations;
  report.residual_history.push_back(compact.residual_norm(start.u));

  const BlockLayout& lay = qp.layout();
  Iterate current = start;
  for (int k = 0; k < settings.max_iterations; ++k) {
    Iterate next = admm_step(qp, factors, current);
    double dual_change_sq = 0.0;
    for (int i = 0; i < qp.num_partitions(); ++i) {
      auto yo = lay.y(current.u, i);
      auto yn = lay.y(next.u, i);
      for (std::size_t j = 0; j < yo.size(); ++j) dual_change_sq += (yn[j] - yo[j]) * (yn[j] - yo[j]);
    }
    Vector dz(qp.coupling_dim());
    {
      auto zo = lay.z(current.u);
      auto zn = lay.z(next.u);
      for (int j = 0; j < qp.coupling_dim(); ++j) dz[j] = zn[j] - zo[j];
    }
    double coupling_shift_sq = 0.0;
    for (int i = 0; i < qp.num_partitions(); ++i) {
      const Partition& p = qp.partition(i);
      if (p.num_link() == 0) continue;
      Vector bdz = p.coupling_jac.multiply(dz);
      Vector at_bdz = p.link_jac.multiply(bdz, /*transpose=*/true);
      for (double v : at_bdz) coupling_shift_sq += settings.rho * settings.rho * v * v;
    }
    current = std::move(next);
    report.iterations = k + 1;
    if (settings.record_history || k + 1 == settings.max_iterations)
      report.residual_history.push_back(compact.residual_norm(current.u));
    if (std::sqrt(dual_change_sq) <= settings.tolerance && std::sqrt(coupling_shift_sq) <= settings.tolerance) {
      report.status = SolveStatus::Converged;
      break;
    }
  }
  if (!settings.record_history) {
    const double final_res = compact.residual_norm(current.u);
    report.residual_history.resize(1);
    report.residual_history.push_back(final_res);
  } else if (static_cast<int>(report.residual_history.size()) != report.iterations + 1) {
    report.residual_history.push_back(compact.residual_norm(current.u));
  }
  report.final_residual = compact.residual_norm(current.u);
  report.t_setup_s = std::chrono::duration<double>(t1 - t0).count();
  report.t_factor_s = report.t_setup_s;
  report.t_iterate_s = detail::seconds_since(t1);
  return {std::move(current), std::move(report)};
}

inline std::pair<Iterate, SolveReport> admm_solve(const BlockQp& qp, const AdmmSettings& settings) {
  return admm_solve(qp, settings, zero_iterate(qp));
}

}  // namespace blocksolve
