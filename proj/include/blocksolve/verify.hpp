#pragma once

#include <algorithm>
#include <cstdint>
#include <string>

#include "blocksolve/admm.hpp"
#include "blocksolve/precond.hpp"
#include "blocksolve/rng.hpp"
#include "blocksolve/splitting.hpp"

namespace blocksolve {

// General random instance with dense SPD Hessians and unstructured full-rank
// coupling blocks; exercises paths the structured generators (selection A,
// B = -I) never hit. Dimensions stay small enough for the dense splitting.
inline BlockQp random_block_qp(std::uint64_t seed, int partitions, int max_vars, int coupling_dim) {
  if (partitions < 1 || coupling_dim < 0) throw InvalidSpecError("random_block_qp: bad dimensions");
  std::vector<Partition> parts;
  for (int i = 0; i < partitions; ++i) {
    const std::string tag = "instance." + std::to_string(i);
    PhiloxStream dims(seed, tag + ".dims");
    const int min_vars = coupling_dim + 3;
    const int nx = min_vars + static_cast<int>(dims.next_u64() % static_cast<std::uint64_t>(
                                                   std::max(1, max_vars - min_vars + 1)));
    const int m = static_cast<int>(dims.next_u64() % 3);  // 0..2 inner equalities

    Partition p;
    PhiloxStream hess(seed, tag + ".hessian");
    DenseMatrix x(nx, nx);
    for (int c = 0; c < nx; ++c)
      for (int r = 0; r < nx; ++r) x(r, c) = hess.next_normal();
    const double shift = 0.5 + hess.next_uniform();
    p.hessian = SparseMatrix(nx, nx, true);
    for (int c = 0; c < nx; ++c)
      for (int r = c; r < nx; ++r) {
        double v = 0.0;
        for (int k = 0; k < nx; ++k) v += x(k, r) * x(k, c);
        v /= nx;
        if (r == c) v += shift;
        p.hessian.add(r, c, v);
      }
    p.hessian.finalize();

    PhiloxStream lin(seed, tag + ".cost");
    p.cost.resize(nx);
    for (double& v : p.cost) v = lin.next_normal();

    PhiloxStream eq(seed, tag + ".eq");
    p.eq_jac = SparseMatrix(m, nx);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < nx; ++c) p.eq_jac.add(r, c, eq.next_normal());
    p.eq_jac.finalize();
    p.eq_rhs.resize(m);
    for (double& v : p.eq_rhs) v = eq.next_normal();

    PhiloxStream link(seed, tag + ".link");
    p.link_jac = SparseMatrix(coupling_dim, nx);
    for (int r = 0; r < coupling_dim; ++r)
      for (int c = 0; c < nx; ++c) p.link_jac.add(r, c, link.next_normal());
    p.link_jac.finalize();

    PhiloxStream coup(seed, tag + ".coupling");
    p.coupling_jac = SparseMatrix(coupling_dim, coupling_dim);
    for (int r = 0; r < coupling_dim; ++r)
      for (int c = 0; c < coupling_dim; ++c) {
        double v = coup.next_normal();
        if (r == c) v += 3.0;  // keeps each B_i nonsingular
        p.coupling_jac.add(r, c, v);
      }
    p.coupling_jac.finalize();
    parts.push_back(std::move(p));
  }
  return BlockQp(std::move(parts), coupling_dim);
}

inline Iterate random_iterate(const BlockQp& qp, std::uint64_t seed, const std::string& label) {
  PhiloxStream rng(seed, label);
  Iterate it(qp.layout().dim);
  for (double& v : it.u) v = rng.next_normal();
  return it;
}

// Numerical embodiment of the update-equivalence derivation: one alternating
// sweep must match the dense Richardson step, and the matrix-free
// preconditioned matvec must match (I - G) h.
struct EquivalenceCheck {
  double max_step_mismatch = 0.0;        // ||admm_step(u) - M^{-1}(N u + r)|| / (1 + ||u||)
  double max_matvec_mismatch = 0.0;      // ||apply(h) - (I - G) h|| / (1 + ||(I - G) h||)
  double max_splitting_defect = 0.0;     // max entry of |(M - N) - H_rho|
  double spectral_radius = 0.0;
};

inline EquivalenceCheck check_splitting_equivalence(const BlockQp& qp, double rho, int probes, std::uint64_t seed) {
  const DenseSplitting split = build_dense_splitting(qp, rho);
  const AdmmFactors factors(qp, rho);
  const TRhoOperator trho(qp, factors, 1);
  EquivalenceCheck out;

  const DenseMatrix h_rho = assemble_regularized_kkt(qp, rho).matrix.to_dense();
  for (int j = 0; j < h_rho.cols(); ++j)
    for (int i = 0; i < h_rho.rows(); ++i)
      out.max_splitting_defect = std::max(out.max_splitting_defect,
                                          std::abs(split.m()(i, j) - split.n()(i, j) - h_rho(i, j)));

  for (int k = 0; k < probes; ++k) {
    const Iterate u = random_iterate(qp, seed, "equivalence.u." + std::to_string(k));
    const Iterate stepped = admm_step(qp, factors, u);
    const Vector oracle = split.richardson_step(u.u);
    double diff = 0.0;
    for (int i = 0; i < qp.layout().dim; ++i) diff += (stepped.u[i] - oracle[i]) * (stepped.u[i] - oracle[i]);
    out.max_step_mismatch = std::max(out.max_step_mismatch, std::sqrt(diff) / (1.0 + norm2(u.u)));

    const Iterate h = random_iterate(qp, seed, "equivalence.h." + std::to_string(k));
    const Vector mine = trho.apply(h.u);
    const Vector dense = split.apply_i_minus_g(h.u);
    double mdiff = 0.0;
    for (int i = 0; i < qp.layout().dim; ++i) mdiff += (mine[i] - dense[i]) * (mine[i] - dense[i]);
    out.max_matvec_mismatch = std::max(out.max_matvec_mismatch, std::sqrt(mdiff) / (1.0 + norm2(dense)));
  }
  out.spectral_radius = split.spectral_radius();
  return out;
}

}  // namespace blocksolve
