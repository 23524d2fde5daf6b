#pragma once

// Dense Eigen-based oracles, independent of the library's factorization and
// assembly paths.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "blocksolve/block_qp.hpp"
#include "blocksolve/rng.hpp"
#include "blocksolve/sparse.hpp"

namespace oracle {

inline Eigen::MatrixXd to_eigen(const blocksolve::DenseMatrix& m) {
  return Eigen::Map<const Eigen::MatrixXd>(m.data(), m.rows(), m.cols());
}

inline Eigen::MatrixXd to_eigen(const blocksolve::SparseMatrix& m) { return to_eigen(m.to_dense()); }

inline Eigen::VectorXd to_eigen(const blocksolve::Vector& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline blocksolve::Vector from_eigen(const Eigen::VectorXd& v) {
  return blocksolve::Vector(v.data(), v.data() + v.size());
}

inline blocksolve::Vector dense_solve(const Eigen::MatrixXd& a, const blocksolve::Vector& b) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  return from_eigen(lu.solve(to_eigen(b)).eval());
}

// Straightforward dense assembly of the compact KKT matrix directly from the
// block layout; deliberately separate from the library's sparse assembly.
inline Eigen::MatrixXd dense_kkt(const blocksolve::BlockQp& qp) {
  const auto& lay = qp.layout();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(lay.dim, lay.dim);
  for (int i = 0; i < qp.num_partitions(); ++i) {
    const auto& p = qp.partition(i);
    const Eigen::MatrixXd d = to_eigen(p.hessian);
    const Eigen::MatrixXd j = to_eigen(p.eq_jac);
    const Eigen::MatrixXd a = to_eigen(p.link_jac);
    const Eigen::MatrixXd b = to_eigen(p.coupling_jac);
    h.block(lay.x_offset[i], lay.x_offset[i], d.rows(), d.cols()) = d;
    h.block(lay.lambda_offset[i], lay.x_offset[i], j.rows(), j.cols()) = j;
    h.block(lay.x_offset[i], lay.lambda_offset[i], j.cols(), j.rows()) = j.transpose();
    h.block(lay.y_offset[i], lay.x_offset[i], a.rows(), a.cols()) = a;
    h.block(lay.x_offset[i], lay.y_offset[i], a.cols(), a.rows()) = a.transpose();
    h.block(lay.y_offset[i], lay.z_offset, b.rows(), b.cols()) = b;
    h.block(lay.z_offset, lay.y_offset[i], b.cols(), b.rows()) = b.transpose();
  }
  return h;
}

inline blocksolve::Vector dense_kkt_rhs(const blocksolve::BlockQp& qp) {
  const auto& lay = qp.layout();
  blocksolve::Vector r(lay.dim, 0.0);
  for (int i = 0; i < qp.num_partitions(); ++i) {
    const auto& p = qp.partition(i);
    for (int j = 0; j < p.num_vars(); ++j) r[lay.x_offset[i] + j] = -p.cost[j];
    for (int j = 0; j < p.num_eq(); ++j) r[lay.lambda_offset[i] + j] = p.eq_rhs[j];
  }
  return r;
}

inline blocksolve::Vector random_vector(int n, std::uint64_t seed, const std::string& label) {
  blocksolve::PhiloxStream rng(seed, label);
  blocksolve::Vector v(n);
  for (double& x : v) x = rng.next_normal();
  return v;
}

// Random symmetric matrix with controlled conditioning via Q1 diag Q2'.
inline blocksolve::DenseMatrix random_symmetric(int n, std::uint64_t seed) {
  blocksolve::PhiloxStream rng(seed, "oracle.symmetric");
  Eigen::MatrixXd g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = rng.next_normal();
  Eigen::MatrixXd s = 0.5 * (g + g.transpose());
  blocksolve::DenseMatrix out(n, n);
  Eigen::Map<Eigen::MatrixXd>(out.data(), n, n) = s;
  return out;
}

}  // namespace oracle
