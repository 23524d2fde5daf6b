#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <complex>
#include <memory>
#include <vector>

#include "blocksolve/block_qp.hpp"
#include "blocksolve/kkt.hpp"

namespace blocksolve {

// Explicit dense Gauss-Seidel splitting H_rho = M_rho - N_rho:
//   M = [K_rho 0 0; rho B'A rho B'B 0; A B -(1/rho) I]
//   N = [0 -rho A'B -A'; 0 0 -B'; 0 0 -(1/rho) I]
// together with G = M^{-1} N and f = M^{-1} r. Verification-only: the dense
// inverse goes through an LU factorization, never through the ADMM path it
// cross-checks, and construction is capped to small dimensions.
class DenseSplitting {
 public:
  DenseSplitting(DenseMatrix m, DenseMatrix n, Vector r, double rho)
      : m_(std::move(m)), n_(std::move(n)), rhs_(std::move(r)), rho_(rho) {
    const int dim = m_.rows();
    Eigen::Map<const Eigen::MatrixXd> em(m_.data(), dim, dim);
    Eigen::Map<const Eigen::MatrixXd> en(n_.data(), dim, dim);
    lu_ = std::make_shared<Eigen::PartialPivLU<Eigen::MatrixXd>>(em);
    Eigen::MatrixXd g = lu_->solve(en);
    g_ = DenseMatrix(dim, dim);
    Eigen::Map<Eigen::MatrixXd>(g_.data(), dim, dim) = g;
    Eigen::Map<const Eigen::VectorXd> er(rhs_.data(), dim);
    Eigen::VectorXd f = lu_->solve(er);
    f_ = Vector(f.data(), f.data() + dim);
  }

  int dim() const { return m_.rows(); }
  double rho() const { return rho_; }
  const DenseMatrix& m() const { return m_; }
  const DenseMatrix& n() const { return n_; }
  const DenseMatrix& g() const { return g_; }
  const Vector& f() const { return f_; }
  const Vector& rhs() const { return rhs_; }

  // One Richardson step M^{-1}(N u + r); the dense oracle for admm_step.
  Vector richardson_step(std::span<const double> u) const {
    Vector t(dim(), 0.0);
    n_.multiply(u, t);
    for (int i = 0; i < dim(); ++i) t[i] += rhs_[i];
    Eigen::Map<const Eigen::VectorXd> et(t.data(), dim());
    Eigen::VectorXd s = lu_->solve(et);
    return Vector(s.data(), s.data() + dim());
  }

  // (I - G) h; the dense oracle for the matrix-free preconditioned matvec.
  Vector apply_i_minus_g(std::span<const double> h) const {
    Vector gh(dim(), 0.0);
    g_.multiply(h, gh);
    Vector out(h.begin(), h.end());
    for (int i = 0; i < dim(); ++i) out[i] -= gh[i];
    return out;
  }

  std::vector<std::complex<double>> eigenvalues() const {
    Eigen::Map<const Eigen::MatrixXd> eg(g_.data(), dim(), dim());
    Eigen::EigenSolver<Eigen::MatrixXd> solver(eg, /*computeEigenvectors=*/false);
    const auto& values = solver.eigenvalues();
    return std::vector<std::complex<double>>(values.data(), values.data() + values.size());
  }

  double spectral_radius() const {
    double radius = 0.0;
    for (const auto& ev : eigenvalues()) radius = std::max(radius, std::abs(ev));
    return radius;
  }

 private:
  DenseMatrix m_;
  DenseMatrix n_;
  Vector rhs_;
  double rho_;
  DenseMatrix g_;
  Vector f_;
  std::shared_ptr<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
};

inline constexpr int kDefaultSplittingDimensionCap = 500;

inline DenseSplitting build_dense_splitting(const BlockQp& qp, double rho,
                                            int dimension_cap = kDefaultSplittingDimensionCap) {
  if (rho <= 0.0) throw Error("build_dense_splitting: rho must be positive");
  const BlockLayout& lay = qp.layout();
  if (lay.dim > dimension_cap)
    throw DimensionCapError("build_dense_splitting: dimension " + std::to_string(lay.dim) + " exceeds cap " +
                            std::to_string(dimension_cap));
  DenseMatrix m(lay.dim, lay.dim), n(lay.dim, lay.dim);
  DenseMatrix coupling_gram(lay.nz, lay.nz);
  for (int i = 0; i < qp.num_partitions(); ++i) {
    const Partition& p = qp.partition(i);
    const int xo = lay.x_offset[i], lo = lay.lambda_offset[i], yo = lay.y_offset[i];
    const DenseMatrix kreg = detail::regularized_hessian_dense(p, rho);
    for (int j = 0; j < p.num_vars(); ++j)
      for (int r = 0; r < p.num_vars(); ++r) m(xo + r, xo + j) = kreg(r, j);
    for (int j = 0; j < p.eq_jac.cols(); ++j)
      for (std::size_t k = 0; k < p.eq_jac.col_rows(j).size(); ++k) {
        const int r = p.eq_jac.col_rows(j)[k];
        const double v = p.eq_jac.col_values(j)[k];
        m(lo + r, xo + j) = v;
        m(xo + j, lo + r) = v;
      }
    // A in M's (y, v) block; -A' in N's (v, y) block.
    for (int j = 0; j < p.link_jac.cols(); ++j)
      for (std::size_t k = 0; k < p.link_jac.col_rows(j).size(); ++k) {
        const int r = p.link_jac.col_rows(j)[k];
        const double v = p.link_jac.col_values(j)[k];
        m(yo + r, xo + j) = v;
        n(xo + j, yo + r) = -v;
      }
    // B in M's (y, z) block; -B' in N's (z, y) block.
    for (int j = 0; j < p.coupling_jac.cols(); ++j)
      for (std::size_t k = 0; k < p.coupling_jac.col_rows(j).size(); ++k) {
        const int r = p.coupling_jac.col_rows(j)[k];
        const double v = p.coupling_jac.col_values(j)[k];
        m(yo + r, lay.z_offset + j) = v;
        n(lay.z_offset + j, yo + r) = -v;
      }
    if (p.num_link() > 0) {
      // rho B'A in M's (z, v) block; its mirror -rho A'B in N's (v, z) block.
      const DenseMatrix bta = atb_dense(p.coupling_jac, p.link_jac);
      for (int j = 0; j < bta.cols(); ++j)
        for (int r = 0; r < bta.rows(); ++r) {
          const double v = rho * bta(r, j);
          m(lay.z_offset + r, xo + j) = v;
          n(xo + j, lay.z_offset + r) = -v;
        }
      const DenseMatrix btb = atb_dense(p.coupling_jac, p.coupling_jac);
      for (int j = 0; j < btb.cols(); ++j)
        for (int r = 0; r < btb.rows(); ++r) coupling_gram(r, j) += btb(r, j);
    }
  }
  // Accumulate the coupling Gram unscaled and scale once, matching the KKT
  // assembly association so the splitting identity holds bitwise.
  for (int j = 0; j < lay.nz; ++j)
    for (int r = 0; r < lay.nz; ++r)
      if (coupling_gram(r, j) != 0.0) m(lay.z_offset + r, lay.z_offset + j) = rho * coupling_gram(r, j);
  for (int i = 0; i < qp.num_link(); ++i) {
    const int d = lay.dim - qp.num_link() + i;
    m(d, d) = -1.0 / rho;
    n(d, d) = -1.0 / rho;
  }
  return DenseSplitting(std::move(m), std::move(n), detail::assemble_rhs(qp), rho);
}

}  // namespace blocksolve
