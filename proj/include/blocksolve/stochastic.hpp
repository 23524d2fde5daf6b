#pragma once

#include <cstdint>
#include <string>

#include "blocksolve/block_qp.hpp"
#include "blocksolve/rng.hpp"

namespace blocksolve {

// Two-stage stochastic QP generator: P scenarios sharing the Hessian D, the
// constraint matrix J and the cost c; scenario right-hand sides are noisy
// copies of a nominal vector, and coupling rows pin the leading coupling_dim
// coordinates of every scenario to the first-stage variables (B_i = -I).
struct StochasticQpSpec {
  int scenarios = 50;            // P
  int vars_per_scenario = 4800;  // n_x
  int coupling_dim = 100;        // n_z
  int constraints = 100;         // m
  int hessian_blocks = 16;       // dense symmetric diagonal blocks of D
  double hessian_log_std = 0.5;  // log-standard-deviation of block eigenvalues
  double rhs_noise = 0.5;        // scenario noise std as fraction of |b|
  std::uint64_t seed = 0;

  void validate() const {
    if (scenarios < 1) throw InvalidSpecError("stochastic spec: scenarios must be >= 1");
    if (vars_per_scenario < 1) throw InvalidSpecError("stochastic spec: vars_per_scenario must be >= 1");
    if (coupling_dim < 1 || coupling_dim > vars_per_scenario)
      throw InvalidSpecError("stochastic spec: coupling_dim must lie in [1, vars_per_scenario]");
    if (constraints < 0 || constraints >= vars_per_scenario)
      throw InvalidSpecError("stochastic spec: constraints must lie in [0, vars_per_scenario)");
    if (constraints + coupling_dim > vars_per_scenario)
      throw InvalidSpecError("stochastic spec: constraints + coupling_dim must not exceed vars_per_scenario "
                             "(stacked constraint Jacobian would lose row rank)");
    if (hessian_blocks < 1 || hessian_blocks > vars_per_scenario)
      throw InvalidSpecError("stochastic spec: hessian_blocks must lie in [1, vars_per_scenario]");
    if (hessian_log_std < 0.0 || rhs_noise < 0.0)
      throw InvalidSpecError("stochastic spec: noise parameters must be nonnegative");
  }
};

// Size bookkeeping without assembling anything; the paper-scale cases are
// only ever checked through these numbers.
struct StochasticDimensions {
  long long second_stage_vars = 0;   // P * n_x
  long long partition_constraints = 0;  // P * m
  long long total_vars = 0;          // P * n_x + n_z
  long long total_constraints = 0;   // P * (m + n_z)
};

inline StochasticDimensions stochastic_dimensions(const StochasticQpSpec& spec) {
  spec.validate();
  StochasticDimensions d;
  d.second_stage_vars = static_cast<long long>(spec.scenarios) * spec.vars_per_scenario;
  d.partition_constraints = static_cast<long long>(spec.scenarios) * spec.constraints;
  d.total_vars = d.second_stage_vars + spec.coupling_dim;
  d.total_constraints = static_cast<long long>(spec.scenarios) * (spec.constraints + spec.coupling_dim);
  return d;
}

namespace detail {

// Householder QR; returns Q with the sign convention diag(R) > 0, so Q is
// Haar-distributed when the input is Gaussian.
inline DenseMatrix orthogonal_from_gaussian(int n, PhiloxStream& rng) {
  DenseMatrix a(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) a(i, j) = rng.next_normal();
  DenseMatrix q(n, n);
  for (int i = 0; i < n; ++i) q(i, i) = 1.0;
  Vector v(n);
  for (int k = 0; k < n; ++k) {
    double norm_sq = 0.0;
    for (int i = k; i < n; ++i) norm_sq += a(i, k) * a(i, k);
    const double norm = std::sqrt(norm_sq);
    if (norm == 0.0) continue;
    const double alpha = a(k, k) >= 0.0 ? -norm : norm;
    double vnorm_sq = 0.0;
    for (int i = k; i < n; ++i) {
      v[i] = a(i, k) - (i == k ? alpha : 0.0);
      vnorm_sq += v[i] * v[i];
    }
    if (vnorm_sq == 0.0) continue;
    const double beta = 2.0 / vnorm_sq;
    for (int j = k; j < n; ++j) {
      double s = 0.0;
      for (int i = k; i < n; ++i) s += v[i] * a(i, j);
      s *= beta;
      for (int i = k; i < n; ++i) a(i, j) -= s * v[i];
    }
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int i = k; i < n; ++i) s += v[i] * q(i, j);
      s *= beta;
      for (int i = k; i < n; ++i) q(i, j) -= s * v[i];
    }
  }
  // q currently holds Q' applied row-wise; flip signs so diag(R) > 0.
  for (int k = 0; k < n; ++k) {
    if (a(k, k) < 0.0)
      for (int j = 0; j < n; ++j) q(k, j) = -q(k, j);
  }
  return q;  // rows are orthonormal; Q' diag Q uses them directly
}

// Q' diag(exp(s * xi)) Q with Q from QR of a Gaussian matrix.
inline DenseMatrix spd_block(int n, double log_std, PhiloxStream& rng) {
  const DenseMatrix q = orthogonal_from_gaussian(n, rng);
  Vector eigs(n);
  for (double& e : eigs) e = std::exp(log_std * rng.next_normal());
  DenseMatrix out(n, n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r <= c; ++r) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += q(k, r) * eigs[k] * q(k, c);
      out(r, c) = s;
      out(c, r) = s;
    }
  return out;
}

inline bool has_full_row_rank(const SparseMatrix& j) {
  if (j.rows() == 0) return true;
  try {
    SpdFactor check(atb_dense(j.transposed(), j.transposed()));  // J J'
  } catch (const NotPositiveDefiniteError&) {
    return false;
  }
  return true;
}

}  // namespace detail

inline BlockQp gen_stochastic_qp(const StochasticQpSpec& spec) {
  spec.validate();
  const int nx = spec.vars_per_scenario;
  const int nz = spec.coupling_dim;
  const int m = spec.constraints;

  // Shared Hessian: block-diagonal with dense SPD blocks; block sizes split
  // nx as evenly as possible.
  SparseMatrix hessian(nx, nx, true);
  {
    const int base = nx / spec.hessian_blocks;
    int remainder = nx % spec.hessian_blocks;
    int offset = 0;
    for (int b = 0; b < spec.hessian_blocks; ++b) {
      const int size = base + (remainder-- > 0 ? 1 : 0);
      if (size == 0) continue;
      PhiloxStream rng(spec.seed, "hessian.block." + std::to_string(b));
      const DenseMatrix block = detail::spd_block(size, spec.hessian_log_std, rng);
      for (int c = 0; c < size; ++c)
        for (int r = c; r < size; ++r) hessian.add(offset + r, offset + c, block(r, c));
      offset += size;
    }
  }
  hessian.finalize();

  // Shared constraint matrix, redrawn until it has full row rank.
  SparseMatrix eq_jac(m, nx);
  for (int attempt = 0;; ++attempt) {
    SparseMatrix candidate(m, nx);
    PhiloxStream rng(spec.seed, attempt == 0 ? std::string("constraints")
                                             : "constraints.retry." + std::to_string(attempt));
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < nx; ++c) candidate.add(r, c, rng.next_normal());
    candidate.finalize();
    if (detail::has_full_row_rank(candidate)) {
      eq_jac = std::move(candidate);
      break;
    }
    if (attempt > 16) throw InvalidSpecError("stochastic generator: could not draw a full-rank constraint matrix");
  }

  Vector cost(nx);
  {
    PhiloxStream rng(spec.seed, "cost");
    for (double& v : cost) v = rng.next_normal();
  }
  Vector nominal_rhs(m);
  {
    PhiloxStream rng(spec.seed, "rhs.nominal");
    for (double& v : nominal_rhs) v = rng.next_normal();
  }

  SparseMatrix link(nz, nx);
  for (int r = 0; r < nz; ++r) link.add(r, r, 1.0);
  link.finalize();
  SparseMatrix coupling(nz, nz);
  for (int r = 0; r < nz; ++r) coupling.add(r, r, -1.0);
  coupling.finalize();

  std::vector<Partition> parts;
  parts.reserve(spec.scenarios);
  for (int s = 0; s < spec.scenarios; ++s) {
    Partition p;
    p.hessian = hessian;
    p.cost = cost;
    p.eq_jac = eq_jac;
    p.eq_rhs.resize(m);
    PhiloxStream rng(spec.seed, "rhs.noise." + std::to_string(s));
    for (int r = 0; r < m; ++r)
      p.eq_rhs[r] = nominal_rhs[r] + spec.rhs_noise * std::abs(nominal_rhs[r]) * rng.next_normal();
    p.link_jac = link;
    p.coupling_jac = coupling;
    parts.push_back(std::move(p));
  }
  return BlockQp(std::move(parts), nz);
}

}  // namespace blocksolve
