#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <sstream>
#include <vector>

#include "blocksolve/dense.hpp"
#include "blocksolve/report.hpp"
#include "blocksolve/rng.hpp"
#include "blocksolve/sparse.hpp"

namespace blocksolve {

// Matrix-free map v -> M v. apply must be deterministic and linear; gmres
// audits the latter by superposition probing before iterating.
struct LinearOperator {
  int dim = 0;
  std::function<void(std::span<const double>, std::span<double>)> apply_fn;

  void apply(std::span<const double> x, std::span<double> y) const { apply_fn(x, y); }
  Vector apply(std::span<const double> x) const {
    Vector y(dim, 0.0);
    apply_fn(x, y);
    return y;
  }

  static LinearOperator from_sparse(const SparseMatrix& m) {
    if (m.rows() != m.cols()) throw DimensionMismatchError("LinearOperator::from_sparse: square matrix required");
    return {m.rows(), [&m](std::span<const double> x, std::span<double> y) {
              Vector r = m.multiply(x);
              std::copy(r.begin(), r.end(), y.begin());
            }};
  }
};

struct GmresSettings {
  double tolerance = 1e-8;  // relative residual ||rhs - op(x)|| / ||rhs||
  int max_iterations = 2000;
  int restart = 0;  // 0 = unrestarted
  bool linearity_audit = true;
  std::uint64_t audit_seed = 0x5eedULL;
  // Invoked with the reconstructed iterate after every accepted iteration.
  std::function<void(int, const Vector&)> iterate_callback;
};

namespace detail {

inline void audit_linearity(const LinearOperator& op, std::uint64_t seed) {
  PhiloxStream rng(seed, "gmres.linearity.audit");
  for (int probe = 0; probe < 3; ++probe) {
    Vector a(op.dim), b(op.dim), combo(op.dim);
    const double alpha = 4.0 * rng.next_uniform() - 2.0;
    const double beta = 4.0 * rng.next_uniform() - 2.0;
    for (int i = 0; i < op.dim; ++i) {
      a[i] = rng.next_normal();
      b[i] = rng.next_normal();
      combo[i] = alpha * a[i] + beta * b[i];
    }
    const Vector fa = op.apply(a);
    const Vector fb = op.apply(b);
    const Vector fc = op.apply(combo);
    double err_sq = 0.0;
    for (int i = 0; i < op.dim; ++i) {
      const double d = fc[i] - alpha * fa[i] - beta * fb[i];
      err_sq += d * d;
    }
    const double scale = 1.0 + std::abs(alpha) * norm2(fa) + std::abs(beta) * norm2(fb) + norm2(fc);
    if (std::sqrt(err_sq) > 1e-12 * scale) {
      std::ostringstream msg;
      msg << "gmres: operator failed the superposition audit (probe " << probe << ", error " << std::sqrt(err_sq)
          << " vs scale " << scale << "); the operator apply is not linear";
      throw LinearityError(msg.str());
    }
  }
}

}  // namespace detail

struct GmresResult {
  Vector x;
  SolveReport report;
};

// Unrestarted (or optionally restarted) GMRES with modified Gram-Schmidt
// Arnoldi and Givens-rotation least squares. The residual-norm sequence in
// the report is the absolute ||rhs - op(x_k)|| per iteration, starting with
// the initial residual.
inline GmresResult gmres(const LinearOperator& op, const Vector& rhs, const Vector& x0, const GmresSettings& settings) {
  if (static_cast<int>(rhs.size()) != op.dim || static_cast<int>(x0.size()) != op.dim)
    throw DimensionMismatchError("gmres: rhs/x0 length mismatch");
  if (settings.tolerance <= 0.0 || settings.max_iterations < 1)
    throw Error("gmres: tolerance must be positive and max_iterations >= 1");
  if (settings.linearity_audit) detail::audit_linearity(op, settings.audit_seed);

  const auto t0 = std::chrono::steady_clock::now();
  GmresResult result;
  result.report.method = "gmres";
  result.x = x0;

  const double rhs_norm = norm2(rhs);
  const double tol_abs = settings.tolerance * rhs_norm;
  if (rhs_norm == 0.0) {
    result.x.assign(op.dim, 0.0);
    result.report.status = SolveStatus::Converged;
    result.report.residual_history = {0.0};
    result.report.final_residual = 0.0;
    return result;
  }

  const int cycle_cap = settings.restart > 0 ? settings.restart : settings.max_iterations;
  int total_iters = 0;
  bool converged = false;
  bool first_cycle = true;

  while (total_iters < settings.max_iterations && !converged) {
    Vector r = op.apply(result.x);
    for (int i = 0; i < op.dim; ++i) r[i] = rhs[i] - r[i];
    const double beta = norm2(r);
    if (first_cycle) {
      result.report.residual_history.push_back(beta);
      first_cycle = false;
    }
    if (beta <= tol_abs) {
      converged = true;
      break;
    }

    std::vector<Vector> basis;
    basis.push_back(r);
    scale(1.0 / beta, basis.back());
    std::vector<Vector> r_cols;        // rotated Hessenberg columns (upper triangular R)
    std::vector<double> givens_c, givens_s;
    Vector g{beta};

    const auto reconstruct = [&](int k) {
      Vector y(g.begin(), g.begin() + k);
      for (int i = k - 1; i >= 0; --i) {
        double s = y[i];
        for (int j = i + 1; j < k; ++j) s -= r_cols[j][i] * y[j];
        y[i] = s / r_cols[i][i];
      }
      Vector xk = result.x;
      for (int i = 0; i < k; ++i) axpy(y[i], basis[i], xk);
      return xk;
    };

    int steps = 0;
    for (int j = 0; j < cycle_cap && total_iters < settings.max_iterations; ++j) {
      Vector w = op.apply(basis[j]);
      const double w_norm_before = norm2(w);
      Vector h(j + 2, 0.0);
      for (int i = 0; i <= j; ++i) {
        h[i] = dot(w, basis[i]);
        axpy(-h[i], basis[i], w);
      }
      double w_norm = norm2(w);
      // One reorthogonalization pass when cancellation ate more than the
      // loss-of-orthogonality threshold.
      if (w_norm <= 1e-8 * w_norm_before) {
        for (int i = 0; i <= j; ++i) {
          const double correction = dot(w, basis[i]);
          h[i] += correction;
          axpy(-correction, basis[i], w);
        }
        w_norm = norm2(w);
      }
      h[j + 1] = w_norm;

      const bool basis_closed = w_norm <= 1e-14 * std::max(w_norm_before, 1e-300);

      // Apply accumulated rotations, then eliminate the new subdiagonal.
      for (int i = 0; i < j; ++i) {
        const double t = givens_c[i] * h[i] + givens_s[i] * h[i + 1];
        h[i + 1] = -givens_s[i] * h[i] + givens_c[i] * h[i + 1];
        h[i] = t;
      }
      const double denom = std::hypot(h[j], h[j + 1]);
      if (denom == 0.0)
        throw BreakdownError("gmres: zero Hessenberg column at iteration " + std::to_string(total_iters + 1) +
                             "; operator is singular on the Krylov subspace");
      const double c = h[j] / denom;
      const double s = h[j + 1] / denom;
      givens_c.push_back(c);
      givens_s.push_back(s);
      h[j] = denom;
      g.push_back(-s * g[j]);
      g[j] = c * g[j];
      r_cols.push_back(Vector(h.begin(), h.begin() + j + 1));

      ++total_iters;
      steps = j + 1;
      const double resid = std::abs(g[j + 1]);
      result.report.residual_history.push_back(resid);
      if (settings.iterate_callback) settings.iterate_callback(total_iters, reconstruct(steps));

      if (resid <= tol_abs) {
        converged = true;
        break;
      }
      if (basis_closed) {
        // Arnoldi closed the subspace while the residual is still above
        // tolerance: the operator is singular on the Krylov subspace.
        std::ostringstream msg;
        msg << "gmres: Arnoldi breakdown at iteration " << total_iters << " with residual " << resid
            << " above tolerance " << tol_abs;
        throw BreakdownError(msg.str());
      }
      basis.push_back(w);
      scale(1.0 / w_norm, basis.back());
    }
    if (steps > 0) result.x = reconstruct(steps);
  }

  result.report.iterations = total_iters;
  result.report.status = converged ? SolveStatus::Converged : SolveStatus::MaxIterations;
  {
    Vector r = op.apply(result.x);
    for (int i = 0; i < op.dim; ++i) r[i] = rhs[i] - r[i];
    result.report.final_residual = norm2(r);
  }
  result.report.t_iterate_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

inline GmresResult gmres(const LinearOperator& op, const Vector& rhs, const GmresSettings& settings) {
  return gmres(op, rhs, Vector(rhs.size(), 0.0), settings);
}

}  // namespace blocksolve
