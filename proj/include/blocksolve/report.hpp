#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace blocksolve {

enum class SolveStatus { Converged, MaxIterations, NotConverged, Failed };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::NotConverged: return "not_converged";
    case SolveStatus::Failed: return "failed";
  }
  return "unknown";
}

// Common solve record. residual_history holds the true residual ||Hu - r||
// per iteration including the starting point, so its length is
// iterations + 1. inner_residual_history carries solver-internal norms
// (the preconditioned residual for ADMM-GMRES) when distinct.
struct SolveReport {
  std::string method;
  int iterations = 0;
  std::vector<double> residual_history;
  std::vector<double> inner_residual_history;
  double final_residual = std::numeric_limits<double>::quiet_NaN();
  SolveStatus status = SolveStatus::Failed;
  double t_setup_s = 0.0;
  double t_factor_s = 0.0;
  double t_iterate_s = 0.0;
  double rho = std::numeric_limits<double>::quiet_NaN();
  int n_admm = 0;
  std::uint64_t seed = 0;
  int factorizations = 0;
};

}  // namespace blocksolve
