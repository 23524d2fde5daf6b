#pragma once

#include <stdexcept>
#include <string>

namespace blocksolve {

// Base class for all numerical and data errors thrown by this library.
// Non-convergence of iterative solvers is never an error; it is reported
// through SolveReport::status.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A factorization pivot fell below the singularity threshold.
struct SingularMatrixError : Error {
  explicit SingularMatrixError(const std::string& msg) : Error(msg) {}
};

// Cholesky hit a nonpositive pivot.
struct NotPositiveDefiniteError : Error {
  explicit NotPositiveDefiniteError(const std::string& msg) : Error(msg) {}
};

struct DimensionMismatchError : Error {
  explicit DimensionMismatchError(const std::string& msg) : Error(msg) {}
};

// Arnoldi basis collapsed before the residual tolerance was met.
struct BreakdownError : Error {
  explicit BreakdownError(const std::string& msg) : Error(msg) {}
};

// A probed operator failed the superposition audit.
struct LinearityError : Error {
  explicit LinearityError(const std::string& msg) : Error(msg) {}
};

// Problem-generator parameters are inconsistent.
struct InvalidSpecError : Error {
  explicit InvalidSpecError(const std::string& msg) : Error(msg) {}
};

// Malformed input file; message carries field/line context.
struct ParseError : Error {
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

struct ImbalancedDispatchError : Error {
  explicit ImbalancedDispatchError(const std::string& msg) : Error(msg) {}
};

struct DisconnectedNetworkError : Error {
  explicit DisconnectedNetworkError(const std::string& msg) : Error(msg) {}
};

// Dense verification object requested above the configured size cap.
struct DimensionCapError : Error {
  explicit DimensionCapError(const std::string& msg) : Error(msg) {}
};

}  // namespace blocksolve
