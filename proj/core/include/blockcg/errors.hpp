#pragma once

#include <stdexcept>
#include <string>

namespace blockcg {

/// A symmetric matrix handed to a Cholesky routine had a nonpositive pivot.
struct NotPositiveDefinite : std::runtime_error {
  int pivot_index;
  explicit NotPositiveDefinite(int index)
      : std::runtime_error("matrix is not positive definite (pivot " +
                           std::to_string(index) + ")"),
        pivot_index(index) {}
};

/// A tall QR factorization produced a negligible diagonal entry.
struct RankDeficient : std::runtime_error {
  int column;
  double pivot;
  RankDeficient(int col, double piv)
      : std::runtime_error("rank-deficient block: column " +
                           std::to_string(col) + ", pivot magnitude " +
                           std::to_string(piv)),
        column(col),
        pivot(piv) {}
};

struct DimensionMismatch : std::runtime_error {
  explicit DimensionMismatch(const std::string& what)
      : std::runtime_error("dimension mismatch: " + what) {}
};

/// Symmetric eigensolver failed to deflate within its sweep budget.
struct NoConvergence : std::runtime_error {
  int index;
  explicit NoConvergence(int idx)
      : std::runtime_error("eigensolver did not converge (row " +
                           std::to_string(idx) + ")"),
        index(idx) {}
};

/// The projected block tridiagonal matrix lost positive definiteness,
/// which signals loss of rank in the Lanczos basis.
struct TmNotPositiveDefinite : std::runtime_error {
  int step;
  explicit TmNotPositiveDefinite(int m)
      : std::runtime_error("projected matrix not positive definite at step " +
                           std::to_string(m)),
        step(m) {}
};

/// Fewer Ritz pairs are available than a deflation target requests.
struct InsufficientRitz : std::runtime_error {
  explicit InsufficientRitz(const std::string& what)
      : std::runtime_error("insufficient Ritz data: " + what) {}
};

/// A basis mapped into the A^{-1} geometry lost rank.
struct RankCollapse : std::runtime_error {
  explicit RankCollapse(const std::string& what)
      : std::runtime_error("rank collapse: " + what) {}
};

/// An eigenvalue/Ritz-value denominator is exactly zero.
struct DegenerateDenominator : std::runtime_error {
  DegenerateDenominator()
      : std::runtime_error("exactly zero denominator in spectral factor") {}
};

/// A spectrum entry (matrix eigenvalue) is not positive.
struct NonPositiveValue : std::runtime_error {
  int index;  // position in the offending list, or source line; -1 if n/a
  double value;
  NonPositiveValue(int idx, double val)
      : std::runtime_error("nonpositive spectrum value " +
                           std::to_string(val) + " at entry " +
                           std::to_string(idx)),
        index(idx),
        value(val) {}
};

/// Incomplete Cholesky hit a nonpositive pivot.
struct PivotLoss : std::runtime_error {
  int index;
  explicit PivotLoss(int idx)
      : std::runtime_error("incomplete Cholesky pivot loss at row " +
                           std::to_string(idx)),
        index(idx) {}
};

/// Malformed line in a spectrum file.
struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_number, const std::string& what)
      : std::runtime_error("parse error at line " +
                           std::to_string(line_number) + ": " + what),
        line(line_number) {}
};

}  // namespace blockcg
