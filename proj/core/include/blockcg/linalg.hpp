#pragma once

#include <Eigen/Dense>

#include "blockcg/errors.hpp"

namespace blockcg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense real s.p.d. matrix with a cached lower-triangular Cholesky factor.
///
/// The constructor symmetrizes its input via (M + M^T)/2 and factors it once;
/// A^{-1} is only ever applied through the factor (two triangular solves),
/// never formed explicitly. Immutable after construction, safe to share.
class SpdOperator {
 public:
  explicit SpdOperator(Matrix entries);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Matrix& entries() const { return entries_; }

  /// Lower-triangular L with A = L L^T.
  const Matrix& chol() const { return chol_; }

  /// True when the relative asymmetry of the constructor input exceeded 1e-12.
  bool input_was_asymmetric() const { return input_asymmetric_; }

  Matrix apply(const Matrix& v) const;       // A v
  Matrix solve(const Matrix& v) const;       // A^{-1} v
  Matrix half_solve(const Matrix& v) const;  // L^{-1} v

 private:
  Matrix entries_;
  Matrix chol_;
  bool input_asymmetric_ = false;
};

/// Lower-triangular factor L with L L^T = a.
/// Throws NotPositiveDefinite with the index of the first nonpositive pivot.
Matrix cholesky_factor(const Matrix& a);

struct QrTallResult {
  Matrix q;  // n x s, orthonormal columns
  Matrix r;  // s x s upper triangular, nonnegative diagonal
  int deficient_col = -1;
  double deficient_pivot = 0.0;
  bool rank_deficient() const { return deficient_col >= 0; }
};

/// Thin QR of an n x s block (n >= s) with the sign convention diag(R) >= 0.
/// Rank deficiency (|R_ii| <= 1e-13 ||M||_F) is reported, not thrown; the
/// caller decides whether it is a breakdown or an error.
QrTallResult qr_tall(const Matrix& m);

struct SpectralDecomposition {
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // column i pairs with eigenvalues(i)
};

/// Full symmetric eigendecomposition; the input is symmetrized on entry.
SpectralDecomposition sym_eig(const Matrix& m);

/// trace(V^T A^{-1} W), evaluated as the Frobenius inner product of
/// L^{-1} V and L^{-1} W.
double ainvf_inner(const SpdOperator& a, const Matrix& v, const Matrix& w);

/// The A^{-1}-Frobenius norm sqrt(trace(V^T A^{-1} V)); zero iff V = 0.
double ainvf_norm(const SpdOperator& a, const Matrix& v);

struct LeastSquaresResult {
  Matrix coeff;
  Eigen::Index rank;
};

/// Columnwise minimizer of ||M C - B||_F via QR with column pivoting (p >= q).
/// In rank-deficient cases the basic solution is returned, with pivoted-out
/// coefficients zero.
Matrix least_squares(const Matrix& m, const Matrix& b);
LeastSquaresResult least_squares_full(const Matrix& m, const Matrix& b);

/// Operator norm of a square M on (R^n, <.,.>_{A^{-1}}), i.e. the largest
/// singular value of L^{-1} M L.
double op_norm_ainv(const SpdOperator& a, const Matrix& m);

}  // namespace blockcg
