#pragma once

#include <vector>

#include "blockcg/solver.hpp"

namespace blockcg {

/// The invariant subspace selected for deflation: the k1 lowest and k2
/// highest eigenpairs of A, with Q holding the corresponding (Euclidean
/// orthonormal) eigenvector columns and lambdas the full ascending spectrum.
struct DeflationTarget {
  int k1 = 0;
  int k2 = 0;
  Matrix q;
  Vector lambdas;
};

DeflationTarget make_deflation_target(const SpectralDecomposition& eig, int k1,
                                      int k2);

/// Orthogonal projector onto range(Q), applied as Q (Q^T v) without ever
/// forming an n x n matrix.
class SpectralProjector {
 public:
  explicit SpectralProjector(Matrix q) : q_(std::move(q)) {}
  Matrix apply(const Matrix& v) const { return q_ * (q_.transpose() * v); }
  Matrix complement(const Matrix& v) const { return v - apply(v); }
  const Matrix& basis() const { return q_; }

 private:
  Matrix q_;
};

/// Y = A Z where Z collects the Ritz vectors paired with the target
/// (k1 lowest, k2 highest Ritz values). Throws InsufficientRitz when the set
/// is too small.
Matrix ritz_subspace_y(const SpdOperator& a, const RitzSet& rs,
                       const DeflationTarget& target);

/// Sine of the maximum canonical angle between range(y) and range(q) in the
/// A^{-1} geometry: both bases are mapped through L^{-1}, orthonormalized,
/// and the smallest singular value of the cross-Gram matrix gives
/// sqrt(1 - sigma_min^2), clamped to [0, 1].
double subspace_gap(const SpdOperator& a, const Matrix& y, const Matrix& q);

/// Same quantity through the explicit projector route: the A^{-1}-induced
/// operator norm of (I - P_Y) Q Q^T with P_Y the A^{-1}-orthogonal projector
/// onto range(y). Validation path for subspace_gap.
double subspace_gap_crosscheck(const SpdOperator& a, const Matrix& y,
                               const Matrix& q);

struct AlphaFactor {
  double value = 1.0;
  bool unreliable = false;     // near-singular denominator or extreme size
  double min_denominator = 0;  // smallest |lambda - theta| gap encountered
};

/// The spectral amplification factor alpha_{m,k1,k2} built from ratios of
/// Ritz values to eigenvalues and eigenvalue separations. The two partial
/// products range over disjoint comparison indices, so their maxima are taken
/// independently; comparison indices whose eigenvalue coincides with a
/// deflated one are skipped. With multiplicity_mode the k1 lowest reference
/// eigenvalues are all taken to be lambda_1 (repeated-eigenvalue form).
/// The value is reported as computed, however large; it is only annotated as
/// unreliable, never suppressed.
AlphaFactor alpha_factor(const Vector& lambdas, const RitzSet& rs, int k1,
                         int k2, bool multiplicity_mode = false);

struct BoundConfig {
  int m = 1;      // outer iteration at which the bounds start
  int j_max = 0;  // horizon
  int k1 = 1;
  int k2 = 0;
  bool multiplicity_mode = false;
};

struct SubspaceBoundSeries {
  double gap = 0.0;  // gamma_m
  std::vector<double> b1;          // substitution value per j = 0..j_max
  std::vector<double> b1_ls_sqrt2; // sqrt(2) x the optimal stacked LS value
  std::vector<Matrix> d_star;      // minimizer D* per j
  bool krylov_truncated = false;
  bool ls_rank_deficient = false;
};

/// The invariant-subspace bound series: for each j the stacked least squares
/// problem min_C || [L^{-1}(I-P); gamma L^{-1} P] (R_m - A V C) ||_F over the
/// Krylov parameterization V of K_j(A, R_m) is solved (j = 0 means D = 0),
/// and the minimizer is substituted into the two-term bound
/// ||(I-P)(R_m - D*)|| + gamma ||P (R_m - D*)||.
SubspaceBoundSeries subspace_bound_series(const SpdOperator& a,
                                          const Matrix& r_m,
                                          const DeflationTarget& target,
                                          double gap, int j_max);

struct SpectralBoundSeries {
  AlphaFactor alpha;
  std::vector<double> comparison;  // ||Rbar_j|| for j = 0..j_max
  std::vector<double> b2;          // alpha * comparison[j]
  bool comparison_truncated = false;  // comparison broke down before j_max
};

/// The spectral bound series: runs the comparison process from
/// (I - P_Q) R_m and scales its residuals by alpha_{m,k1,k2}.
SpectralBoundSeries spectral_bound_series(const SpdOperator& a,
                                          const Matrix& r_m,
                                          const DeflationTarget& target,
                                          const AlphaFactor& alpha, int j_max);

/// Relative discrepancy between ||R_m||^2 computed through the Cholesky
/// factor and through the eigenbasis weights: ||R_m||^2 must equal
/// sum_i (1/lambda_i) ||row_i(V^T R_m)||^2.
double trace_identity_gap(const SpdOperator& a,
                          const SpectralDecomposition& eig, const Matrix& r_m);

/// One fully evaluated bound configuration.
struct BoundSeries {
  BoundConfig config;
  double gamma_m = 0.0;
  double alpha = 1.0;
  bool alpha_unreliable = false;
  std::vector<double> actual;      // ||R_{m+j}|| from the original solve
  std::vector<double> comparison;  // ||Rbar_j||
  std::vector<double> b1;
  std::vector<double> b1_ls_sqrt2;
  std::vector<double> b2;
  bool krylov_truncated = false;
  bool ls_rank_deficient = false;
  bool comparison_truncated = false;
  bool actual_truncated = false;
};

/// Evaluates both bound families for one configuration against a completed
/// solve. The solve must hold a checkpoint at cfg.m and have run to at least
/// m + j_max steps (a shorter trace pads `actual` with its final value and
/// flags the truncation).
BoundSeries evaluate_bounds(const SpdOperator& a, const SolveTrace& solve,
                            const SpectralDecomposition& eig,
                            const BoundConfig& cfg);

}  // namespace blockcg
