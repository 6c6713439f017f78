#pragma once

#include <optional>
#include <vector>

#include "blockcg/linalg.hpp"

namespace blockcg {

/// The projected block tridiagonal matrix: diagonal blocks diag[i], coupling
/// blocks sub[i] (upper triangular, sub[i] sits between block rows i and i+1),
/// plus the s x s factor b0 from the QR of the starting block.
struct BlockTridiagonal {
  int block_size = 0;
  Matrix b0;
  std::vector<Matrix> diag;
  std::vector<Matrix> sub;

  int steps() const { return static_cast<int>(diag.size()); }

  /// Dense symmetric (m*s) x (m*s) leading section, m <= steps().
  Matrix assemble(int m) const;
  Matrix assemble() const { return assemble(steps()); }
};

struct BreakdownRecord {
  int step;
  double pivot;  // magnitude that fell below the rank threshold
};

/// Mutable state of a block Lanczos recurrence. basis holds the orthonormal
/// blocks U_0..U_m; after a breakdown the state is terminal and no further
/// steps are accepted.
struct LanczosState {
  std::vector<Matrix> basis;
  BlockTridiagonal tm;
  bool reorth = true;
  std::optional<BreakdownRecord> breakdown;

  int block_size() const { return tm.block_size; }
  int steps() const { return tm.steps(); }

  /// W_m = [U_0 ... U_{m-1}] as one n x (m*s) matrix.
  Matrix basis_matrix(int m) const;
};

/// Starts the recurrence from the QR factorization R0 = U_0 B_0.
/// Throws RankDeficient when R0 has dependent columns.
LanczosState lanczos_init(const SpdOperator& a, const Matrix& r0,
                          bool reorth = true);

/// One block step: appends diag_i = U_i^T A U_i, forms
/// M_i = A U_i - U_i diag_i - U_{i-1} sub_i^T, optionally reorthogonalizes it
/// against the whole basis (two classical Gram-Schmidt passes), and QR-factors
/// it into U_{i+1} sub_{i+1}. Rank deficiency of M_i records a breakdown and
/// makes the state terminal.
void lanczos_step(LanczosState& state, const SpdOperator& a);

struct RitzSet {
  int step = 0;
  Vector values;   // ascending eigenvalues of T_m
  Matrix vectors;  // n x (m*s); column i is W_m * (eigenvector i of T_m)
};

RitzSet ritz(const LanczosState& state);
RitzSet ritz(const LanczosState& state, int m);

struct KrylovBasis {
  Matrix q;            // orthonormal columns spanning K_j(A, R0)
  int block_size = 0;
  bool truncated = false;  // a breakdown stopped the basis short of j*s columns
};

/// Orthonormal basis of the block Krylov subspace K_j(A, R0) from a fresh
/// fully reorthogonalized Lanczos run.
KrylovBasis krylov_basis(const SpdOperator& a, const Matrix& r0, int j);

}  // namespace blockcg
