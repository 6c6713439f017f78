#pragma once

#include <optional>
#include <vector>

#include "blockcg/lanczos.hpp"

namespace blockcg {

struct SolveOptions {
  int max_m = 0;
  double tol = 1e-8;  // on ||R_m|| in the A^{-1}-Frobenius norm
  int min_m = 0;      // the tolerance is not applied before this step
  bool reorth = true;
  std::vector<int> checkpoints;  // steps at which R_m and X_m are retained
  bool record_ritz_extremes = false;
  int direct_check_every = 5;
};

struct SolveCheckpoint {
  int m = 0;
  Matrix residual;        // R_m from the recurrence shortcut
  Matrix x;               // X_m = X_0 + W_m Y_m
  double shortcut_error;  // ||R_m - (B - A X_m)||_F
};

enum class StopReason {
  converged,
  breakdown_converged,
  breakdown_stalled,
  max_steps,
};

const char* to_string(StopReason r);

struct SolveTrace {
  std::vector<double> rnorm;  // ||R_m||_{A^{-1}-F} for m = 0..steps()
  std::vector<double> theta_min;  // extreme Ritz values per step (optional)
  std::vector<double> theta_max;
  std::vector<SolveCheckpoint> checkpoints;
  Matrix r0;
  Matrix x_final;
  bool converged = false;
  StopReason reason = StopReason::max_steps;
  double max_shortcut_error = 0.0;
  LanczosState lanczos;

  int steps() const { return static_cast<int>(rnorm.size()) - 1; }
  const SolveCheckpoint* checkpoint(int m) const;
};

/// Block CG driven by the Lanczos recurrence: at each step the projected
/// system T_m Y_m = B_0 E_1^T is solved by a dense Cholesky of T_m, the
/// residual is obtained from the shortcut R_m = -U_m B_m E_m Y_m, and the
/// direct residual B - A X_m is recomputed at checkpoints and every
/// direct_check_every steps as a drift guard. Breakdown with a residual at or
/// below tol counts as convergence.
SolveTrace block_cg_solve(const SpdOperator& a, const Matrix& b,
                          const Matrix& x0, const SolveOptions& opts);

/// The comparison process: block CG applied to A E = rbar0 from a zero
/// initial guess, run for exactly j_max steps (no tolerance stop). A zero
/// rbar0 yields an all-zero residual sequence.
SolveTrace comparison_process(const SpdOperator& a, const Matrix& rbar0,
                              int j_max);

}  // namespace blockcg
