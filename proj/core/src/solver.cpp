#include "blockcg/solver.hpp"

#include <algorithm>
#include <cmath>

namespace blockcg {

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::converged:
      return "converged";
    case StopReason::breakdown_converged:
      return "breakdown_converged";
    case StopReason::breakdown_stalled:
      return "breakdown_stalled";
    case StopReason::max_steps:
      return "max_steps";
  }
  return "unknown";
}

const SolveCheckpoint* SolveTrace::checkpoint(int m) const {
  for (const SolveCheckpoint& c : checkpoints) {
    if (c.m == m) return &c;
  }
  return nullptr;
}

namespace {

// Y_m from T_m Y_m = B_0 E_1^T by dense Cholesky of the assembled matrix.
Matrix solve_projected(const BlockTridiagonal& tm, int m) {
  const int s = tm.block_size;
  Matrix t = tm.assemble(m);
  Eigen::LLT<Matrix> llt(t);
  if (llt.info() != Eigen::Success) {
    throw TmNotPositiveDefinite(m);
  }
  Matrix rhs = Matrix::Zero(t.rows(), s);
  rhs.topRows(s) = tm.b0;
  return llt.solve(rhs);
}

}  // namespace

SolveTrace block_cg_solve(const SpdOperator& a, const Matrix& b,
                          const Matrix& x0, const SolveOptions& opts) {
  if (b.rows() != a.entries().rows() || x0.rows() != b.rows() ||
      x0.cols() != b.cols()) {
    throw DimensionMismatch("block_cg_solve requires conforming blocks");
  }
  if (opts.max_m < 0) {
    throw std::invalid_argument("block_cg_solve: max_m must be >= 0");
  }

  const int s = static_cast<int>(b.cols());
  const auto is_checkpoint = [&](int m) {
    return std::find(opts.checkpoints.begin(), opts.checkpoints.end(), m) !=
           opts.checkpoints.end();
  };

  SolveTrace trace;
  trace.r0 = b - a.apply(x0);
  trace.x_final = x0;
  const double r0norm = ainvf_norm(a, trace.r0);
  trace.rnorm.push_back(r0norm);
  if (r0norm == 0.0) {
    trace.converged = true;
    trace.reason = StopReason::converged;
    return trace;
  }

  LanczosState state = lanczos_init(a, trace.r0, opts.reorth);

  for (int m = 1; m <= opts.max_m; ++m) {
    lanczos_step(state, a);

    if (state.breakdown) {
      // The space is invariant: solve on the completed T_m and measure the
      // residual directly.
      Matrix y = solve_projected(state.tm, m);
      Matrix x = x0 + state.basis_matrix(m) * y;
      Matrix r = b - a.apply(x);
      const double rn = ainvf_norm(a, r);
      trace.rnorm.push_back(rn);
      if (opts.record_ritz_extremes) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(state.tm.assemble(m),
                                                 Eigen::EigenvaluesOnly);
        trace.theta_min.push_back(es.eigenvalues()(0));
        trace.theta_max.push_back(es.eigenvalues()(es.eigenvalues().size() - 1));
      }
      if (is_checkpoint(m)) {
        trace.checkpoints.push_back(SolveCheckpoint{m, r, x, 0.0});
      }
      trace.x_final = std::move(x);
      trace.converged = rn <= opts.tol;
      trace.reason = trace.converged ? StopReason::breakdown_converged
                                     : StopReason::breakdown_stalled;
      break;
    }

    Matrix y = solve_projected(state.tm, m);
    Matrix r_shortcut =
        -state.basis[m] * (state.tm.sub[m - 1] * y.bottomRows(s));
    const double rn = ainvf_norm(a, r_shortcut);
    trace.rnorm.push_back(rn);

    if (opts.record_ritz_extremes) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(state.tm.assemble(m),
                                               Eigen::EigenvaluesOnly);
      trace.theta_min.push_back(es.eigenvalues()(0));
      trace.theta_max.push_back(es.eigenvalues()(es.eigenvalues().size() - 1));
    }

    const bool stop_tol = m >= opts.min_m && rn <= opts.tol;
    const bool stop_max = m == opts.max_m;
    const bool want_direct =
        is_checkpoint(m) || stop_tol || stop_max ||
        (opts.direct_check_every > 0 && m % opts.direct_check_every == 0);

    if (want_direct) {
      Matrix x = x0 + state.basis_matrix(m) * y;
      Matrix r_direct = b - a.apply(x);
      const double err = (r_shortcut - r_direct).norm();
      trace.max_shortcut_error = std::max(trace.max_shortcut_error, err);
      if (is_checkpoint(m)) {
        trace.checkpoints.push_back(SolveCheckpoint{m, r_shortcut, x, err});
      }
      if (stop_tol || stop_max) {
        trace.x_final = std::move(x);
      }
    }

    if (stop_tol) {
      trace.converged = true;
      trace.reason = StopReason::converged;
      break;
    }
    if (stop_max) {
      trace.converged = rn <= opts.tol;
      trace.reason = StopReason::max_steps;
      break;
    }
  }

  trace.lanczos = std::move(state);
  return trace;
}

SolveTrace comparison_process(const SpdOperator& a, const Matrix& rbar0,
                              int j_max) {
  if (j_max < 0) {
    throw std::invalid_argument("comparison_process: j_max must be >= 0");
  }
  if (rbar0.norm() == 0.0) {
    SolveTrace trace;
    trace.r0 = rbar0;
    trace.x_final = Matrix::Zero(rbar0.rows(), rbar0.cols());
    trace.rnorm.assign(static_cast<size_t>(j_max) + 1, 0.0);
    trace.converged = true;
    trace.reason = StopReason::converged;
    return trace;
  }
  SolveOptions opts;
  opts.max_m = j_max;
  opts.tol = 0.0;
  opts.min_m = j_max;
  opts.reorth = true;
  return block_cg_solve(a, rbar0, Matrix::Zero(rbar0.rows(), rbar0.cols()),
                        opts);
}

}  // namespace blockcg
