#include "blockcg/bounds.hpp"

#include <cmath>
#include <limits>

namespace blockcg {

DeflationTarget make_deflation_target(const SpectralDecomposition& eig, int k1,
                                      int k2) {
  const Eigen::Index n = eig.eigenvalues.size();
  if (k1 < 0 || k2 < 0 || k1 + k2 < 1 || k1 + k2 > n) {
    throw DimensionMismatch("deflation target needs 1 <= k1 + k2 <= n");
  }
  DeflationTarget t;
  t.k1 = k1;
  t.k2 = k2;
  t.lambdas = eig.eigenvalues;
  t.q.resize(n, k1 + k2);
  t.q.leftCols(k1) = eig.eigenvectors.leftCols(k1);
  t.q.rightCols(k2) = eig.eigenvectors.rightCols(k2);
  return t;
}

Matrix ritz_subspace_y(const SpdOperator& a, const RitzSet& rs,
                       const DeflationTarget& target) {
  const Eigen::Index total = rs.values.size();
  const int k = target.k1 + target.k2;
  if (total < k) {
    throw InsufficientRitz("step " + std::to_string(rs.step) + " provides " +
                           std::to_string(total) + " Ritz pairs, need " +
                           std::to_string(k));
  }
  Matrix z(rs.vectors.rows(), k);
  z.leftCols(target.k1) = rs.vectors.leftCols(target.k1);
  z.rightCols(target.k2) = rs.vectors.rightCols(target.k2);
  return a.apply(z);
}

double subspace_gap(const SpdOperator& a, const Matrix& y, const Matrix& q) {
  if (y.cols() != q.cols() || y.rows() != q.rows()) {
    throw DimensionMismatch("subspace_gap requires equal-dimension bases");
  }
  QrTallResult qy = qr_tall(a.half_solve(y));
  if (qy.rank_deficient()) {
    throw RankCollapse("mapped Y basis, column " +
                       std::to_string(qy.deficient_col));
  }
  QrTallResult qq = qr_tall(a.half_solve(q));
  if (qq.rank_deficient()) {
    throw RankCollapse("mapped Q basis, column " +
                       std::to_string(qq.deficient_col));
  }
  Matrix gram = qy.q.transpose() * qq.q;
  Eigen::JacobiSVD<Matrix> svd(gram);
  const double smin = svd.singularValues().minCoeff();
  const double gap2 = 1.0 - smin * smin;
  return std::min(1.0, std::sqrt(std::max(0.0, gap2)));
}

double subspace_gap_crosscheck(const SpdOperator& a, const Matrix& y,
                               const Matrix& q) {
  if (y.cols() != q.cols() || y.rows() != q.rows()) {
    throw DimensionMismatch("subspace_gap requires equal-dimension bases");
  }
  const Eigen::Index n = y.rows();
  QrTallResult qy = qr_tall(a.half_solve(y));
  if (qy.rank_deficient()) {
    throw RankCollapse("mapped Y basis, column " +
                       std::to_string(qy.deficient_col));
  }
  // A^{-1}-orthonormal basis of range(Y) and the explicit projector
  // P_Y = Yhat (Yhat^T A^{-1} .) = Yhat Qy^T L^{-1}.
  Matrix yhat = a.chol() * qy.q;
  Matrix lt_inv_qy =
      a.chol().transpose().triangularView<Eigen::Upper>().solve(qy.q);
  Matrix proj_y = yhat * lt_inv_qy.transpose();
  Matrix m = (Matrix::Identity(n, n) - proj_y) * (q * q.transpose());
  return op_norm_ainv(a, m);
}

AlphaFactor alpha_factor(const Vector& lambdas, const RitzSet& rs, int k1,
                         int k2, bool multiplicity_mode) {
  const Eigen::Index n = lambdas.size();
  const Eigen::Index total = rs.values.size();
  if (k1 < 0 || k2 < 0 || k1 + k2 < 1) {
    throw DimensionMismatch("alpha_factor needs k1 + k2 >= 1");
  }
  if (total < k1 + k2) {
    throw InsufficientRitz("alpha_factor: " + std::to_string(total) +
                           " Ritz values, need " + std::to_string(k1 + k2));
  }
  if (n < k1 + k2 + 1) {
    throw DimensionMismatch("alpha_factor: spectrum too small");
  }

  const double span = lambdas(n - 1) - lambdas(0);
  const auto deflated = [&](double lam) {
    for (int j = 0; j < k1; ++j) {
      if (lam == lambdas(j)) return true;
    }
    for (int j = 0; j < k2; ++j) {
      if (lam == lambdas(n - 1 - j)) return true;
    }
    return false;
  };

  AlphaFactor out;
  out.min_denominator = std::numeric_limits<double>::infinity();

  // Comparison eigenvalues for both partial products run over the
  // non-deflated indices k1..n-1-k2; the two maxima are independent.
  double lower_best = k1 > 0 ? -std::numeric_limits<double>::infinity() : 1.0;
  double upper_best = k2 > 0 ? -std::numeric_limits<double>::infinity() : 1.0;
  for (Eigen::Index idx = k1; idx < n - k2; ++idx) {
    const double lam = lambdas(idx);
    if (deflated(lam)) continue;
    if (k1 > 0) {
      double prod = 1.0;
      for (int j = 0; j < k1; ++j) {
        const double lam_j = multiplicity_mode ? lambdas(0) : lambdas(j);
        const double theta_j = rs.values(j);
        const double den = std::abs(lam - theta_j);
        if (den == 0.0) throw DegenerateDenominator();
        out.min_denominator = std::min(out.min_denominator, den);
        prod *= (theta_j / lam_j) * std::abs(lam - lam_j) / den;
      }
      lower_best = std::max(lower_best, prod);
    }
    if (k2 > 0) {
      double prod = 1.0;
      for (int j = 0; j < k2; ++j) {
        const double lam_j = lambdas(n - 1 - j);
        const double theta_j = rs.values(total - 1 - j);
        const double den = std::abs(theta_j - lam);
        if (den == 0.0) throw DegenerateDenominator();
        out.min_denominator = std::min(out.min_denominator, den);
        prod *= (theta_j / lam_j) * std::abs(lam_j - lam) / den;
      }
      upper_best = std::max(upper_best, prod);
    }
  }
  if (!std::isfinite(lower_best) || !std::isfinite(upper_best)) {
    throw DegenerateDenominator();
  }

  out.value = lower_best * upper_best;
  out.unreliable =
      out.min_denominator < 1e-14 * span || out.value >= 1e3;
  return out;
}

SubspaceBoundSeries subspace_bound_series(const SpdOperator& a,
                                          const Matrix& r_m,
                                          const DeflationTarget& target,
                                          double gap, int j_max) {
  if (j_max < 0) {
    throw std::invalid_argument("subspace_bound_series: j_max must be >= 0");
  }
  const int s = static_cast<int>(r_m.cols());
  SpectralProjector proj(target.q);
  SubspaceBoundSeries out;
  out.gap = gap;

  const Matrix pr = proj.apply(r_m);
  const Matrix cr = r_m - pr;
  const auto record = [&](const Matrix& d_star) {
    Matrix resid = r_m - d_star;
    Matrix p = proj.apply(resid);
    const double n_comp = ainvf_norm(a, resid - p);
    const double n_proj = ainvf_norm(a, p);
    out.b1.push_back(n_comp + gap * n_proj);
    out.b1_ls_sqrt2.push_back(std::sqrt(2.0) *
                              std::sqrt(n_comp * n_comp +
                                        gap * gap * n_proj * n_proj));
    out.d_star.push_back(d_star);
  };

  record(Matrix::Zero(r_m.rows(), s));  // j = 0 admits only D = 0
  if (j_max == 0) return out;

  KrylovBasis kb = krylov_basis(a, r_m, j_max);
  out.krylov_truncated = kb.truncated;
  const Matrix av = a.apply(kb.q);
  const Matrix av_proj = proj.apply(av);
  const Matrix top_cols = a.half_solve(av - av_proj);
  const Matrix bottom_cols = a.half_solve(av_proj);
  const Matrix rhs_top = a.half_solve(cr);
  const Matrix rhs_bottom = a.half_solve(pr);
  Matrix rhs(2 * r_m.rows(), s);
  rhs.topRows(r_m.rows()) = rhs_top;
  rhs.bottomRows(r_m.rows()) = gap * rhs_bottom;

  for (int j = 1; j <= j_max; ++j) {
    const Eigen::Index width =
        std::min<Eigen::Index>(static_cast<Eigen::Index>(j) * s, av.cols());
    Matrix stacked(2 * r_m.rows(), width);
    stacked.topRows(r_m.rows()) = top_cols.leftCols(width);
    stacked.bottomRows(r_m.rows()) = gap * bottom_cols.leftCols(width);
    LeastSquaresResult ls = least_squares_full(stacked, rhs);
    if (ls.rank < width) out.ls_rank_deficient = true;
    record(av.leftCols(width) * ls.coeff);
  }
  return out;
}

SpectralBoundSeries spectral_bound_series(const SpdOperator& a,
                                          const Matrix& r_m,
                                          const DeflationTarget& target,
                                          const AlphaFactor& alpha,
                                          int j_max) {
  SpectralProjector proj(target.q);
  SolveTrace comp = comparison_process(a, proj.complement(r_m), j_max);
  SpectralBoundSeries out;
  out.alpha = alpha;
  out.comparison = comp.rnorm;
  if (static_cast<int>(out.comparison.size()) < j_max + 1) {
    // Breakdown ended the comparison early; its residual no longer changes.
    out.comparison_truncated = true;
    out.comparison.resize(static_cast<size_t>(j_max) + 1,
                          out.comparison.back());
  }
  out.b2.reserve(out.comparison.size());
  for (double c : out.comparison) {
    out.b2.push_back(alpha.value * c);
  }
  return out;
}

double trace_identity_gap(const SpdOperator& a,
                          const SpectralDecomposition& eig,
                          const Matrix& r_m) {
  const double norm = ainvf_norm(a, r_m);
  const double lhs = norm * norm;
  const Matrix g = eig.eigenvectors.transpose() * r_m;
  double rhs = 0.0;
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    rhs += g.row(i).squaredNorm() / eig.eigenvalues(i);
  }
  const double scale = std::max({lhs, rhs, 1e-300});
  return std::abs(lhs - rhs) / scale;
}

BoundSeries evaluate_bounds(const SpdOperator& a, const SolveTrace& solve,
                            const SpectralDecomposition& eig,
                            const BoundConfig& cfg) {
  const SolveCheckpoint* cp = solve.checkpoint(cfg.m);
  if (cp == nullptr) {
    throw std::invalid_argument("evaluate_bounds: no checkpoint at m = " +
                                std::to_string(cfg.m));
  }
  DeflationTarget target = make_deflation_target(eig, cfg.k1, cfg.k2);
  RitzSet rs = ritz(solve.lanczos, cfg.m);

  BoundSeries out;
  out.config = cfg;

  Matrix y = ritz_subspace_y(a, rs, target);
  out.gamma_m = subspace_gap(a, y, target.q);

  SubspaceBoundSeries sb =
      subspace_bound_series(a, cp->residual, target, out.gamma_m, cfg.j_max);
  out.b1 = std::move(sb.b1);
  out.b1_ls_sqrt2 = std::move(sb.b1_ls_sqrt2);
  out.krylov_truncated = sb.krylov_truncated;
  out.ls_rank_deficient = sb.ls_rank_deficient;

  AlphaFactor af =
      alpha_factor(target.lambdas, rs, cfg.k1, cfg.k2, cfg.multiplicity_mode);
  out.alpha = af.value;
  out.alpha_unreliable = af.unreliable;

  SpectralBoundSeries spec =
      spectral_bound_series(a, cp->residual, target, af, cfg.j_max);
  out.comparison = std::move(spec.comparison);
  out.b2 = std::move(spec.b2);
  out.comparison_truncated = spec.comparison_truncated;

  out.actual.reserve(static_cast<size_t>(cfg.j_max) + 1);
  for (int j = 0; j <= cfg.j_max; ++j) {
    const int step = cfg.m + j;
    if (step <= solve.steps()) {
      out.actual.push_back(solve.rnorm[step]);
    } else {
      out.actual.push_back(solve.rnorm.back());
      out.actual_truncated = true;
    }
  }
  return out;
}

}  // namespace blockcg
