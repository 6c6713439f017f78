#include "blockcg/linalg.hpp"

#include <cmath>

namespace blockcg {

SpdOperator::SpdOperator(Matrix entries) {
  if (entries.rows() != entries.cols() || entries.rows() == 0) {
    throw DimensionMismatch("SpdOperator requires a nonempty square matrix");
  }
  const double scale = entries.norm();
  const double asym = (entries - entries.transpose()).norm();
  input_asymmetric_ = scale > 0 && asym > 1e-12 * scale;
  entries_ = 0.5 * (entries + entries.transpose());
  chol_ = cholesky_factor(entries_);
}

Matrix SpdOperator::apply(const Matrix& v) const {
  if (v.rows() != entries_.rows()) {
    throw DimensionMismatch("operator apply: row count");
  }
  return entries_ * v;
}

Matrix SpdOperator::solve(const Matrix& v) const {
  if (v.rows() != entries_.rows()) {
    throw DimensionMismatch("operator solve: row count");
  }
  Matrix y = chol_.triangularView<Eigen::Lower>().solve(v);
  return chol_.transpose().triangularView<Eigen::Upper>().solve(y);
}

Matrix SpdOperator::half_solve(const Matrix& v) const {
  if (v.rows() != entries_.rows()) {
    throw DimensionMismatch("operator half_solve: row count");
  }
  return chol_.triangularView<Eigen::Lower>().solve(v);
}

Matrix cholesky_factor(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw DimensionMismatch("cholesky_factor requires a square matrix");
  }
  const Eigen::Index n = a.rows();
  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double d = a(j, j) - l.row(j).head(j).squaredNorm();
    if (!(d > 0.0)) {
      throw NotPositiveDefinite(static_cast<int>(j));
    }
    l(j, j) = std::sqrt(d);
    const Eigen::Index below = n - j - 1;
    if (below > 0) {
      l.col(j).tail(below) =
          (a.col(j).tail(below) -
           l.bottomLeftCorner(below, j) * l.row(j).head(j).transpose()) /
          l(j, j);
    }
  }
  return l;
}

QrTallResult qr_tall(const Matrix& m) {
  const Eigen::Index rows = m.rows();
  const Eigen::Index cols = m.cols();
  if (cols < 1 || rows < cols) {
    throw DimensionMismatch("qr_tall requires n >= s >= 1");
  }
  Eigen::HouseholderQR<Matrix> qr(m);
  QrTallResult out;
  out.q = qr.householderQ() * Matrix::Identity(rows, cols);
  out.r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < cols; ++i) {
    if (out.r(i, i) < 0) {
      out.r.row(i) = -out.r.row(i);
      out.q.col(i) = -out.q.col(i);
    }
  }
  const double scale = m.norm();
  for (Eigen::Index i = 0; i < cols; ++i) {
    if (std::abs(out.r(i, i)) <= 1e-13 * scale) {
      out.deficient_col = static_cast<int>(i);
      out.deficient_pivot = std::abs(out.r(i, i));
      break;
    }
  }
  return out;
}

SpectralDecomposition sym_eig(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionMismatch("sym_eig requires a nonempty square matrix");
  }
  Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success) {
    throw NoConvergence(-1);
  }
  return SpectralDecomposition{es.eigenvalues(), es.eigenvectors()};
}

double ainvf_inner(const SpdOperator& a, const Matrix& v, const Matrix& w) {
  if (v.rows() != w.rows() || v.cols() != w.cols() ||
      v.rows() != a.entries().rows()) {
    throw DimensionMismatch("ainvf_inner requires conforming n x s blocks");
  }
  return a.half_solve(v).cwiseProduct(a.half_solve(w)).sum();
}

double ainvf_norm(const SpdOperator& a, const Matrix& v) {
  if (v.rows() != a.entries().rows()) {
    throw DimensionMismatch("ainvf_norm: row count");
  }
  return a.half_solve(v).norm();
}

LeastSquaresResult least_squares_full(const Matrix& m, const Matrix& b) {
  if (m.rows() < m.cols()) {
    throw DimensionMismatch("least_squares requires p >= q");
  }
  if (m.rows() != b.rows()) {
    throw DimensionMismatch("least_squares: row count");
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(m);
  return LeastSquaresResult{qr.solve(b), qr.rank()};
}

Matrix least_squares(const Matrix& m, const Matrix& b) {
  return least_squares_full(m, b).coeff;
}

double op_norm_ainv(const SpdOperator& a, const Matrix& m) {
  if (m.rows() != a.entries().rows() || m.cols() != a.entries().cols()) {
    throw DimensionMismatch("op_norm_ainv requires an n x n matrix");
  }
  Matrix x = a.half_solve(m) * a.chol();
  Eigen::BDCSVD<Matrix> svd(x);
  return svd.singularValues()(0);
}

}  // namespace blockcg
