#include "blockcg/lanczos.hpp"

#include <cmath>
#include <stdexcept>

namespace blockcg {

Matrix BlockTridiagonal::assemble(int m) const {
  if (m < 1 || m > steps()) {
    throw std::out_of_range("BlockTridiagonal::assemble: bad step count");
  }
  const int s = block_size;
  Matrix t = Matrix::Zero(static_cast<Eigen::Index>(m) * s,
                          static_cast<Eigen::Index>(m) * s);
  for (int i = 0; i < m; ++i) {
    t.block(i * s, i * s, s, s) = diag[i];
    if (i + 1 < m) {
      t.block((i + 1) * s, i * s, s, s) = sub[i];
      t.block(i * s, (i + 1) * s, s, s) = sub[i].transpose();
    }
  }
  return t;
}

Matrix LanczosState::basis_matrix(int m) const {
  if (m < 1 || m > static_cast<int>(basis.size())) {
    throw std::out_of_range("LanczosState::basis_matrix: bad step count");
  }
  const Eigen::Index n = basis[0].rows();
  const int s = block_size();
  Matrix w(n, static_cast<Eigen::Index>(m) * s);
  for (int i = 0; i < m; ++i) {
    w.middleCols(static_cast<Eigen::Index>(i) * s, s) = basis[i];
  }
  return w;
}

LanczosState lanczos_init(const SpdOperator& a, const Matrix& r0,
                          bool reorth) {
  if (r0.rows() != a.entries().rows() || r0.cols() < 1) {
    throw DimensionMismatch("lanczos_init: starting block shape");
  }
  if (!r0.allFinite()) {
    throw std::invalid_argument("lanczos_init: nonfinite starting block");
  }
  QrTallResult qr = qr_tall(r0);
  if (qr.rank_deficient()) {
    throw RankDeficient(qr.deficient_col, qr.deficient_pivot);
  }
  LanczosState state;
  state.reorth = reorth;
  state.tm.block_size = static_cast<int>(r0.cols());
  state.tm.b0 = std::move(qr.r);
  state.basis.push_back(std::move(qr.q));
  return state;
}

void lanczos_step(LanczosState& state, const SpdOperator& a) {
  if (state.breakdown) {
    throw std::logic_error("lanczos_step after breakdown");
  }
  const int i = state.steps();
  const Matrix& ui = state.basis[i];
  Matrix aui = a.apply(ui);
  Matrix diag_i = ui.transpose() * aui;
  diag_i = 0.5 * (diag_i + diag_i.transpose());

  Matrix m = aui - ui * diag_i;
  if (i > 0) {
    m.noalias() -= state.basis[i - 1] * state.tm.sub[i - 1].transpose();
  }
  if (state.reorth) {
    // Two classical Gram-Schmidt passes against the whole basis.
    for (int pass = 0; pass < 2; ++pass) {
      for (const Matrix& u : state.basis) {
        m.noalias() -= u * (u.transpose() * m);
      }
    }
  }

  state.tm.diag.push_back(std::move(diag_i));

  // Columns of M below the roundoff of ||A U_i|| mean the Krylov space has
  // become invariant; the relative QR threshold alone cannot see that.
  const double mscale = m.norm();
  if (mscale <= 1e-13 * aui.norm()) {
    state.breakdown = BreakdownRecord{i, mscale};
    return;
  }
  QrTallResult qr = qr_tall(m);
  if (qr.rank_deficient()) {
    state.breakdown = BreakdownRecord{i, qr.deficient_pivot};
    return;
  }
  state.tm.sub.push_back(std::move(qr.r));
  state.basis.push_back(std::move(qr.q));
}

RitzSet ritz(const LanczosState& state, int m) {
  if (m < 1 || m > state.steps()) {
    throw std::out_of_range("ritz: bad step count");
  }
  SpectralDecomposition eig = sym_eig(state.tm.assemble(m));
  RitzSet rs;
  rs.step = m;
  rs.values = std::move(eig.eigenvalues);
  rs.vectors = state.basis_matrix(m) * eig.eigenvectors;
  return rs;
}

RitzSet ritz(const LanczosState& state) { return ritz(state, state.steps()); }

KrylovBasis krylov_basis(const SpdOperator& a, const Matrix& r0, int j) {
  if (j < 1) {
    throw std::invalid_argument("krylov_basis: j must be >= 1");
  }
  LanczosState state = lanczos_init(a, r0, true);
  for (int step = 0; step + 1 < j && !state.breakdown; ++step) {
    lanczos_step(state, a);
  }
  KrylovBasis kb;
  kb.block_size = state.block_size();
  const int blocks = static_cast<int>(state.basis.size());
  kb.q = state.basis_matrix(blocks);
  kb.truncated = blocks < j;
  return kb;
}

}  // namespace blockcg
