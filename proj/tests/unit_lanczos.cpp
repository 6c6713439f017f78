#include <doctest.h>

#include <random>

#include "blockcg/experiments.hpp"
#include "blockcg/lanczos.hpp"

using namespace blockcg;

namespace {

Matrix seeded_matrix(int rows, int cols, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) m(r, c) = normal(rng);
  return m;
}

SpdOperator seeded_spd(int n, unsigned seed) {
  Matrix g = seeded_matrix(n, n, seed);
  return SpdOperator(g.transpose() * g + Matrix::Identity(n, n));
}

}  // namespace

TEST_CASE("lanczos_init basic factorizations") {
  SpdOperator a = seeded_spd(4, 1);
  Matrix q0(4, 2);
  q0 << 1, 0, 0, 1, 0, 0, 0, 0;
  LanczosState st = lanczos_init(a, q0);
  CHECK((st.basis[0] - q0).norm() <= 1e-14);
  CHECK((st.tm.b0 - Matrix::Identity(2, 2)).norm() <= 1e-14);
  CHECK(st.steps() == 0);

  Matrix v(2, 1);
  v << 3.0, 4.0;
  SpdOperator a2(Matrix::Identity(2, 2) * 2.0);
  LanczosState st2 = lanczos_init(a2, v);
  CHECK(st2.basis[0](0, 0) == doctest::Approx(0.6));
  CHECK(st2.basis[0](1, 0) == doctest::Approx(0.8));
  CHECK(st2.tm.b0(0, 0) == doctest::Approx(5.0));
}

TEST_CASE("lanczos_init of the all-ones vector on the experiment matrix") {
  SpdOperator a = spectrum_matrix(ex41_spectrum());
  LanczosState st = lanczos_init(a, Matrix::Ones(100, 1));
  CHECK(st.tm.b0(0, 0) == doctest::Approx(10.0));
}

TEST_CASE("lanczos_init rejects dependent columns") {
  SpdOperator a = seeded_spd(4, 2);
  Matrix r0(4, 2);
  r0.col(0) << 1, 2, 3, 4;
  r0.col(1) = 3.0 * r0.col(0);
  CHECK_THROWS_AS(lanczos_init(a, r0), RankDeficient);
}

TEST_CASE("lanczos_step breaks down immediately on the identity") {
  SpdOperator a(Matrix::Identity(5, 5));
  LanczosState st = lanczos_init(a, seeded_matrix(5, 2, 3));
  lanczos_step(st, a);
  REQUIRE(st.breakdown.has_value());
  CHECK(st.breakdown->step == 0);
  CHECK(st.steps() == 1);  // the diagonal block is still recorded
  CHECK_THROWS_AS(lanczos_step(st, a), std::logic_error);
}

TEST_CASE("lanczos_step first diagonal block is u'Au") {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  SpdOperator a(d);
  Matrix r0(2, 1);
  r0 << 1.0, 1.0;
  LanczosState st = lanczos_init(a, r0);
  lanczos_step(st, a);
  CHECK(st.tm.diag[0](0, 0) == doctest::Approx(1.5));
}

TEST_CASE("lanczos relation and basis orthonormality hold at every step") {
  SpdOperator a = seeded_spd(18, 5);
  const double anorm = a.entries().operatorNorm();
  Matrix r0 = seeded_matrix(18, 3, 6);
  LanczosState st = lanczos_init(a, r0);
  for (int step = 0; step < 5; ++step) {
    lanczos_step(st, a);
    REQUIRE_FALSE(st.breakdown.has_value());
    const int m = st.steps();
    Matrix w = st.basis_matrix(m);
    CHECK((w.transpose() * w - Matrix::Identity(3 * m, 3 * m)).norm() <= 1e-8);
    Matrix lhs = a.apply(w);
    Matrix rhs = w * st.tm.assemble(m);
    Matrix remainder = Matrix::Zero(18, 3 * m);
    remainder.rightCols(3) = st.basis[m] * st.tm.sub[m - 1];
    CHECK((lhs - rhs - remainder).norm() <= 1e-9 * anorm * w.norm());
  }
}

TEST_CASE("ritz values equal eigenvalues once the space is exhausted") {
  SpdOperator a = seeded_spd(12, 9);
  Matrix r0 = seeded_matrix(12, 3, 10);
  LanczosState st = lanczos_init(a, r0);
  for (int step = 0; step < 4; ++step) lanczos_step(st, a);
  // 4 blocks of 3 span all of R^12; the last step records the breakdown.
  REQUIRE(st.steps() == 4);
  CHECK(st.breakdown.has_value());
  RitzSet rs = ritz(st);
  SpectralDecomposition eig = sym_eig(a.entries());
  CHECK((rs.values - eig.eigenvalues).cwiseAbs().maxCoeff() <= 1e-8);
  for (Eigen::Index i = 0; i < rs.vectors.cols(); ++i) {
    CHECK(rs.vectors.col(i).norm() == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("ritz interlacing stays inside the spectrum") {
  SpdOperator a = seeded_spd(16, 12);
  SpectralDecomposition eig = sym_eig(a.entries());
  Matrix r0 = seeded_matrix(16, 2, 13);
  LanczosState st = lanczos_init(a, r0);
  for (int step = 0; step < 5; ++step) {
    lanczos_step(st, a);
    RitzSet rs = ritz(st);
    CHECK(rs.values(0) >= eig.eigenvalues(0) - 1e-10);
    CHECK(rs.values(rs.values.size() - 1) <=
          eig.eigenvalues(eig.eigenvalues.size() - 1) + 1e-10);
  }
}

TEST_CASE("krylov_basis trivial and breakdown cases") {
  SpdOperator a = seeded_spd(6, 14);
  Matrix r0 = seeded_matrix(6, 2, 15);
  KrylovBasis kb1 = krylov_basis(a, r0, 1);
  CHECK((kb1.q - qr_tall(r0).q).norm() <= 1e-14);
  CHECK_FALSE(kb1.truncated);

  Matrix d = Matrix::Zero(4, 4);
  d.diagonal() << 1, 2, 3, 4;
  SpdOperator diag_a{Matrix(d)};
  Matrix e1 = Matrix::Zero(4, 1);
  e1(0, 0) = 1.0;
  KrylovBasis kb = krylov_basis(diag_a, e1, 3);
  CHECK(kb.truncated);
  CHECK(kb.q.cols() == 1);
  CHECK(std::abs(kb.q(0, 0)) == doctest::Approx(1.0));
}

TEST_CASE("krylov_basis spans the explicitly stacked powers") {
  SpdOperator a = seeded_spd(10, 16);
  Matrix r0 = seeded_matrix(10, 2, 17);
  KrylovBasis kb = krylov_basis(a, r0, 3);
  REQUIRE(kb.q.cols() == 6);

  Matrix stacked(10, 6);
  stacked.leftCols(2) = r0;
  stacked.middleCols(2, 2) = a.apply(r0);
  stacked.rightCols(2) = a.apply(a.apply(r0));

  // Same column space: projecting the stack onto the basis loses nothing,
  // and the combined matrix has rank 6.
  Matrix proj = kb.q * (kb.q.transpose() * stacked);
  CHECK((proj - stacked).norm() <= 1e-9 * stacked.norm());
  Matrix combined(10, 12);
  combined << kb.q, stacked;
  Eigen::ColPivHouseholderQR<Matrix> qr(combined);
  CHECK(qr.rank() == 6);
}
