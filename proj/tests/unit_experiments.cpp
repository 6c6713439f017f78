#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "blockcg/experiments.hpp"

using namespace blockcg;

TEST_CASE("experiment spectra match their published recipes") {
  Vector ex41 = ex41_spectrum();
  REQUIRE(ex41.size() == 100);
  CHECK(ex41(0) == 0.1);
  CHECK(ex41(3) == 0.4);
  CHECK(ex41(4) == 5.0);
  CHECK(ex41(99) == 100.0);
  CHECK(ex41(5) - ex41(4) == doctest::Approx(1.0));

  Vector iso = isolated_spectrum();
  REQUIRE(iso.size() == 404);
  CHECK(iso(0) == 0.0005);
  CHECK(iso(1) == 0.08);
  CHECK(iso(403) == 2.42);

  SpdOperator clustered = clustered_spectrum();
  REQUIRE(clustered.dim() == 404);
  const auto diag = clustered.entries().diagonal();
  CHECK(diag(0) == 0.0005);
  CHECK(diag(5) == 0.0055);
  CHECK(diag(6) == 0.08);
  CHECK(diag(6) / diag(5) == doctest::Approx(0.08 / 0.0055));

  SpdOperator mult = multiplicity_spectrum();
  REQUIRE(mult.dim() == 384);
  const auto md = mult.entries().diagonal();
  for (int i = 0; i < 5; ++i) CHECK(md(i) == 0.0005);
  CHECK(md(5) == 0.065);
  CHECK(md(383) == 5.42);
  CHECK(md(6) - md(5) == doctest::Approx((5.42 - 0.065) / 378));
}

TEST_CASE("spectrum_matrix validates positivity and handles the 1x1 case") {
  Vector bad(2);
  bad << 1.0, -0.5;
  CHECK_THROWS_AS(spectrum_matrix(bad), NonPositiveValue);

  Vector one(1);
  one << 1.0;
  SpdOperator a = spectrum_matrix(one);
  SolveOptions opts;
  opts.max_m = 2;
  opts.tol = 1e-12;
  SolveTrace tr = block_cg_solve(a, Matrix::Ones(1, 1), Matrix::Zero(1, 1),
                                 opts);
  CHECK(tr.converged);
  CHECK(tr.steps() == 1);
}

TEST_CASE("poisson2d smallest stencil and size") {
  Matrix a = poisson2d(2);
  REQUIRE(a.rows() == 4);
  Matrix expected(4, 4);
  expected << 4, -1, -1, 0,
              -1, 4, 0, -1,
              -1, 0, 4, -1,
              0, -1, -1, 4;
  CHECK((a - expected).norm() == 0.0);
  CHECK(poisson2d(20).rows() == 400);
}

TEST_CASE("poisson2d spectrum matches the closed form") {
  const int g = 20;
  Matrix a = poisson2d(g);
  SpectralDecomposition eig = sym_eig(a);
  std::vector<double> expected;
  expected.reserve(g * g);
  for (int i = 1; i <= g; ++i) {
    for (int j = 1; j <= g; ++j) {
      expected.push_back(4.0 - 2.0 * std::cos(i * std::numbers::pi / (g + 1)) -
                         2.0 * std::cos(j * std::numbers::pi / (g + 1)));
    }
  }
  std::sort(expected.begin(), expected.end());
  for (int i = 0; i < g * g; ++i) {
    CHECK(std::abs(eig.eigenvalues(i) - expected[i]) <= 1e-10);
  }
}

TEST_CASE("ic0 equals the exact factor when no fill can occur") {
  Matrix d = Matrix::Zero(4, 4);
  d.diagonal() << 1.0, 4.0, 9.0, 16.0;
  Matrix ld = ic0(d);
  CHECK((ld - cholesky_factor(d)).norm() == 0.0);

  Matrix tri = Matrix::Zero(5, 5);
  tri.diagonal().setConstant(2.0);
  for (int i = 0; i + 1 < 5; ++i) {
    tri(i, i + 1) = -1.0;
    tri(i + 1, i) = -1.0;
  }
  CHECK((ic0(tri) - cholesky_factor(tri)).norm() <= 1e-14);
}

TEST_CASE("ic0 reproduces the matrix on its own pattern") {
  Matrix a = poisson2d(20);
  Matrix l = ic0(a);
  Matrix rebuilt = l * l.transpose();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      if (a(i, j) != 0.0) {
        CHECK(std::abs(rebuilt(i, j) - a(i, j)) <= 1e-12);
      }
      // No fill outside the pattern.
      if (a(i, j) == 0.0) CHECK(l(i, j) == 0.0);
    }
  }
}

TEST_CASE("preconditioning with the exact factor yields the identity") {
  Matrix a = poisson2d(5);
  Matrix l = cholesky_factor(a);
  SpdOperator pre = preconditioned_operator(a, l);
  CHECK((pre.entries() - Matrix::Identity(25, 25)).norm() <= 1e-10);
}

TEST_CASE("ic0 preconditioning shrinks the condition number") {
  Matrix a = poisson2d(20);
  SpdOperator pre = preconditioned_operator(a, ic0(a));
  SpectralDecomposition plain = sym_eig(a);
  SpectralDecomposition tilde = sym_eig(pre.entries());
  const double cond_plain =
      plain.eigenvalues(399) / plain.eigenvalues(0);
  const double cond_tilde =
      tilde.eigenvalues(399) / tilde.eigenvalues(0);
  CHECK(cond_tilde < 0.25 * cond_plain);
}

TEST_CASE("superlinearity onset detector") {
  std::vector<double> geometric;
  double v = 1.0;
  for (int i = 0; i < 30; ++i) {
    geometric.push_back(v);
    v *= 0.5;
  }
  CHECK_FALSE(superlinearity_onset(geometric, 3).has_value());

  const double q = 0.9;
  for (int window : {2, 3, 4}) {
    std::vector<double> accel;
    for (int m = 0; m < 20; ++m) {
      accel.push_back(std::pow(q, static_cast<double>(m) * m));
    }
    auto onset = superlinearity_onset(accel, window);
    REQUIRE(onset.has_value());
    CHECK(*onset == window);
  }
}

TEST_CASE("scenario registry resolves ids and block sizes") {
  CHECK(scenario_ids().size() == 6);
  Scenario ex44 = make_scenario("ex4.4", 8);
  CHECK(ex44.s == 8);
  REQUIRE_FALSE(ex44.bound_grid.empty());
  CHECK(ex44.bound_grid[0].k1 == 6);

  Scenario ex41 = make_scenario("ex4.1");
  CHECK(ex41.s == 1);
  CHECK(ex41.n == 100);

  CHECK_THROWS_AS(make_scenario("ex9.9"), std::invalid_argument);
}

TEST_CASE("run_scenario produces aligned series and provenance") {
  Vector spectrum = Vector::LinSpaced(24, 0.5, 12.0);
  Scenario sc = custom_spectrum_scenario(spectrum, 2,
                                         {{3, 2, 1, 0, false}});
  sc.seed = 7;
  RunOptions opts;
  opts.record_ritz_extremes = true;
  RunArtifact art = run_scenario(sc, opts);

  CHECK(art.version == std::string("0.1.0"));
  CHECK(art.errors.empty());
  REQUIRE(art.bounds.size() == 1);
  const BoundSeries& b = art.bounds[0];
  REQUIRE(b.actual.size() == 3);
  CHECK(b.actual[0] == art.trace.rnorm[3]);
  CHECK(art.trace.theta_min.size() == static_cast<size_t>(art.trace.steps()));

  // Same seed, same run.
  RunArtifact again = run_scenario(sc, opts);
  CHECK(again.trace.rnorm == art.trace.rnorm);
}

TEST_CASE("run_scenario records per-config failures without aborting") {
  Vector spectrum = Vector::LinSpaced(12, 1.0, 4.0);
  Scenario sc = custom_spectrum_scenario(
      spectrum, 1, {{2, 1, 1, 0, false}, {500, 0, 1, 0, false}});
  RunArtifact art = run_scenario(sc, RunOptions{false, 3});
  CHECK(art.bounds.size() == 1);
  REQUIRE(art.errors.size() == 1);
  CHECK(art.errors[0].entry.m == 500);
}
