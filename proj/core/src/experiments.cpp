#include "blockcg/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "blockcg/version.hpp"

namespace blockcg {

SpdOperator spectrum_matrix(const Vector& values) {
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (!(values(i) > 0.0)) {
      throw NonPositiveValue(static_cast<int>(i), values(i));
    }
  }
  return SpdOperator(Matrix(values.asDiagonal()));
}

Vector ex41_spectrum() {
  Vector v(100);
  v.head(4) << 0.1, 0.2, 0.3, 0.4;
  v.tail(96) = Vector::LinSpaced(96, 5.0, 100.0);
  return v;
}

Vector isolated_spectrum() {
  Vector v(404);
  v(0) = 0.0005;
  v.tail(403) = Vector::LinSpaced(403, 0.08, 2.42);
  return v;
}

SpdOperator clustered_spectrum() {
  Vector v(404);
  v.head(6) << 0.0005, 0.0015, 0.0025, 0.0035, 0.0045, 0.0055;
  v.tail(398) = Vector::LinSpaced(398, 0.08, 2.42);
  return spectrum_matrix(v);
}

SpdOperator multiplicity_spectrum() {
  Vector v(384);
  v.head(5).setConstant(0.0005);
  v.tail(379) = Vector::LinSpaced(379, 0.065, 5.42);
  return spectrum_matrix(v);
}

Matrix poisson2d(int g) {
  if (g < 2) {
    throw std::invalid_argument("poisson2d: grid must be >= 2");
  }
  const int n = g * g;
  Matrix a = Matrix::Zero(n, n);
  for (int r = 0; r < g; ++r) {
    for (int c = 0; c < g; ++c) {
      const int idx = r * g + c;
      a(idx, idx) = 4.0;
      if (c + 1 < g) {
        a(idx, idx + 1) = -1.0;
        a(idx + 1, idx) = -1.0;
      }
      if (r + 1 < g) {
        a(idx, idx + g) = -1.0;
        a(idx + g, idx) = -1.0;
      }
    }
  }
  return a;
}

Matrix ic0(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw DimensionMismatch("ic0 requires a square matrix");
  }
  const Eigen::Index n = a.rows();
  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double d = a(k, k) - l.row(k).head(k).squaredNorm();
    if (!(d > 0.0)) {
      throw PivotLoss(static_cast<int>(k));
    }
    l(k, k) = std::sqrt(d);
    for (Eigen::Index i = k + 1; i < n; ++i) {
      if (a(i, k) == 0.0) continue;  // no fill outside the pattern
      l(i, k) =
          (a(i, k) - l.row(i).head(k).dot(l.row(k).head(k))) / l(k, k);
    }
  }
  return l;
}

SpdOperator preconditioned_operator(const Matrix& a, const Matrix& l) {
  if (a.rows() != a.cols() || l.rows() != a.rows() || l.cols() != a.rows()) {
    throw DimensionMismatch("preconditioned_operator: shapes");
  }
  Matrix z = l.triangularView<Eigen::Lower>().solve(a);
  Matrix t = l.triangularView<Eigen::Lower>().solve(Matrix(z.transpose()));
  return SpdOperator(std::move(t));
}

ScenarioMatrix build_matrix(const Scenario& sc) {
  switch (sc.recipe) {
    case MatrixRecipe::spectrum: {
      SpdOperator op = spectrum_matrix(sc.spectrum);
      // Ascending diagonal: the spectral decomposition is exact.
      SpectralDecomposition eig{sc.spectrum,
                                Matrix::Identity(sc.spectrum.size(),
                                                 sc.spectrum.size())};
      return ScenarioMatrix{std::move(op), std::move(eig)};
    }
    case MatrixRecipe::poisson_ic0: {
      Matrix a = poisson2d(sc.grid);
      Matrix l = ic0(a);
      SpdOperator op = preconditioned_operator(a, l);
      SpectralDecomposition eig = sym_eig(op.entries());
      return ScenarioMatrix{std::move(op), std::move(eig)};
    }
    case MatrixRecipe::poisson_raw: {
      SpdOperator op{poisson2d(sc.grid)};
      SpectralDecomposition eig = sym_eig(op.entries());
      return ScenarioMatrix{std::move(op), std::move(eig)};
    }
  }
  throw std::logic_error("build_matrix: unknown recipe");
}

std::optional<int> superlinearity_onset(const std::vector<double>& rnorm,
                                        int window) {
  if (window < 2) {
    throw std::invalid_argument("superlinearity_onset: window must be >= 2");
  }
  int last = static_cast<int>(rnorm.size()) - 1;
  std::vector<double> ratio(rnorm.size(), 0.0);
  for (int m = 1; m <= last; ++m) {
    if (!(rnorm[m - 1] > 0.0)) {
      last = m - 1;
      break;
    }
    ratio[m] = rnorm[m] / rnorm[m - 1];
  }
  for (int m = window; m <= last; ++m) {
    bool decreasing = true;
    for (int i = m - window + 2; i <= m; ++i) {
      if (!(ratio[i] < ratio[i - 1])) {
        decreasing = false;
        break;
      }
    }
    if (decreasing) return m;
  }
  return std::nullopt;
}

RunArtifact run_scenario(const Scenario& sc, const RunOptions& opts) {
  ScenarioMatrix mat = build_matrix(sc);
  const int n = mat.op.dim();
  const int s = sc.s;

  Matrix b = Matrix::Ones(n, s);
  Matrix x0 = Matrix::Zero(n, s);
  if (s > 1) {
    std::mt19937_64 rng(sc.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index c = 0; c < x0.cols(); ++c) {
      for (Eigen::Index r = 0; r < x0.rows(); ++r) {
        x0(r, c) = normal(rng);
      }
    }
  }

  int horizon = 0;
  std::set<int> checkpoint_set;
  for (const BoundGridEntry& e : sc.bound_grid) {
    horizon = std::max(horizon, e.m + e.j_max);
    checkpoint_set.insert(e.m);
  }

  SolveOptions sopts;
  sopts.max_m = sc.max_m > 0 ? sc.max_m : (n + s - 1) / s + 5;
  sopts.max_m = std::max(sopts.max_m, horizon);
  sopts.tol = sc.tol;
  sopts.min_m = horizon;
  sopts.checkpoints.assign(checkpoint_set.begin(), checkpoint_set.end());
  sopts.record_ritz_extremes = opts.record_ritz_extremes;

  RunArtifact art;
  art.scenario = sc;
  art.version = kVersion;
  art.trace = block_cg_solve(mat.op, b, x0, sopts);

  for (int m = 0; m <= art.trace.steps(); ++m) {
    if (art.trace.rnorm[m] <= sc.tol) {
      art.iterations_to_tol = m;
      break;
    }
  }
  art.onset = superlinearity_onset(art.trace.rnorm, opts.onset_window);

  for (const BoundGridEntry& e : sc.bound_grid) {
    BoundConfig cfg;
    cfg.m = e.m;
    cfg.j_max = e.j_max;
    cfg.k1 = e.k1;
    cfg.k2 = e.k2;
    cfg.multiplicity_mode = e.multiplicity_mode;
    try {
      art.bounds.push_back(evaluate_bounds(mat.op, art.trace, mat.eig, cfg));
    } catch (const std::exception& ex) {
      art.errors.push_back(ConfigError{e, ex.what()});
    }
  }
  return art;
}

namespace {

Scenario base_ex41(int s) {
  Scenario sc;
  sc.id = "ex4.1";
  sc.description = "isolated low eigenvalues, bounds for one eigenpair";
  sc.spectrum = ex41_spectrum();
  sc.n = 100;
  sc.s = s;
  // Two windows: theta_1 halfway through its final interval (steps 20-24)
  // and theta_1 close to lambda_1 (steps 31-35), each with one long horizon.
  for (int m : {20, 21, 23, 24}) sc.bound_grid.push_back({m, 1, 1, 0, false});
  sc.bound_grid.push_back({22, 10, 1, 0, false});
  for (int m : {31, 32, 33, 35}) sc.bound_grid.push_back({m, 0, 1, 0, false});
  sc.bound_grid.push_back({34, 10, 1, 0, false});
  std::sort(sc.bound_grid.begin(), sc.bound_grid.end(),
            [](const BoundGridEntry& a, const BoundGridEntry& b) {
              return a.m < b.m;
            });
  return sc;
}

Scenario base_ex42(int s) {
  Scenario sc;
  sc.id = "ex4.2";
  sc.description = "same matrix, bounds for the four lowest eigenpairs";
  sc.spectrum = ex41_spectrum();
  sc.n = 100;
  sc.s = s;
  for (int m = 38; m <= 45; ++m) {
    sc.bound_grid.push_back({m, m == 44 ? 10 : 0, 4, 0, false});
  }
  sc.bound_grid.push_back({49, 10, 4, 0, false});
  return sc;
}

Scenario base_ex43(int s) {
  Scenario sc;
  sc.id = "ex4.3";
  sc.description = "isolated eigenvalue near zero, block sizes 1/4/8";
  sc.spectrum = isolated_spectrum();
  sc.n = 404;
  sc.s = s;
  switch (s) {
    case 1:
      sc.bound_grid = {{60, 15, 1, 0, false}, {80, 15, 1, 0, false}};
      break;
    case 4:
      sc.bound_grid = {{18, 10, 1, 0, false}, {26, 10, 1, 0, false}};
      break;
    case 8:
      sc.bound_grid = {{12, 8, 1, 0, false}, {18, 8, 1, 0, false}};
      break;
    default:
      sc.bound_grid = {};
      break;
  }
  return sc;
}

Scenario base_ex44(int s) {
  Scenario sc;
  sc.id = "ex4.4";
  sc.description = "cluster of six eigenvalues near zero, block sizes 1-8";
  sc.spectrum.resize(404);
  sc.spectrum.head(6) << 0.0005, 0.0015, 0.0025, 0.0035, 0.0045, 0.0055;
  sc.spectrum.tail(398) = Vector::LinSpaced(398, 0.08, 2.42);
  sc.n = 404;
  sc.s = s;
  switch (s) {
    case 1:
      sc.bound_grid = {{150, 15, 6, 0, false}, {190, 15, 6, 0, false}};
      break;
    case 2:
      sc.bound_grid = {{80, 12, 6, 0, false}, {100, 12, 6, 0, false}};
      break;
    case 4:
      sc.bound_grid = {{40, 10, 6, 0, false}, {52, 10, 6, 0, false}};
      break;
    case 8:
      sc.bound_grid = {{22, 8, 6, 0, false}, {30, 8, 6, 0, false}};
      break;
    default:
      sc.bound_grid = {};
      break;
  }
  return sc;
}

Scenario base_ex45(int s) {
  Scenario sc;
  sc.id = "ex4.5";
  sc.description = "eigenvalue of multiplicity five at the low end";
  sc.spectrum.resize(384);
  sc.spectrum.head(5).setConstant(0.0005);
  sc.spectrum.tail(379) = Vector::LinSpaced(379, 0.065, 5.42);
  sc.n = 384;
  sc.s = s;
  if (s == 1) {
    sc.bound_grid = {{80, 15, 1, 1, false}, {80, 15, 2, 0, true}};
  } else if (s == 4) {
    sc.bound_grid = {{50, 15, 4, 0, true}, {50, 15, 5, 0, true}};
  }
  return sc;
}

Scenario base_ex46(int s) {
  Scenario sc;
  sc.id = "ex4.6";
  sc.description = "2D Poisson, incomplete Cholesky preconditioning";
  sc.recipe = MatrixRecipe::poisson_ic0;
  sc.grid = 20;
  sc.n = 400;
  sc.s = s;
  if (s == 1) {
    sc.bound_grid = {{20, 15, 1, 0, false}, {20, 15, 2, 0, false}};
  } else if (s == 4) {
    sc.bound_grid = {{10, 15, 4, 0, false}, {10, 15, 5, 0, false}};
  }
  return sc;
}

struct RegistryEntry {
  const char* id;
  int default_s;
  std::vector<int> allowed_s;
  Scenario (*make)(int);
};

const std::vector<RegistryEntry>& registry() {
  static const std::vector<RegistryEntry> entries = {
      {"ex4.1", 1, {1}, base_ex41},
      {"ex4.2", 1, {1}, base_ex42},
      {"ex4.3", 1, {1, 4, 8}, base_ex43},
      {"ex4.4", 1, {1, 2, 4, 8}, base_ex44},
      {"ex4.5", 1, {1, 4}, base_ex45},
      {"ex4.6", 1, {1, 4}, base_ex46},
  };
  return entries;
}

}  // namespace

std::vector<std::string> scenario_ids() {
  std::vector<std::string> ids;
  for (const RegistryEntry& e : registry()) ids.emplace_back(e.id);
  return ids;
}

Scenario make_scenario(const std::string& id, int s) {
  for (const RegistryEntry& e : registry()) {
    if (id == e.id) {
      const int use_s = s == 0 ? e.default_s : s;
      Scenario sc = e.make(use_s);
      sc.s = use_s;
      return sc;
    }
  }
  throw std::invalid_argument("unknown scenario id: " + id);
}

Scenario custom_spectrum_scenario(Vector values, int s,
                                  const std::vector<BoundGridEntry>& grid) {
  Scenario sc;
  sc.id = "custom";
  sc.description = "user-supplied spectrum";
  sc.n = static_cast<int>(values.size());
  sc.spectrum = std::move(values);
  sc.s = s;
  sc.bound_grid = grid;
  return sc;
}

}  // namespace blockcg
