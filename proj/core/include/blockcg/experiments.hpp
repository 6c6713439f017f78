#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "blockcg/bounds.hpp"

namespace blockcg {

enum class MatrixRecipe {
  spectrum,      // diagonal matrix with a prescribed spectrum
  poisson_ic0,   // 2D Poisson preconditioned by incomplete Cholesky
  poisson_raw,   // unpreconditioned 2D Poisson
};

struct BoundGridEntry {
  int m;
  int j_max;
  int k1;
  int k2;
  bool multiplicity_mode = false;
};

/// A fully pinned experiment: every floating-point input is a deterministic
/// function of this record (and the seed for s > 1 starting blocks).
struct Scenario {
  std::string id;
  std::string description;
  MatrixRecipe recipe = MatrixRecipe::spectrum;
  Vector spectrum;
  int grid = 0;
  int n = 0;
  int s = 1;
  std::uint64_t seed = 42;
  double tol = 1e-8;
  int max_m = 0;  // 0: ceil(n/s) plus slack
  std::vector<BoundGridEntry> bound_grid;
};

/// Diagonal operator with the given (positive) eigenvalues.
SpdOperator spectrum_matrix(const Vector& values);

/// 0.1, 0.2, 0.3, 0.4 followed by 96 equally spaced values from 5 to 100.
Vector ex41_spectrum();

/// One isolated eigenvalue 0.0005 and 403 equally spaced on [0.08, 2.42].
Vector isolated_spectrum();

/// Six clustered eigenvalues near zero, 398 equally spaced on [0.08, 2.42].
SpdOperator clustered_spectrum();

/// Eigenvalue 0.0005 with multiplicity five, 379 equally spaced on
/// [0.065, 5.42].
SpdOperator multiplicity_spectrum();

/// Standard 5-point Laplacian on a g x g interior grid, natural row-major
/// ordering, returned dense.
Matrix poisson2d(int g);

/// Incomplete Cholesky with no fill: L has nonzeros only where the lower
/// triangle of a does.
Matrix ic0(const Matrix& a);

/// Forms L^{-1} A L^{-T} densely and wraps it as an operator.
SpdOperator preconditioned_operator(const Matrix& a, const Matrix& l);

struct ScenarioMatrix {
  SpdOperator op;
  SpectralDecomposition eig;
};

ScenarioMatrix build_matrix(const Scenario& sc);

/// First step m at which the local residual ratio has been strictly
/// decreasing over `window` consecutive ratios; nullopt when that never
/// happens (e.g. plain geometric decay).
std::optional<int> superlinearity_onset(const std::vector<double>& rnorm,
                                        int window);

struct ConfigError {
  BoundGridEntry entry;
  std::string message;
};

struct RunArtifact {
  Scenario scenario;
  SolveTrace trace;
  std::vector<BoundSeries> bounds;
  std::vector<ConfigError> errors;
  std::optional<int> onset;              // window 3
  std::optional<int> iterations_to_tol;  // first m with ||R_m|| <= tol
  std::string version;
};

struct RunOptions {
  bool record_ritz_extremes = true;
  int onset_window = 3;
};

/// Builds the scenario matrix, right-hand side (all-ones columns) and
/// starting block (zero for s = 1, seeded standard normal otherwise), runs
/// the solver far enough to cover every bound horizon, and evaluates every
/// bound configuration. Per-configuration failures are recorded without
/// aborting the others.
RunArtifact run_scenario(const Scenario& sc, const RunOptions& opts = {});

/// The built-in experiments; make_scenario resolves an id plus block size to
/// a pinned scenario (s = 0 selects the default block size).
std::vector<std::string> scenario_ids();
Scenario make_scenario(const std::string& id, int s = 0);

/// Wraps a user-supplied spectrum as a scenario with a single bound
/// configuration.
Scenario custom_spectrum_scenario(Vector values, int s,
                                  const std::vector<BoundGridEntry>& grid);

}  // namespace blockcg
