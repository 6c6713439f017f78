#include "blockcg/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "blockcg/version.hpp"

namespace blockcg {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) {
    return std::to_string(x);
  }
  return std::string(buf, ptr);
}

Vector load_spectrum_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open spectrum file: " + path);
  }
  std::vector<double> values;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const std::string token = line.substr(first);
    std::size_t consumed = 0;
    double value = 0;
    try {
      value = std::stod(token, &consumed);
    } catch (const std::exception&) {
      throw ParseError(line_number, "not a number: '" + token + "'");
    }
    const auto rest = token.find_first_not_of(" \t\r", consumed);
    if (rest != std::string::npos) {
      throw ParseError(line_number, "trailing characters: '" + token + "'");
    }
    if (!(value > 0.0)) {
      throw NonPositiveValue(line_number, value);
    }
    values.push_back(value);
  }
  if (values.empty()) {
    throw ParseError(line_number, "spectrum file holds no values");
  }
  std::sort(values.begin(), values.end());
  return Eigen::Map<Vector>(values.data(),
                            static_cast<Eigen::Index>(values.size()));
}

RunConfig parse_args(const std::vector<std::string>& args) {
  RunConfig cfg;
  std::string format = "csv,json";

  CLI::App app{"block conjugate gradient solver with superlinear "
               "convergence bounds"};
  app.fallthrough(true);
  app.require_subcommand(1);

  app.add_option("--s", cfg.s, "block size (scenario default when omitted)")
      ->check(CLI::PositiveNumber);
  app.add_option("--m", cfg.m_override,
                 "bound evaluation steps (replaces the scenario defaults)");
  app.add_option("--jmax", cfg.j_max_override, "bound horizon")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--k1", cfg.k1_override, "lowest eigenpairs to deflate")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--k2", cfg.k2_override, "highest eigenpairs to deflate")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--tol", cfg.tol, "residual tolerance in the A^-1-F norm");
  auto* seed_opt =
      app.add_option("--seed", cfg.seed, "seed for random starting blocks")
          ->envname("BLOCKCG_SEED");
  app.add_option("--out", cfg.out_dir, "output directory");
  app.add_option("--format", format, "csv, json or csv,json");
  app.add_option("--max-m", cfg.max_m, "iteration cap")
      ->check(CLI::PositiveNumber);

  auto* example = app.add_subcommand("example", "run a built-in experiment");
  example->add_option("id", cfg.example_id, "scenario id, see `list`")
      ->required();
  auto* spectrum =
      app.add_subcommand("spectrum", "run on a spectrum loaded from a file");
  spectrum->add_option("file", cfg.spectrum_path, "one eigenvalue per line")
      ->required();
  auto* poisson =
      app.add_subcommand("poisson", "run on the discrete 2D Poisson matrix");
  poisson->add_option("--grid", cfg.grid, "interior grid points per side")
      ->check(CLI::Range(2, 1000));
  poisson->add_flag("--ic0", cfg.use_ic0,
                    "precondition with no-fill incomplete Cholesky");
  app.add_subcommand("list", "list the built-in scenarios");

  // CLI11 consumes the vector back to front.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  cfg.seed_set = seed_opt->count() > 0;  // flag or BLOCKCG_SEED

  if (example->parsed()) {
    cfg.source = RunConfig::Source::example;
  } else if (spectrum->parsed()) {
    cfg.source = RunConfig::Source::spectrum_file;
  } else if (poisson->parsed()) {
    cfg.source = RunConfig::Source::poisson;
  } else {
    cfg.source = RunConfig::Source::list;
  }

  cfg.write_csv = format.find("csv") != std::string::npos;
  cfg.write_json = format.find("json") != std::string::npos;
  if (!cfg.write_csv && !cfg.write_json) {
    throw UsageError("--format must name csv, json or both");
  }
  if (cfg.tol < 0) {
    throw UsageError("--tol must be positive");
  }
  return cfg;
}

Scenario scenario_from_config(const RunConfig& cfg) {
  Scenario sc;
  switch (cfg.source) {
    case RunConfig::Source::example:
      try {
        sc = make_scenario(cfg.example_id, cfg.s);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      break;
    case RunConfig::Source::spectrum_file: {
      sc = custom_spectrum_scenario(load_spectrum_file(cfg.spectrum_path),
                                    cfg.s == 0 ? 1 : cfg.s, {});
      break;
    }
    case RunConfig::Source::poisson: {
      sc.id = cfg.use_ic0 ? "poisson-ic0" : "poisson";
      sc.description = "discrete 2D Poisson";
      sc.recipe =
          cfg.use_ic0 ? MatrixRecipe::poisson_ic0 : MatrixRecipe::poisson_raw;
      sc.grid = cfg.grid;
      sc.n = cfg.grid * cfg.grid;
      sc.s = cfg.s == 0 ? 1 : cfg.s;
      break;
    }
    case RunConfig::Source::list:
      throw UsageError("list does not produce a scenario");
  }

  if (cfg.seed_set) sc.seed = cfg.seed;
  if (cfg.tol > 0) sc.tol = cfg.tol;
  if (cfg.max_m > 0) sc.max_m = cfg.max_m;

  if (!cfg.m_override.empty()) {
    const int k1 = cfg.k1_override >= 0
                       ? cfg.k1_override
                       : (sc.bound_grid.empty() ? 1 : sc.bound_grid[0].k1);
    const int k2 = cfg.k2_override >= 0
                       ? cfg.k2_override
                       : (sc.bound_grid.empty() ? 0 : sc.bound_grid[0].k2);
    const int j_max = cfg.j_max_override >= 0 ? cfg.j_max_override : 0;
    std::set<int> seen;
    sc.bound_grid.clear();
    for (int m : cfg.m_override) {
      if (m < 1) throw UsageError("--m entries must be >= 1");
      if (!seen.insert(m).second) continue;
      sc.bound_grid.push_back({m, j_max, k1, k2, false});
    }
  } else {
    for (BoundGridEntry& e : sc.bound_grid) {
      if (cfg.k1_override >= 0) e.k1 = cfg.k1_override;
      if (cfg.k2_override >= 0) e.k2 = cfg.k2_override;
      if (cfg.j_max_override >= 0) e.j_max = cfg.j_max_override;
    }
  }
  return sc;
}

namespace {

std::string bounds_file_name(const BoundSeries& b) {
  return "bounds_m" + std::to_string(b.config.m) + "_k" +
         std::to_string(b.config.k1) + "_" + std::to_string(b.config.k2) +
         ".csv";
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << contents;
  if (!out) {
    throw std::runtime_error("write failed for " + path.string());
  }
}

std::string residuals_csv(const RunArtifact& art) {
  std::string text = "iteration,residual_ainvF,theta_min,theta_max\n";
  const auto& tr = art.trace;
  const bool have_theta = !tr.theta_min.empty();
  for (int m = 0; m <= tr.steps(); ++m) {
    text += std::to_string(m);
    text += ',';
    text += format_double(tr.rnorm[m]);
    text += ',';
    if (m >= 1 && have_theta && m - 1 < static_cast<int>(tr.theta_min.size())) {
      text += format_double(tr.theta_min[m - 1]);
      text += ',';
      text += format_double(tr.theta_max[m - 1]);
    } else {
      text += ',';
    }
    text += '\n';
  }
  return text;
}

std::string bounds_csv(const BoundSeries& b) {
  std::string text = "j,actual,comparison,b1,b1_ls_sqrt2,b2,gamma_m,alpha\n";
  for (size_t j = 0; j < b.actual.size(); ++j) {
    text += std::to_string(j);
    text += ',';
    text += format_double(b.actual[j]);
    text += ',';
    text += format_double(b.comparison[j]);
    text += ',';
    text += format_double(b.b1[j]);
    text += ',';
    text += format_double(b.b1_ls_sqrt2[j]);
    text += ',';
    text += format_double(b.b2[j]);
    text += ',';
    text += format_double(b.gamma_m);
    text += ',';
    text += format_double(b.alpha);
    text += '\n';
  }
  return text;
}

const char* recipe_name(MatrixRecipe r) {
  switch (r) {
    case MatrixRecipe::spectrum:
      return "spectrum";
    case MatrixRecipe::poisson_ic0:
      return "poisson+ic0";
    case MatrixRecipe::poisson_raw:
      return "poisson";
  }
  return "unknown";
}

ordered_json summary_json(const RunArtifact& art) {
  ordered_json j;
  j["version"] = art.version;
  ordered_json sc;
  sc["id"] = art.scenario.id;
  sc["description"] = art.scenario.description;
  sc["recipe"] = recipe_name(art.scenario.recipe);
  sc["n"] = art.scenario.n;
  sc["s"] = art.scenario.s;
  sc["seed"] = art.scenario.seed;
  sc["tol"] = art.scenario.tol;
  if (art.scenario.recipe != MatrixRecipe::spectrum) {
    sc["grid"] = art.scenario.grid;
  }
  j["scenario"] = sc;
  j["steps"] = art.trace.steps();
  j["converged"] = art.trace.converged;
  j["stop_reason"] = to_string(art.trace.reason);
  j["max_shortcut_error"] = art.trace.max_shortcut_error;
  j["iterations_to_tol"] =
      art.iterations_to_tol ? ordered_json(*art.iterations_to_tol)
                            : ordered_json(nullptr);
  j["superlinearity_onset"] =
      art.onset ? ordered_json(*art.onset) : ordered_json(nullptr);

  ordered_json configs = ordered_json::array();
  for (const BoundSeries& b : art.bounds) {
    ordered_json c;
    c["m"] = b.config.m;
    c["k1"] = b.config.k1;
    c["k2"] = b.config.k2;
    c["j_max"] = b.config.j_max;
    c["multiplicity_mode"] = b.config.multiplicity_mode;
    c["gamma_m"] = b.gamma_m;
    c["alpha"] = b.alpha;
    c["alpha_unreliable"] = b.alpha_unreliable;
    c["krylov_truncated"] = b.krylov_truncated;
    c["ls_rank_deficient"] = b.ls_rank_deficient;
    c["comparison_truncated"] = b.comparison_truncated;
    c["file"] = bounds_file_name(b);
    configs.push_back(c);
  }
  j["configs"] = configs;

  ordered_json errors = ordered_json::array();
  for (const ConfigError& e : art.errors) {
    ordered_json c;
    c["m"] = e.entry.m;
    c["k1"] = e.entry.k1;
    c["k2"] = e.entry.k2;
    c["j_max"] = e.entry.j_max;
    c["message"] = e.message;
    errors.push_back(c);
  }
  j["errors"] = errors;
  return j;
}

}  // namespace

std::vector<std::string> emit(const RunArtifact& artifact,
                              const std::string& out_dir, bool write_csv,
                              bool write_json) {
  fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory " + out_dir);
  }
  std::vector<std::string> written;
  if (write_csv) {
    fs::path residuals = dir / "residuals.csv";
    write_file(residuals, residuals_csv(artifact));
    written.push_back(residuals.string());
    for (const BoundSeries& b : artifact.bounds) {
      fs::path path = dir / bounds_file_name(b);
      write_file(path, bounds_csv(b));
      written.push_back(path.string());
    }
  }
  if (write_json) {
    fs::path summary = dir / "summary.json";
    write_file(summary, summary_json(artifact).dump(2) + "\n");
    written.push_back(summary.string());
  }
  return written;
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);

  RunConfig cfg;
  try {
    cfg = parse_args(args);
  } catch (const HelpRequested& h) {
    std::cout << h.text;
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  if (cfg.source == RunConfig::Source::list) {
    for (const std::string& id : scenario_ids()) {
      Scenario sc = make_scenario(id);
      std::cout << id << "  n=" << sc.n << "  " << sc.description << "\n";
    }
    return 0;
  }

  try {
    Scenario sc = scenario_from_config(cfg);
    RunArtifact art = run_scenario(sc);
    std::vector<std::string> files =
        emit(art, cfg.out_dir, cfg.write_csv, cfg.write_json);
    for (const std::string& f : files) {
      std::cout << f << "\n";
    }
    if (!art.errors.empty()) {
      for (const ConfigError& e : art.errors) {
        std::cerr << "config m=" << e.entry.m << " k1=" << e.entry.k1
                  << " k2=" << e.entry.k2 << " failed: " << e.message << "\n";
      }
      return 1;
    }
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace blockcg
