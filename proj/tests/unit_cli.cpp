#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "blockcg/cli.hpp"

using namespace blockcg;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() /
           ("blockcg_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.6789, 0.0, 5e4, 0.0005}) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("load_spectrum_file parses, sorts and validates") {
  TempDir dir("spectrum");
  write(dir.path / "plain.txt", "3\n1\n2\n");
  Vector v = load_spectrum_file((dir.path / "plain.txt").string());
  REQUIRE(v.size() == 3);
  CHECK(v(0) == 1.0);
  CHECK(v(2) == 3.0);

  write(dir.path / "comments.txt", "# header\n0.5\n\n# more\n0.25\n");
  Vector c = load_spectrum_file((dir.path / "comments.txt").string());
  REQUIRE(c.size() == 2);
  CHECK(c(0) == 0.25);

  write(dir.path / "bad.txt", "1.0\nnot-a-number\n");
  CHECK_THROWS_AS(load_spectrum_file((dir.path / "bad.txt").string()),
                  ParseError);

  write(dir.path / "negative.txt", "1.0\n-2.0\n");
  CHECK_THROWS_AS(load_spectrum_file((dir.path / "negative.txt").string()),
                  NonPositiveValue);
}

TEST_CASE("spectrum export and reload reproduce the operator exactly") {
  TempDir dir("roundtrip");
  SpdOperator original = multiplicity_spectrum();
  std::string text;
  for (Eigen::Index i = 0; i < original.dim(); ++i) {
    text += format_double(original.entries()(i, i));
    text += '\n';
  }
  write(dir.path / "ex45.txt", text);
  Vector reloaded = load_spectrum_file((dir.path / "ex45.txt").string());
  REQUIRE(reloaded.size() == original.dim());
  CHECK((Matrix(reloaded.asDiagonal()) - original.entries()).norm() == 0.0);
}

TEST_CASE("parse_args resolves subcommands and flags") {
  RunConfig cfg = parse_args({"example", "ex4.1", "--s", "1", "--out", "run"});
  CHECK(cfg.source == RunConfig::Source::example);
  CHECK(cfg.example_id == "ex4.1");
  CHECK(cfg.s == 1);
  CHECK(cfg.out_dir == "run");
  CHECK(cfg.write_csv);
  CHECK(cfg.write_json);

  RunConfig pois = parse_args({"poisson", "--grid", "10", "--ic0"});
  CHECK(pois.source == RunConfig::Source::poisson);
  CHECK(pois.grid == 10);
  CHECK(pois.use_ic0);

  RunConfig lst = parse_args({"list"});
  CHECK(lst.source == RunConfig::Source::list);

  RunConfig fmt = parse_args({"example", "ex4.1", "--format", "csv"});
  CHECK(fmt.write_csv);
  CHECK_FALSE(fmt.write_json);

  CHECK_THROWS_AS(parse_args({}), UsageError);
  CHECK_THROWS_AS(parse_args({"example"}), UsageError);
  CHECK_THROWS_AS(parse_args({"example", "ex4.1", "--format", "xml"}),
                  UsageError);
}

TEST_CASE("scenario_from_config applies registry defaults and overrides") {
  RunConfig cfg = parse_args({"example", "ex4.4", "--s", "8"});
  Scenario sc = scenario_from_config(cfg);
  CHECK(sc.s == 8);
  REQUIRE_FALSE(sc.bound_grid.empty());
  CHECK(sc.bound_grid[0].k1 == 6);

  RunConfig over = parse_args({"example", "ex4.1", "--m", "30", "--m", "31",
                               "--jmax", "2", "--k1", "1"});
  Scenario sc2 = scenario_from_config(over);
  REQUIRE(sc2.bound_grid.size() == 2);
  CHECK(sc2.bound_grid[0].m == 30);
  CHECK(sc2.bound_grid[0].j_max == 2);
  CHECK(sc2.bound_grid[1].m == 31);

  RunConfig unknown = parse_args({"example", "nope"});
  CHECK_THROWS_AS(scenario_from_config(unknown), UsageError);

  RunConfig seeded = parse_args({"example", "ex4.3", "--s", "4", "--seed",
                                 "99"});
  Scenario sc3 = scenario_from_config(seeded);
  CHECK(sc3.seed == 99);
}

TEST_CASE("emit writes frozen headers and is byte-stable") {
  TempDir dir("emit");
  Vector spectrum = Vector::LinSpaced(16, 0.5, 8.0);
  Scenario sc = custom_spectrum_scenario(spectrum, 2, {{3, 2, 1, 0, false}});
  RunArtifact art = run_scenario(sc);

  auto files1 = emit(art, (dir.path / "a").string(), true, true);
  auto files2 = emit(art, (dir.path / "b").string(), true, true);
  REQUIRE(files1.size() == 3);

  std::string residuals = slurp(dir.path / "a" / "residuals.csv");
  CHECK(residuals.rfind("iteration,residual_ainvF,theta_min,theta_max\n", 0) ==
        0);
  std::string bounds = slurp(dir.path / "a" / "bounds_m3_k1_0.csv");
  CHECK(bounds.rfind("j,actual,comparison,b1,b1_ls_sqrt2,b2,gamma_m,alpha\n",
                     0) == 0);
  CHECK(bounds.find("\r") == std::string::npos);

  for (size_t i = 0; i < files1.size(); ++i) {
    CHECK(slurp(files1[i]) == slurp(files2[i]));
  }

  // Without a bound grid only residuals.csv and summary.json appear.
  Scenario bare = custom_spectrum_scenario(spectrum, 1, {});
  RunArtifact bare_art = run_scenario(bare);
  auto bare_files = emit(bare_art, (dir.path / "c").string(), true, true);
  CHECK(bare_files.size() == 2);
}

TEST_CASE("run_cli end to end with exit codes") {
  TempDir dir("cli");
  write(dir.path / "spec.txt", "0.5\n1.0\n2.0\n4.0\n");

  const std::string out = (dir.path / "out").string();
  const std::string file = (dir.path / "spec.txt").string();
  {
    const char* argv[] = {"blockcg", "spectrum", file.c_str(), "--out",
                          out.c_str(), "--m", "2", "--jmax", "1"};
    CHECK(run_cli(9, argv) == 0);
    CHECK(fs::exists(fs::path(out) / "residuals.csv"));
    CHECK(fs::exists(fs::path(out) / "bounds_m2_k1_0.csv"));
    CHECK(fs::exists(fs::path(out) / "summary.json"));
  }
  {
    const char* argv[] = {"blockcg", "example"};
    CHECK(run_cli(2, argv) == 2);
  }
  {
    const char* argv[] = {"blockcg", "example", "no-such-id"};
    CHECK(run_cli(3, argv) == 2);
  }
  {
    const char* argv[] = {"blockcg", "list"};
    CHECK(run_cli(2, argv) == 0);
  }
  {
    const char* argv[] = {"blockcg", "spectrum", "/no/such/file"};
    CHECK(run_cli(3, argv) == 1);
  }
}
