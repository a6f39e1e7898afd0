#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "rsdesign/cli.hpp"
#include "rsdesign/errors.hpp"
#include "rsdesign/numerics.hpp"
#include "support.hpp"

using namespace rsdesign;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "rsdesign");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "rsdesign_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string write_file(const std::string& name, const std::string& text) {
  const fs::path p = scratch(name);
  std::ofstream(p) << text;
  return p.string();
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  return lines;
}

std::vector<double> column(const std::string& csv_text, std::size_t col) {
  std::vector<double> out;
  const auto lines = data_lines(csv_text);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::istringstream ss(lines[i]);
    std::string cell;
    for (std::size_t c = 0; c <= col; ++c) std::getline(ss, cell, ',');
    out.push_back(std::stod(cell));
  }
  return out;
}

const std::string kCubeConfig = R"({
  "q": 3, "runs": 26,
  "region": {"kind": "cube"},
  "criterion": {"kappa": {"(DP)_S": 0.5, "I_D": 0.5}, "quadratic_weight": 0.25},
  "search": {"starts": 20, "seed": 7}
})";

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(cli({"--help"}).code == kExitOk);
  CHECK(cli({}).code == kExitConfig);
  CHECK(cli({"frobnicate"}).code == kExitConfig);
  CHECK(cli({"graph"}).code == kExitConfig);  // missing design
}

TEST_CASE("config parsing") {
  const auto cfg = parse_run_config(R"({"q": 5, "runs": 30, "region": {"kind": "sphere"},
      "criterion": {"kappa": [0,0.3,0,0,0,0,0,0.7,0], "alphas": {"DP": 0.1}},
      "graph": {"variant": "SEDG", "axis": "volume"}})");
  CHECK(cfg.q == 5);
  CHECK(cfg.region().rho == doctest::Approx(std::sqrt(5.0)));
  CHECK(cfg.criterion.kappa[1] == 0.3);
  CHECK(cfg.criterion.alpha_dp == 0.1);
  CHECK(cfg.criterion.alpha_idp == 0.05);
  CHECK(cfg.graph.variant == GraphVariant::VDG);
  CHECK(cfg.graph.scale == GraphScale::StandardError);
  CHECK(cfg.graph.axis == GraphAxis::VolumeFraction);
  CHECK_NOTHROW(cfg.validate());

  CHECK_THROWS_AS(parse_run_config(R"({"q": 3, "colour": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"criterion": {"kappa": {"E": 1}}})"), ConfigError);
  CHECK_THROWS_AS(load_run_config("/nonexistent/config.json"), ConfigError);
  auto bad = parse_run_config(R"({"q": 3, "criterion": {"kappa": {"D_S": 0.5, "I_D": 0.4}}})");
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("optimize: weights not summing to one exit with 2") {
  const auto path = write_file("kappa.json", R"({"q": 3, "runs": 26,
      "criterion": {"kappa": {"D_S": 0.5, "I_D": 0.4}}})");
  const auto r = cli({"optimize", "--config", path});
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("sum to 1") != std::string::npos);
}

TEST_CASE("optimize: fewer runs than parameters exit with 3") {
  const auto path = write_file("small.json", R"({"q": 3, "runs": 9})");
  CHECK(cli({"optimize", "--config", path, "--quiet"}).code == kExitInfeasible);
}

TEST_CASE("optimize writes a design with its report, deterministically") {
  const auto path = write_file("cube.json", kCubeConfig);
  const auto out = scratch("best.csv").string();
  const auto report = scratch("best.txt").string();
  const auto a = cli({"optimize", "--config", path, "--quiet", "-o", out, "--report", report});
  REQUIRE(a.code == kExitOk);
  const Design d = read_design_file(out);
  CHECK(d.runs() == 26);
  std::ifstream rep(report);
  std::stringstream text;
  text << rep.rdbuf();
  CHECK(text.str().find("pure_error_df=") != std::string::npos);
  CHECK(text.str().find("factor.F(p-1,d;1-alpha1)") != std::string::npos);

  const auto b = cli({"optimize", "--config", path, "--quiet"});
  const auto c = cli({"optimize", "--config", path, "--quiet"});
  CHECK(b.out == c.out);
  const auto other = cli({"optimize", "--config", path, "--quiet", "--seed", "8", "--starts", "3"});
  CHECK(other.out.find("seed=8") != std::string::npos);
  CHECK(other.out.find("starts=3") != std::string::npos);
}

TEST_CASE("evaluate: a single design is 100% efficient") {
  const auto r = cli({"evaluate", testing::fixture("cassava_design4.csv")});
  REQUIRE(r.code == kExitOk);
  const auto lines = data_lines(r.out);
  REQUIRE(lines.size() == 2);
  CHECK(lines[1].rfind("cassava_design4,5,11,100.00,100.00,100.00,100.00,100.00,100.00,100.00,100.00,", 0) == 0);
}

TEST_CASE("evaluate: the sphere example with a CCD") {
  std::vector<std::string> args = {"evaluate", "--region", "sphere", "--quadratic-weight", "1",
                                   "--ccd", "30"};
  for (int i : {1, 2, 5, 7}) args.push_back(testing::fixture("sphere5_design" + std::to_string(i) + ".csv"));
  const auto r = cli(args);
  REQUIRE(r.code == kExitOk);
  const auto id = column(r.out, 9);
  const std::vector<double> expected = {60.31, 52.80, 54.37, 86.32, 100.00};
  REQUIRE(id.size() == expected.size());
  for (std::size_t i = 0; i < id.size(); ++i) CHECK(std::abs(id[i] - expected[i]) <= 0.1);

  // Without snapping the rounded coordinates sit slightly off the sphere.
  args.push_back("--no-snap");
  const auto raw = cli(args);
  CHECK(raw.code == kExitOk);
  CHECK(raw.out != r.out);
}

TEST_CASE("evaluate: reference optima and errors") {
  const auto r = cli({"evaluate", testing::fixture("cassava_design4.csv"), "--reference",
                      "1,1,1,1,1,1,1,1", "--format", "text"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("(5,11)") != std::string::npos);
  CHECK(cli({"evaluate", "/nonexistent.csv"}).code == kExitConfig);
  CHECK(cli({"evaluate", testing::fixture("cassava_design4.csv"), "--reference", "1,2"}).code == kExitConfig);
  const auto garbage = write_file("garbage.csv", "x1,x2\n1,abc\n");
  const auto g = cli({"evaluate", garbage});
  CHECK(g.code == kExitConfig);
  CHECK(g.err.find("garbage.csv:2") != std::string::npos);
}

TEST_CASE("graph: interval VDG equals point VDG times F(1,12)") {
  const std::string design = testing::fixture("cassava_design5.csv");  // d = 12
  const std::vector<std::string> base = {"graph", design, "--variant", "VDG", "--radii", "11",
                                         "--shell-samples", "500"};
  const auto point = cli(base);
  auto args = base;
  args.insert(args.end(), {"--interval", "0.05"});
  const auto interval = cli(args);
  REQUIRE(point.code == kExitOk);
  REQUIRE(interval.code == kExitOk);
  const double f = f_quantile(1, 12, 0.95);
  CHECK(f == doctest::Approx(4.7472).epsilon(1e-4));
  const auto pmax = column(point.out, 3);
  const auto imax = column(interval.out, 3);
  REQUIRE(pmax.size() == 11);
  for (std::size_t k = 0; k < pmax.size(); ++k) CHECK(imax[k] == doctest::Approx(pmax[k] * f).epsilon(1e-9));
}

TEST_CASE("graph: interval without pure error exits with 4") {
  const auto r = cli({"graph", "--region", "sphere", testing::fixture("sphere5_design1.csv"),
                      "--interval", "0.05", "--samples", "100"});
  CHECK(r.code == kExitContract);
  CHECK(r.err.find("d = 0") != std::string::npos);
}

TEST_CASE("graph: intercept-only FDS is constant") {
  const auto r = cli({"graph", testing::fixture("cassava_design6.csv"), "--model", "intercept",
                      "--samples", "200"});
  REQUIRE(r.code == kExitOk);
  for (double v : column(r.out, 1)) CHECK(v == doctest::Approx(1.0 / 26));
}

TEST_CASE("graph: DFDS output for every cube example design is monotone and reproducible") {
  for (int i = 4; i <= 8; ++i) {
    const std::string design = testing::fixture("cassava_design" + std::to_string(i) + ".csv");
    const auto a = cli({"graph", design, "--variant", "DFDS", "--samples", "2000"});
    const auto b = cli({"graph", design, "--variant", "DFDS", "--samples", "2000"});
    REQUIRE(a.code == kExitOk);
    CHECK(a.out == b.out);
    CHECK(a.out.find("# design_hash: ") != std::string::npos);
    const auto v = column(a.out, 1);
    CHECK(v.size() == 2000);
    CHECK(std::is_sorted(v.begin(), v.end()));
  }
}

TEST_CASE("verify-ccd reports per run size") {
  const auto r = cli({"verify-ccd", "--q", "3", "--runs", "16..18", "--starts", "30", "--quiet"});
  REQUIRE(r.code == kExitOk);
  const auto lines = data_lines(r.out);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0].find("n=16") != std::string::npos);
  CHECK(lines[0].find(" improved upon") != std::string::npos);
  CHECK(lines[0].find("not improved") == std::string::npos);
  CHECK(lines[1].find("not improved upon") != std::string::npos);
  CHECK(lines[2].find("centers=4") != std::string::npos);
  CHECK(cli({"verify-ccd", "--q", "3", "--centers", "3..3", "--starts", "5", "--quiet"}).code == kExitOk);
  CHECK(cli({"verify-ccd", "--q", "7", "--runs", "80"}).code == kExitConfig);
  CHECK(cli({"verify-ccd", "--q", "3", "--runs", "12"}).code == kExitConfig);
  CHECK(cli({"verify-ccd", "--q", "3"}).code == kExitConfig);
}

TEST_CASE("candidates dumps the candidate set") {
  const auto r = cli({"candidates", "--q", "2", "--region", "sphere", "--rho", "2"});
  REQUIRE(r.code == kExitOk);
  const auto lines = data_lines(r.out);
  REQUIRE(lines.size() == 10);
  CHECK(lines[0] == "x1,x2");
  CHECK(lines[5] == "0,0");
  CHECK(cli({"candidates"}).code == kExitConfig);
}
