#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <json.hpp>

#include "eigencurve/config.hpp"

namespace fs = std::filesystem;
using eigencurve::gallery_config;
using eigencurve::kGalleryNames;
using eigencurve::load_config;
using eigencurve::ProblemConfig;

namespace {

const char* cli = EIGENCURVE_CLI_PATH;

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("eigencurve-cli-" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args, const fs::path& dir, const std::string& log = "run") {
  const std::string cmd = std::string(cli) + " " + args + " > " + (dir / (log + ".out")).string() +
                          " 2> " + (dir / (log + ".err")).string();
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::vector<std::string>> csv_rows(const fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(path));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("gallery configs round-trip and validate") {
  const fs::path dir = fresh_dir("gallery");
  for (const std::string& name : kGalleryNames) {
    CAPTURE(name);
    CHECK(run("gallery " + name + " --out " + dir.string(), dir, "gal-" + name) == 0);
    const fs::path cfg_path = dir / (name + ".json");
    REQUIRE(fs::exists(cfg_path));

    const ProblemConfig from_file = load_config(cfg_path.string());
    const ProblemConfig built_in = gallery_config(name);
    CHECK(from_file.name == name);
    CHECK(from_file.n == built_in.n);
    CHECK(from_file.N == built_in.N);
    CHECK(from_file.t0 == built_in.t0);

    CHECK(run("check --config " + cfg_path.string() + " --out " + dir.string(), dir,
              "check-" + name) == 0);
  }
}

TEST_CASE("unknown gallery name exits 3") {
  const fs::path dir = fresh_dir("unknown-gallery");
  CHECK(run("gallery renormalization-group --out " + dir.string(), dir) == 3);
  const std::string err = slurp(dir / "run.err");
  CHECK(err.find("unknown gallery") != std::string::npos);
}

TEST_CASE("malformed JSON exits 3 and reports line and column") {
  const fs::path dir = fresh_dir("malformed");
  const fs::path bad = dir / "bad.json";
  std::ofstream(bad) << "{\"interval\": [0, 1],\n \"n\": ,\n}";
  CHECK(run("check --config " + bad.string(), dir) == 3);
  const std::string err = slurp(dir / "run.err");
  CHECK(err.find("line 2") != std::string::npos);
  CHECK(err.find("column") != std::string::npos);
}

TEST_CASE("schema violations exit 3 with the offending key") {
  const fs::path dir = fresh_dir("schema");
  const fs::path bad = dir / "bad.json";
  std::ofstream(bad) << R"({"interval": [0, 1], "n": 1, "grid_points": 40,
    "potential": {"type": "zero"},
    "family": {"type": "robin", "theta": [[[1, 0], [0, 1]]]},
    "t0": 0.0})";
  CHECK(run("expand --config " + bad.string(), dir) == 3);
  const std::string err = slurp(dir / "run.err");
  CHECK(err.find("target") != std::string::npos);
}

TEST_CASE("endpoint resonance is reported by check with exit 2") {
  const fs::path dir = fresh_dir("resonance");
  // X = I, Y = h I with h = 1/100: the elimination matrix X - Y/h vanishes.
  const fs::path cfg = dir / "resonant.json";
  std::ofstream(cfg) << R"({"interval": [0, 1], "n": 1, "grid_points": 100,
    "potential": {"type": "zero"},
    "family": {"type": "general", "x": [[[1, 0], [0, 1]]], "y": [[[0.01, 0], [0, 0.01]]]},
    "t0": 0.0,
    "target": {"kind": "index", "index": 0}})";
  CHECK(run("check --config " + cfg.string(), dir) == 2);
  const std::string out = slurp(dir / "run.out");
  CHECK(out.find("FAIL") != std::string::npos);
  CHECK(out.find("RESULT FAIL") != std::string::npos);
}

TEST_CASE("expand emits the documented CSV and is byte-identical across runs") {
  const fs::path dir = fresh_dir("expand-determinism");
  CHECK(run("gallery robin-matrix-potential --out " + dir.string(), dir) == 0);
  const std::string cfg = (dir / "robin-matrix-potential.json").string();
  CHECK(run("expand --config " + cfg + " --out " + (dir / "r1").string(), dir, "r1") == 0);
  CHECK(run("expand --config " + cfg + " --out " + (dir / "r2").string(), dir, "r2") == 0);
  const std::string first = slurp(dir / "r1" / "expand.csv");
  CHECK(first == slurp(dir / "r2" / "expand.csv"));
  const auto rows = csv_rows(dir / "r1" / "expand.csv");
  REQUIRE(rows.size() >= 2);
  CHECK(rows[0] == std::vector<std::string>{"i", "k", "lambda", "mu", "nu", "c1", "c2"});
  CHECK(fs::exists(dir / "r1" / "expand.json"));
}

TEST_CASE("expand reproduces the closed-form slope of the scalar family") {
  const fs::path dir = fresh_dir("expand-slope");
  CHECK(run("gallery neumann-to-robin --out " + dir.string(), dir) == 0);
  const std::string cfg = (dir / "neumann-to-robin.json").string();
  CHECK(run("expand --config " + cfg + " --out " + dir.string() + " --format csv", dir) == 0);
  const auto rows = csv_rows(dir / "expand.csv");
  REQUIRE(rows.size() == 2);
  // One branch; the slope of the lowest eigenvalue at the Neumann point of
  // this 200-step grid is exactly 2 * 200 / 199.
  const double c1 = std::stod(rows[1][5]);
  CHECK(std::abs(c1 - 2.0 * 200.0 / 199.0) < 1e-9);
  CHECK_FALSE(fs::exists(dir / "expand.json"));
}

TEST_CASE("oracle passes on a gallery and is byte-identical across runs") {
  const fs::path dir = fresh_dir("oracle-determinism");
  CHECK(run("gallery additive-ramp --out " + dir.string(), dir) == 0);
  const std::string cfg = (dir / "additive-ramp.json").string();
  CHECK(run("oracle --config " + cfg + " --out " + (dir / "r1").string(), dir, "r1") == 0);
  CHECK(run("oracle --config " + cfg + " --out " + (dir / "r2").string(), dir, "r2") == 0);
  const std::string first = slurp(dir / "r1" / "oracle.csv");
  CHECK(first == slurp(dir / "r2" / "oracle.csv"));
  const auto rows = csv_rows(dir / "r1" / "oracle.csv");
  REQUIRE(rows.size() >= 2);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].back() == "PASS");
}

TEST_CASE("predict-only oracle closes the loop on the engine") {
  const fs::path dir = fresh_dir("predict-only");
  CHECK(run("gallery additive-ramp --out " + dir.string(), dir) == 0);
  const std::string cfg = (dir / "additive-ramp.json").string();
  CHECK(run("oracle --config " + cfg + " --predict-only --out " + dir.string(), dir) == 0);
  const auto rows = csv_rows(dir / "oracle.csv");
  REQUIRE(rows.size() >= 2);
  // abs_dev columns of every branch row stay at extrapolation noise level.
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::stod(rows[i][8]) <= 1e-9);
    CHECK(std::stod(rows[i][9]) <= 1e-9);
  }
}

TEST_CASE("oracle grid crossing an elimination singularity fails cleanly") {
  const fs::path dir = fresh_dir("oracle-resonance");
  CHECK(run("gallery dirichlet-double-split --out " + dir.string(), dir) == 0);
  auto cfg = nlohmann::ordered_json::parse(slurp(dir / "dirichlet-double-split.json"));
  // h = 1/100 on this gallery; a grid reaching past t = 0.01 crosses the
  // parameter where the endpoint elimination is singular.
  cfg["window"] = {-0.02, 0.02};
  cfg["oracle"]["t_grid"]["halfwidth"] = 0.02;
  const fs::path patched = dir / "crossing.json";
  std::ofstream(patched) << cfg.dump(2);
  CHECK(run("oracle --config " + patched.string() + " --out " + dir.string(), dir) == 2);
  const std::string err = slurp(dir / "run.err");
  CHECK(err.find("error:") != std::string::npos);
}

TEST_CASE("sweep on a constant family has vanishing residuals") {
  const fs::path dir = fresh_dir("sweep-constant");
  const fs::path cfg = dir / "constant.json";
  std::ofstream(cfg) << R"({"interval": [0, 1], "n": 1, "grid_points": 40,
    "potential": {"type": "zero"},
    "family": {"type": "robin", "theta": [[[0.7, 0], [0, 0.7]]]},
    "t0": 0.0, "window": [-1, 1],
    "target": {"kind": "index", "index": 1}})";
  CHECK(run("sweep --config " + cfg.string() + " --steps 11 --out " + dir.string(), dir) == 0);
  const auto rows = csv_rows(dir / "sweep.csv");
  REQUIRE(rows.size() == 12);
  CHECK(rows[0] == std::vector<std::string>{"t", "branch_i", "branch_k", "lambda_predicted",
                                            "lambda_tracked", "residual"});
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::abs(std::stod(rows[i][5])) <= 1e-10);
}

TEST_CASE("sweep residual shrinks by the cubic factor when the range halves") {
  const fs::path dir = fresh_dir("sweep-cubic");
  CHECK(run("gallery neumann-to-robin --out " + dir.string(), dir) == 0);
  const std::string cfg = (dir / "neumann-to-robin.json").string();
  const auto max_residual = [&](double hw, const std::string& tag) {
    CHECK(run("sweep --config " + cfg + " --t-min " + std::to_string(-hw) + " --t-max " +
                  std::to_string(hw) + " --steps 9 --out " + (dir / tag).string(),
              dir, tag) == 0);
    double worst = 0.0;
    const auto rows = csv_rows(dir / tag / "sweep.csv");
    for (std::size_t i = 1; i < rows.size(); ++i)
      worst = std::max(worst, std::abs(std::stod(rows[i][5])));
    return worst;
  };
  const double wide = max_residual(0.2, "wide");
  const double narrow = max_residual(0.1, "narrow");
  CHECK(narrow * 6.0 <= wide);
}
