#include "eigencurve/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "eigencurve/errors.hpp"
#include "eigencurve/spectral.hpp"

namespace eigencurve {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw ConfigError("config: " + what); }

const json& need(const json& j, const char* key) {
  if (!j.contains(key)) bad(std::string("missing key \"") + key + "\"");
  return j.at(key);
}

double num(const json& j, const char* where) {
  if (!j.is_number()) bad(std::string(where) + " must be a number");
  return j.get<double>();
}

std::size_t index_num(const json& j, const char* where) {
  if (!j.is_number_unsigned()) bad(std::string(where) + " must be a nonnegative integer");
  return j.get<std::size_t>();
}

Complex entry(const json& j, const char* where) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return Complex(j[0].get<double>(), j[1].get<double>());
  bad(std::string(where) + " entries must be numbers or [re, im] pairs");
}

ComplexMatrix matrix_from(const json& j, const char* where) {
  if (!j.is_array() || j.empty()) bad(std::string(where) + " must be a nonempty array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) bad(std::string(where) + " rows must be nonempty arrays");
  ComplexMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols)
      bad(std::string(where) + " rows must all have the same length");
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = entry(j[i][k], where);
  }
  return m;
}

json matrix_to(const ComplexMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) {
      const Complex v = m(i, k);
      if (v.imag() == 0.0)
        row.push_back(v.real());
      else
        row.push_back(json::array({v.real(), v.imag()}));
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<ComplexMatrix> matrix_list(const json& j, const char* where) {
  if (!j.is_array()) bad(std::string(where) + " must be an array of matrices");
  std::vector<ComplexMatrix> out;
  for (const auto& item : j) out.push_back(matrix_from(item, where));
  return out;
}

PotentialSpec potential_from(const json& j, std::size_t n, const char* where) {
  if (!j.is_object()) bad(std::string(where) + " must be an object");
  const std::string type = need(j, "type").get<std::string>();
  if (type == "zero") return PotentialSpec::zero(n);
  const std::vector<ComplexMatrix> data = matrix_list(need(j, "data"), where);
  for (const auto& m : data)
    if (m.rows() != n || m.cols() != n)
      bad(std::string(where) + " blocks must be " + std::to_string(n) + "x" + std::to_string(n));
  if (type == "constant") {
    if (data.size() != 1) bad(std::string(where) + " constant takes exactly one block");
    return PotentialSpec::constant(data[0]);
  }
  if (type == "polynomial") return PotentialSpec::polynomial(data);
  if (type == "samples") return PotentialSpec::samples(data);
  bad(std::string(where) + " has unknown type \"" + type + "\"");
}

json potential_to(const PotentialSpec& p) {
  json j;
  switch (p.kind) {
    case PotentialSpec::Kind::kZero:
      j["type"] = "zero";
      return j;
    case PotentialSpec::Kind::kConstant:
      j["type"] = "constant";
      break;
    case PotentialSpec::Kind::kPolynomial:
      j["type"] = "polynomial";
      break;
    case PotentialSpec::Kind::kSamples:
      j["type"] = "samples";
      break;
  }
  json data = json::array();
  for (const auto& m : p.data) data.push_back(matrix_to(m));
  j["data"] = data;
  return j;
}

MatrixPolynomial poly_from(const json& j, std::size_t d, const char* where) {
  MatrixPolynomial p;
  p.coeffs = matrix_list(j, where);
  if (p.coeffs.empty()) bad(std::string(where) + " needs at least one coefficient block");
  for (const auto& m : p.coeffs)
    if (m.rows() != d || m.cols() != d)
      bad(std::string(where) + " blocks must be " + std::to_string(d) + "x" + std::to_string(d));
  return p;
}

BoundaryFamily family_from(const json& j, std::size_t d) {
  if (!j.is_object()) bad("family must be an object");
  const std::string type = need(j, "type").get<std::string>();
  if (type == "robin") return BoundaryFamily::robin(poly_from(need(j, "theta"), d, "family.theta"));
  if (type == "general")
    return BoundaryFamily::general(poly_from(need(j, "x"), d, "family.x"),
                                   poly_from(need(j, "y"), d, "family.y"));
  if (type == "sampled-robin") {
    const json& jt = need(j, "ts");
    if (!jt.is_array() || jt.empty()) bad("family.ts must be a nonempty array");
    std::vector<double> ts;
    for (const auto& v : jt) ts.push_back(num(v, "family.ts"));
    std::vector<ComplexMatrix> thetas = matrix_list(need(j, "thetas"), "family.thetas");
    for (const auto& m : thetas)
      if (m.rows() != d || m.cols() != d) bad("family.thetas blocks must match the boundary size");
    return BoundaryFamily::sampled_robin(ts, thetas);
  }
  bad("family has unknown type \"" + type + "\"");
}

}  // namespace

double ProblemConfig::scan_lo() const {
  if (has_window) return window_lo;
  double dt = 0.0;
  for (double v : oracle.dt_ladder) dt = std::max(dt, v);
  return std::min(t0 - dt, oracle.grid_center - oracle.grid_halfwidth);
}

double ProblemConfig::scan_hi() const {
  if (has_window) return window_hi;
  double dt = 0.0;
  for (double v : oracle.dt_ladder) dt = std::max(dt, v);
  return std::max(t0 + dt, oracle.grid_center + oracle.grid_halfwidth);
}

ProblemConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) bad("top level must be an object");

  ProblemConfig cfg;
  if (j.contains("name")) cfg.name = j.at("name").get<std::string>();
  const json& interval = need(j, "interval");
  if (!interval.is_array() || interval.size() != 2) bad("interval must be [a, b]");
  cfg.a = num(interval[0], "interval");
  cfg.b = num(interval[1], "interval");
  if (!(cfg.a < cfg.b)) bad("interval must satisfy a < b");
  cfg.n = index_num(need(j, "n"), "n");
  if (cfg.n == 0) bad("n must be positive");
  cfg.N = index_num(need(j, "grid_points"), "grid_points");
  if (cfg.N < 2) bad("grid_points must be at least 2");
  cfg.potential = potential_from(need(j, "potential"), cfg.n, "potential");
  cfg.family = family_from(need(j, "family"), 2 * cfg.n);
  if (j.contains("additive")) {
    const json& add = j.at("additive");
    if (!add.is_array()) bad("additive must be an array of potential objects");
    std::vector<PotentialSpec> coeffs;
    for (const auto& item : add) coeffs.push_back(potential_from(item, cfg.n, "additive"));
    cfg.family.set_additive(std::move(coeffs));
  }
  cfg.t0 = num(need(j, "t0"), "t0");
  if (j.contains("window")) {
    const json& w = j.at("window");
    if (!w.is_array() || w.size() != 2) bad("window must be [lo, hi]");
    cfg.has_window = true;
    cfg.window_lo = num(w[0], "window");
    cfg.window_hi = num(w[1], "window");
    if (!(cfg.window_lo < cfg.window_hi)) bad("window must satisfy lo < hi");
    if (cfg.t0 < cfg.window_lo || cfg.t0 > cfg.window_hi) bad("t0 lies outside the window");
    cfg.family.set_window(cfg.window_lo, cfg.window_hi);
  }
  const json& target = need(j, "target");
  const std::string kind = need(target, "kind").get<std::string>();
  if (kind == "value") {
    cfg.target.kind = TargetSpec::Kind::kValue;
    cfg.target.value = num(need(target, "value"), "target.value");
  } else if (kind == "index") {
    cfg.target.kind = TargetSpec::Kind::kIndex;
    cfg.target.index = index_num(need(target, "index"), "target.index");
  } else {
    bad("target.kind must be \"value\" or \"index\"");
  }
  if (j.contains("oracle")) {
    const json& o = j.at("oracle");
    if (o.contains("dt_ladder")) {
      cfg.oracle.dt_ladder.clear();
      for (const auto& v : o.at("dt_ladder"))
        cfg.oracle.dt_ladder.push_back(num(v, "oracle.dt_ladder"));
      if (cfg.oracle.dt_ladder.empty()) bad("oracle.dt_ladder must not be empty");
      for (double dt : cfg.oracle.dt_ladder)
        if (dt <= 0.0) bad("oracle.dt_ladder entries must be positive");
    }
    if (o.contains("t_grid")) {
      const json& g = o.at("t_grid");
      cfg.oracle.grid_center = num(need(g, "center"), "oracle.t_grid.center");
      cfg.oracle.grid_halfwidth = num(need(g, "halfwidth"), "oracle.t_grid.halfwidth");
      cfg.oracle.grid_points = index_num(need(g, "points"), "oracle.t_grid.points");
      if (cfg.oracle.grid_halfwidth <= 0.0) bad("oracle.t_grid.halfwidth must be positive");
      if (cfg.oracle.grid_points < 3) bad("oracle.t_grid.points must be at least 3");
    }
  }
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    if (t.contains("cluster_tol")) cfg.tols.cluster_tol = num(t.at("cluster_tol"), "cluster_tol");
    if (t.contains("cluster_tol_mu"))
      cfg.tols.cluster_tol_mu = num(t.at("cluster_tol_mu"), "cluster_tol_mu");
    if (t.contains("formula_mismatch"))
      cfg.tols.formula_mismatch = num(t.at("formula_mismatch"), "formula_mismatch");
    if (cfg.tols.cluster_tol <= 0.0 || cfg.tols.cluster_tol_mu <= 0.0 ||
        cfg.tols.formula_mismatch <= 0.0)
      bad("tolerances must be positive");
  }
  return cfg;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

const std::vector<std::string> kGalleryNames = {
    "neumann-to-robin", "dirichlet-double-split", "robin-matrix-potential", "additive-ramp"};

std::string gallery_json(const std::string& name) {
  json j;
  j["name"] = name;
  if (name == "neumann-to-robin") {
    j["interval"] = {0.0, 1.0};
    j["n"] = 1;
    j["grid_points"] = 200;
    j["potential"] = {{"type", "zero"}};
    j["family"] = {{"type", "robin"},
                   {"theta", json::array({matrix_to(ComplexMatrix(2, 2)),
                                          matrix_to(ComplexMatrix::identity(2))})}};
    j["window"] = {-0.5, 0.5};
    j["t0"] = 0.0;
    j["target"] = {{"kind", "value"}, {"value", 0.0}};
    j["oracle"] = {{"dt_ladder", {1e-3, 5e-4, 2.5e-4}},
                   {"t_grid", {{"center", 0.0}, {"halfwidth", 0.12}, {"points", 9}}}};
  } else if (name == "dirichlet-double-split") {
    ComplexMatrix mix(4, 4);
    mix(0, 1) = 1.0;
    mix(1, 0) = 1.0;
    mix(2, 3) = 1.0;
    mix(3, 2) = 1.0;
    j["interval"] = {0.0, 1.0};
    j["n"] = 2;
    j["grid_points"] = 100;
    j["potential"] = {{"type", "zero"}};
    j["family"] = {
        {"type", "general"},
        {"x", json::array({matrix_to(ComplexMatrix::identity(4))})},
        {"y", json::array({matrix_to(ComplexMatrix(4, 4)), matrix_to(mix)})}};
    // The elimination matrix I - (t/h) B of this condition is singular at
    // t = +-h; with 100 grid steps the family is only usable for |t| < 0.01.
    j["window"] = {-0.008, 0.008};
    j["t0"] = 0.0;
    j["target"] = {{"kind", "value"}, {"value", 9.87}};
    j["oracle"] = {{"dt_ladder", {1e-3, 5e-4, 2.5e-4}},
                   {"t_grid", {{"center", 0.0}, {"halfwidth", 0.004}, {"points", 9}}}};
  } else if (name == "robin-matrix-potential") {
    ComplexMatrix v0(2, 2), v1(2, 2);
    v0(0, 1) = 0.3;
    v0(1, 0) = 0.3;
    v0(1, 1) = 1.0;
    v1(0, 0) = 1.0;
    v1(1, 1) = -1.0;
    ComplexMatrix th0(4, 4), th1(4, 4);
    th0(0, 0) = 0.5;
    th0(1, 1) = 1.0;
    th0(2, 2) = 1.5;
    th0(3, 3) = 0.75;
    th1(0, 0) = 0.2;
    th1(0, 1) = 0.1;
    th1(1, 0) = 0.1;
    th1(1, 1) = -0.1;
    th1(2, 2) = 0.3;
    th1(2, 3) = 0.05;
    th1(3, 2) = 0.05;
    th1(3, 3) = -0.2;
    j["interval"] = {0.0, 1.0};
    j["n"] = 2;
    j["grid_points"] = 100;
    j["potential"] = {{"type", "polynomial"},
                      {"data", json::array({matrix_to(v0), matrix_to(v1)})}};
    j["family"] = {{"type", "robin"},
                   {"theta", json::array({matrix_to(th0), matrix_to(th1)})}};
    j["window"] = {-0.5, 0.5};
    j["t0"] = 0.0;
    j["target"] = {{"kind", "index"}, {"index", 0}};
    j["oracle"] = {{"dt_ladder", {1e-3, 5e-4, 2.5e-4}},
                   {"t_grid", {{"center", 0.0}, {"halfwidth", 0.2}, {"points", 9}}}};
  } else if (name == "additive-ramp") {
    ComplexMatrix r0(1, 1), r1(1, 1);
    r0(0, 0) = -0.5;
    r1(0, 0) = 1.0;
    j["interval"] = {0.0, 1.0};
    j["n"] = 1;
    j["grid_points"] = 100;
    j["potential"] = {{"type", "zero"}};
    j["family"] = {{"type", "robin"},
                   {"theta", json::array({matrix_to(ComplexMatrix::identity(2))})}};
    j["additive"] = json::array(
        {json{{"type", "zero"}},
         json{{"type", "polynomial"}, {"data", json::array({matrix_to(r0), matrix_to(r1)})}}});
    j["window"] = {-0.5, 0.5};
    j["t0"] = 0.0;
    j["target"] = {{"kind", "index"}, {"index", 0}};
    j["oracle"] = {{"dt_ladder", {1e-3, 5e-4, 2.5e-4}},
                   {"t_grid", {{"center", 0.0}, {"halfwidth", 0.1}, {"points", 9}}}};
  } else {
    throw UnknownGallery("unknown gallery \"" + name + "\"");
  }
  return j.dump(2) + "\n";
}

ProblemConfig gallery_config(const std::string& name) { return parse_config(gallery_json(name)); }

std::shared_ptr<const DiscreteTriplet> make_triplet(const ProblemConfig& cfg) {
  return std::make_shared<const DiscreteTriplet>(
      build_triplet(cfg.a, cfg.b, cfg.n, cfg.N, cfg.potential));
}

LambdaGroup select_group(const ExtensionOperator& op, const ProblemConfig& cfg) {
  if (cfg.target.kind == TargetSpec::Kind::kValue)
    return lambda_group(op, cfg.target.value, cfg.tols.cluster_tol);
  return lambda_group_by_index(op, cfg.target.index, cfg.tols.cluster_tol);
}

}  // namespace eigencurve
