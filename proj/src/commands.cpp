#include "eigencurve/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <json.hpp>

#include "eigencurve/errors.hpp"
#include "eigencurve/oracle.hpp"
#include "eigencurve/perturbation.hpp"

namespace eigencurve {

using json = nlohmann::ordered_json;

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

std::string fmt3(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

std::vector<double> linspace(double lo, double hi, std::size_t k) {
  std::vector<double> out(k);
  for (std::size_t i = 0; i < k; ++i)
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(k - 1);
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write \"" + path.string() + "\"");
  out << content;
}

std::filesystem::path prepare_out_dir(const CommandOptions& opts) {
  std::filesystem::path dir(opts.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory \"" + dir.string() + "\"");
  return dir;
}

bool want_csv(const CommandOptions& opts) { return opts.format != "json"; }
bool want_json(const CommandOptions& opts) { return opts.format != "csv"; }

json complex_vector(const ComplexMatrix& v) {
  json out = json::array();
  for (std::size_t i = 0; i < v.rows(); ++i)
    out.push_back(json::array({v(i, 0).real(), v(i, 0).imag()}));
  return out;
}

// Sample points covering the family's parameter range for scans.
std::vector<double> scan_grid(const ProblemConfig& cfg) { return linspace(cfg.scan_lo(), cfg.scan_hi(), 33); }

struct CheckLine {
  bool pass = true;
  std::string name;
  std::string detail;
};

void print_line(std::ostream& out, const CheckLine& line) {
  out << (line.pass ? "PASS  " : "FAIL  ") << line.name;
  if (!line.detail.empty()) out << "  " << line.detail;
  out << "\n";
}

CheckLine run_check(const std::string& name, const std::function<CheckLine()>& body) {
  try {
    CheckLine line = body();
    line.name = name;
    return line;
  } catch (const EigencurveError& e) {
    return {false, name, e.what()};
  }
}

}  // namespace

int cmd_check(const ProblemConfig& cfg, const CommandOptions& opts, std::ostream& out) {
  (void)opts;
  const auto trip = make_triplet(cfg);
  std::vector<CheckLine> lines;

  lines.push_back(run_check("green-identity", [&] {
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const std::size_t dim = trip->full_dim();
    double worst = 0.0;
    for (int pair = 0; pair < 100; ++pair) {
      ComplexMatrix u(dim, 1), v(dim, 1);
      for (std::size_t i = 0; i < dim; ++i) {
        u(i, 0) = Complex(gauss(rng), gauss(rng));
        v(i, 0) = Complex(gauss(rng), gauss(rng));
      }
      const GreenCheck gc = green_defect(*trip, u, v);
      worst = std::max(worst, gc.defect / std::max(1.0, gc.scale));
    }
    return CheckLine{worst <= 1e-12, "",
                     "max relative defect " + fmt3(worst) + " over 100 random pairs (tol 1e-12)"};
  }));

  lines.push_back(run_check("condition-plane", [&] {
    double worst_sym = 0.0;
    double min_floor = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (double t : scan_grid(cfg)) {
      const ZData zd = cfg.family.z_at(t);
      const std::size_t d = cfg.family.d();
      const ComplexMatrix x = zd.Z.block(0, 0, d, d);
      const ComplexMatrix y = zd.Z.block(0, d, d, d);
      const LagrangianReport rep = check_lagrangian(x, y);
      worst_sym = std::max(worst_sym, rep.symmetry_defect);
      min_floor = std::min(min_floor, rep.frame_floor);
      ok = ok && rep.ok();
    }
    return CheckLine{ok, "",
                     "worst symmetry defect " + fmt3(worst_sym) + ", frame floor " +
                         fmt3(min_floor) + " over 33 window samples"};
  }));

  lines.push_back(run_check("endpoint-elimination", [&] {
    double min_floor = std::numeric_limits<double>::infinity();
    for (double t : scan_grid(cfg)) {
      const GhostExtension ge = ghost_extension(*trip, cfg.family.plane_at(t));
      min_floor = std::min(min_floor, ge.b_floor);
    }
    return CheckLine{true, "", "elimination floor " + fmt3(min_floor) + " over 33 window samples"};
  }));

  lines.push_back(run_check("resolvent-difference", [&] {
    const ExtensionOperator base = assemble_operator(trip, cfg.family.plane_at(cfg.t0));
    const double lambda_min = base.eig.values.front();
    const std::vector<Complex> zetas = {Complex(-1.0, 0.0), Complex(lambda_min - 1.0, 0.0)};
    std::vector<double> probes;
    const double up = cfg.scan_hi() - cfg.t0;
    const double dn = cfg.t0 - cfg.scan_lo();
    if (up > 0.0) probes.push_back(cfg.t0 + std::min(0.1, 0.5 * up));
    if (dn > 0.0) probes.push_back(cfg.t0 - std::min(0.1, 0.5 * dn));
    double worst = 0.0;
    for (double t : probes) {
      const ExtensionOperator other = assemble_operator(trip, cfg.family.plane_at(t));
      for (Complex zeta : zetas) {
        const KreinCheck kc = krein_check(other, base, zeta);
        worst = std::max(worst, kc.defect / std::max(1.0, kc.scale));
      }
    }
    return CheckLine{worst <= 1e-10, "",
                     "max relative defect " + fmt3(worst) + " at " +
                         std::to_string(probes.size() * zetas.size()) + " probes (tol 1e-10)"};
  }));

  bool all = true;
  for (const CheckLine& line : lines) {
    print_line(out, line);
    all = all && line.pass;
  }
  out << (all ? "RESULT PASS" : "RESULT FAIL") << "\n";
  return all ? 0 : 2;
}

namespace {

std::string expand_csv(const ExpansionResult& res) {
  std::string csv = "i,k,lambda,mu,nu,c1,c2\n";
  for (const ExpansionBranch& b : res.branches) {
    csv += std::to_string(b.group_index) + "," + std::to_string(b.branch_index) + "," +
           fmt17(res.lambda) + "," + fmt17(b.mu) + "," + fmt17(b.nu) + "," + fmt17(b.c1) + "," +
           fmt17(b.c2) + "\n";
  }
  return csv;
}

json expand_json(const ExtensionOperator& op0, const ExpansionResult& res) {
  json j;
  j["t0"] = res.t0;
  j["lambda"] = res.lambda;
  j["m"] = res.m;
  j["m_prime"] = res.m_prime;
  j["group_sizes"] = res.group_sizes;
  j["formula"] = res.formula_used;
  j["cross_check_defect"] = res.cross_check_defect;
  json branches = json::array();
  const std::size_t d = op0.triplet->d();
  for (const ExpansionBranch& b : res.branches) {
    json jb;
    jb["i"] = b.group_index;
    jb["k"] = b.branch_index;
    jb["mu"] = b.mu;
    jb["nu"] = b.nu;
    jb["c1"] = b.c1;
    jb["c2"] = b.c2;
    const ComplexMatrix trace = op0.TE * b.u;
    jb["gamma0_u"] = complex_vector(trace.block(0, 0, d, 1));
    jb["phi"] = complex_vector(b.phi);
    branches.push_back(jb);
  }
  j["branches"] = branches;
  return j;
}

}  // namespace

int cmd_expand(const ProblemConfig& cfg, const CommandOptions& opts, std::ostream& out) {
  const auto trip = make_triplet(cfg);
  const ExtensionOperator op0 = operator_at(trip, cfg.family, cfg.t0);
  const LambdaGroup group = select_group(op0, cfg);
  const ExpansionResult res = expand_eigencurves(op0, cfg.family, cfg.t0, group, cfg.tols);

  const auto dir = prepare_out_dir(opts);
  std::vector<std::string> written;
  if (want_csv(opts)) {
    write_file(dir / "expand.csv", expand_csv(res));
    written.push_back("expand.csv");
  }
  if (want_json(opts)) {
    write_file(dir / "expand.json", expand_json(op0, res).dump(2) + "\n");
    written.push_back("expand.json");
  }

  out << "lambda " << fmt17(res.lambda) << ", multiplicity " << res.m << ", " << res.m_prime
      << " slope cluster(s), formula " << res.formula_used << "\n";
  for (const ExpansionBranch& b : res.branches)
    out << "branch (" << b.group_index << "," << b.branch_index << ")  c1 " << fmt17(b.c1)
        << "  c2 " << fmt17(b.c2) << "\n";
  for (const std::string& name : written) out << "wrote " << (dir / name).string() << "\n";
  return 0;
}

namespace {

std::vector<double> oracle_grid(const ProblemConfig& cfg, const std::vector<double>& ladder) {
  std::vector<double> ts = linspace(cfg.oracle.grid_center - cfg.oracle.grid_halfwidth,
                                    cfg.oracle.grid_center + cfg.oracle.grid_halfwidth,
                                    cfg.oracle.grid_points);
  ts.push_back(cfg.t0);
  for (double dt : ladder) {
    ts.push_back(cfg.t0 + dt);
    ts.push_back(cfg.t0 - dt);
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

json oracle_json(const OracleReport& rep) {
  json j;
  j["t0"] = rep.t0;
  j["all_pass"] = rep.all_pass;
  j["min_margin"] = rep.curves.min_margin;
  j["t_grid"] = rep.t_grid;
  json curves = json::array();
  for (std::size_t k = 0; k < rep.curves.curves.size(); ++k) {
    json jc;
    jc["lambda"] = rep.curves.curves[k].lambda;
    if (k < rep.fd.size()) {
      jc["c1_fd"] = rep.fd[k].c1;
      jc["c2_fd"] = rep.fd[k].c2;
      jc["c1_ladder"] = rep.fd[k].c1_ladder;
      jc["c2_ladder"] = rep.fd[k].c2_ladder;
      jc["error_c1"] = rep.fd[k].error_c1;
      jc["error_c2"] = rep.fd[k].error_c2;
    }
    curves.push_back(jc);
  }
  j["curves"] = curves;
  json branches = json::array();
  for (const BranchComparison& b : rep.branches) {
    json jb;
    jb["i"] = b.branch_i;
    jb["k"] = b.branch_k;
    jb["mu"] = b.mu;
    jb["nu"] = b.nu;
    jb["c1_formula"] = b.c1_formula;
    jb["c2_formula"] = b.c2_formula;
    jb["c1_fd"] = b.c1_fd;
    jb["c2_fd"] = b.c2_fd;
    jb["abs_dev_c1"] = b.abs_dev_c1;
    jb["abs_dev_c2"] = b.abs_dev_c2;
    jb["rel_dev_c1"] = b.rel_dev_c1;
    jb["rel_dev_c2"] = b.rel_dev_c2;
    jb["pass"] = b.pass;
    branches.push_back(jb);
  }
  j["branches"] = branches;
  if (!rep.convergence_table.empty()) {
    json rows = json::array();
    for (const auto& row : rep.convergence_table)
      rows.push_back(json::array({row[0], row[1], row[2]}));
    j["convergence_table"] = rows;
  }
  return j;
}

}  // namespace

int cmd_oracle(const ProblemConfig& cfg, const CommandOptions& opts, std::ostream& out) {
  const auto trip = make_triplet(cfg);
  const ExtensionOperator op0 = operator_at(trip, cfg.family, cfg.t0);
  const LambdaGroup group = select_group(op0, cfg);
  const ExpansionResult res = expand_eigencurves(op0, cfg.family, cfg.t0, group, cfg.tols);

  std::vector<double> ladder = cfg.oracle.dt_ladder;
  if (opts.predict_only) {
    // The prediction is an exact quadratic, so the differences carry no
    // truncation error; stretching the ladder as far as the parameter range
    // allows squeezes out the cancellation noise instead.
    const double max_dt = *std::max_element(ladder.begin(), ladder.end());
    const double room = std::min(cfg.scan_hi() - cfg.t0, cfg.t0 - cfg.scan_lo());
    const double stretch = std::clamp(0.5 * room / max_dt, 1.0, 100.0);
    for (double& dt : ladder) dt *= stretch;
  }
  std::vector<double> ts = oracle_grid(cfg, ladder);
  TrackedCurves tracked;
  if (opts.predict_only) {
    const std::vector<std::vector<double>> rows = predict(res, ts);
    tracked.t_grid = ts;
    for (const auto& row : rows) tracked.curves.push_back({ts, row, true});
  } else {
    tracked = track_curves(trip, cfg.family, group, ts);
  }
  const OracleReport rep = compare(res, tracked, ladder);

  const auto dir = prepare_out_dir(opts);
  std::vector<std::string> written;
  if (want_csv(opts)) {
    write_file(dir / "oracle.csv", oracle_csv(rep));
    written.push_back("oracle.csv");
  }
  if (want_json(opts)) {
    write_file(dir / "oracle.json", oracle_json(rep).dump(2) + "\n");
    written.push_back("oracle.json");
  }

  for (const BranchComparison& b : rep.branches)
    out << (b.pass ? "PASS" : "FAIL") << "  branch (" << b.branch_i << "," << b.branch_k
        << ")  |dc1| " << fmt3(b.abs_dev_c1) << "  |dc2| " << fmt3(b.abs_dev_c2) << "\n";
  out << (rep.all_pass ? "RESULT PASS" : "RESULT FAIL") << " (" << rep.branches.size()
      << " branch(es), matching margin " << fmt3(rep.curves.min_margin) << ")\n";
  for (const std::string& name : written) out << "wrote " << (dir / name).string() << "\n";
  return rep.all_pass ? 0 : 2;
}

int cmd_sweep(const ProblemConfig& cfg, const CommandOptions& opts, double t_min, double t_max,
              std::size_t steps, std::ostream& out) {
  if (!(t_min < t_max) || steps < 2) throw ConfigError("sweep needs t_min < t_max and steps >= 2");
  const auto trip = make_triplet(cfg);
  const ExtensionOperator op0 = operator_at(trip, cfg.family, cfg.t0);
  const LambdaGroup group = select_group(op0, cfg);
  const ExpansionResult res = expand_eigencurves(op0, cfg.family, cfg.t0, group, cfg.tols);

  const std::vector<double> ts = linspace(t_min, t_max, steps);
  const TrackedCurves tracked = track_curves(trip, cfg.family, group, ts);
  const std::vector<std::vector<double>> pred = predict(res, tracked.t_grid);

  const std::size_t m = res.branches.size();
  std::string csv = "t,branch_i,branch_k,lambda_predicted,lambda_tracked,residual\n";
  double worst = 0.0;
  for (std::size_t j = 0; j < tracked.t_grid.size(); ++j) {
    // Branch labels on the tracked side are not trusted; at every parameter
    // the predicted and tracked value lists are paired in ascending order.
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pred[a][j] < pred[b][j]; });
    std::vector<double> observed(m);
    for (std::size_t k = 0; k < m; ++k) observed[k] = tracked.curves[k].lambda[j];
    std::sort(observed.begin(), observed.end());
    for (std::size_t rank = 0; rank < m; ++rank) {
      const ExpansionBranch& b = res.branches[order[rank]];
      const double predicted = pred[order[rank]][j];
      const double residual = observed[rank] - predicted;
      worst = std::max(worst, std::abs(residual));
      csv += fmt17(tracked.t_grid[j]) + "," + std::to_string(b.group_index) + "," +
             std::to_string(b.branch_index) + "," + fmt17(predicted) + "," +
             fmt17(observed[rank]) + "," + fmt17(residual) + "\n";
    }
  }

  const auto dir = prepare_out_dir(opts);
  write_file(dir / "sweep.csv", csv);
  out << "max |residual| " << fmt3(worst) << " over " << tracked.t_grid.size()
      << " parameter values\n";
  out << "wrote " << (dir / "sweep.csv").string() << "\n";
  return 0;
}

int cmd_gallery(const std::string& name, const CommandOptions& opts, std::ostream& out) {
  const std::string text = gallery_json(name);
  const auto dir = prepare_out_dir(opts);
  const auto path = dir / (name + ".json");
  write_file(path, text);
  out << "wrote " << path.string() << "\n";
  return 0;
}

}  // namespace eigencurve
