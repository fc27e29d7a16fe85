#include "eigencurve/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "eigencurve/errors.hpp"

namespace eigencurve {

namespace {

std::size_t thread_count(std::size_t jobs) {
  std::size_t cap = std::thread::hardware_concurrency();
  if (cap == 0) cap = 1;
  if (const char* s = std::getenv("EIGENCURVE_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(s, &end, 10);
    if (end != s && v >= 1) cap = std::min<std::size_t>(cap, v);
  }
  return std::max<std::size_t>(1, std::min(cap, jobs));
}

// Cluster members at one grid point: eigenvalues ascending, their
// eigenvector columns, and the weight gap separating the selected columns
// from the best rejected one.
struct PointCluster {
  std::vector<double> values;
  ComplexMatrix vectors;
  double selection_margin = 1.0;
};

PointCluster select_cluster(const ExtensionOperator& op, const ComplexMatrix& base_u,
                            std::size_t m) {
  const std::size_t dim = op.dim();
  const ComplexMatrix ov = base_u.adjoint() * op.eig.vectors;
  std::vector<double> weight(dim, 0.0);
  for (std::size_t k = 0; k < dim; ++k) {
    double w = 0.0;
    for (std::size_t i = 0; i < ov.rows(); ++i) w += std::norm(ov(i, k));
    weight[k] = w;
  }
  std::vector<std::size_t> order(dim);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return weight[a] > weight[b]; });

  PointCluster out;
  out.selection_margin = dim > m ? weight[order[m - 1]] - weight[order[m]] : 1.0;
  std::vector<std::size_t> chosen(order.begin(), order.begin() + m);
  std::sort(chosen.begin(), chosen.end());
  out.values.reserve(m);
  out.vectors = ComplexMatrix(dim, m);
  for (std::size_t j = 0; j < m; ++j) {
    out.values.push_back(op.eig.values[chosen[j]]);
    for (std::size_t i = 0; i < dim; ++i) out.vectors(i, j) = op.eig.vectors(i, chosen[j]);
  }
  return out;
}

// Permutation sending each column of the current cluster to the label of
// the previous-point column it overlaps most. Greedy on the overlap matrix;
// a contested decision only counts as ambiguous when the competing
// eigenvalues actually differ at this point.
std::vector<std::size_t> chain_labels(const PointCluster& prev, const PointCluster& cur,
                                      double value_tol, double* min_margin) {
  const std::size_t m = cur.values.size();
  const ComplexMatrix ov = prev.vectors.adjoint() * cur.vectors;
  std::vector<std::vector<double>> o(m, std::vector<double>(m, 0.0));
  for (std::size_t l = 0; l < m; ++l)
    for (std::size_t k = 0; k < m; ++k) o[k][l] = std::norm(ov(l, k));

  std::vector<bool> row_used(m, false), col_used(m, false);
  std::vector<std::size_t> label(m, 0);
  for (std::size_t step = 0; step < m; ++step) {
    std::size_t bk = 0, bl = 0;
    double best = -1.0;
    for (std::size_t k = 0; k < m; ++k) {
      if (row_used[k]) continue;
      for (std::size_t l = 0; l < m; ++l) {
        if (col_used[l]) continue;
        if (o[k][l] > best) {
          best = o[k][l];
          bk = k;
          bl = l;
        }
      }
    }
    double rival = -1.0;
    for (std::size_t k = 0; k < m; ++k) {
      if (row_used[k] || k == bk) continue;
      if (std::abs(cur.values[k] - cur.values[bk]) <= value_tol) continue;
      rival = std::max(rival, o[k][bl]);
    }
    if (rival >= 0.0) {
      const double margin = best - rival;
      *min_margin = std::min(*min_margin, margin);
      if (margin < 0.1)
        throw TrackingAmbiguity("track_curves: branch matching margin " + std::to_string(margin) +
                                " below 0.1, refine the parameter grid");
    }
    row_used[bk] = true;
    col_used[bl] = true;
    label[bk] = bl;
  }
  return label;
}

double curve_sample(const TrackedCurve& curve, double t) {
  double span = 1.0;
  if (!curve.t.empty()) span = std::max(span, std::abs(curve.t.front()) + std::abs(curve.t.back()));
  const double tol = 1e-12 * span;
  for (std::size_t j = 0; j < curve.t.size(); ++j)
    if (std::abs(curve.t[j] - t) <= tol) return curve.lambda[j];
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", t);
  throw BadGrid(std::string("fd_derivatives: curve has no sample at t = ") + buf);
}

// Polynomial extrapolation of (x_i, y_i) to x = 0, with the magnitude of
// the final correction as error estimate.
double extrapolate_to_zero(const std::vector<double>& x, std::vector<double> y, double* err) {
  const std::size_t k = y.size();
  double prev = y[0];
  for (std::size_t j = 1; j < k; ++j) {
    for (std::size_t i = 0; i + j < k; ++i)
      y[i] = (x[i + j] * y[i] - x[i] * y[i + 1]) / (x[i + j] - x[i]);
    if (j + 1 < k) prev = y[0];
  }
  *err = k > 1 ? std::abs(y[0] - prev) : 0.0;
  return y[0];
}

void check_ladder_decay(const std::vector<double>& est, const std::string& label) {
  double scale = 1.0;
  for (double e : est) scale = std::max(scale, std::abs(e));
  const double floor = 1e-12 * scale;
  for (std::size_t i = 2; i < est.size(); ++i) {
    const double prev = std::abs(est[i - 1] - est[i - 2]);
    const double cur = std::abs(est[i] - est[i - 1]);
    if (cur > 100.0 * std::max(prev, floor))
      throw LadderInconsistent("fd_derivatives: " + label +
                               " estimates diverge down the step ladder");
  }
}

}  // namespace

TrackedCurves track_curves(std::shared_ptr<const DiscreteTriplet> trip, const BoundaryFamily& fam,
                           const LambdaGroup& group, const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw BadGrid("track_curves: empty parameter grid");
  std::vector<double> ts = t_grid;
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  const std::size_t m = group.m;
  const std::size_t npts = ts.size();

  std::vector<PointCluster> points(npts);
  std::vector<double> scales(npts, 1.0);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  const auto worker = [&]() {
    for (;;) {
      const std::size_t j = next.fetch_add(1);
      if (j >= npts || failed.load()) return;
      try {
        const ExtensionOperator op = operator_at(trip, fam, ts[j]);
        scales[j] = op.eig.scale();
        points[j] = select_cluster(op, group.U, m);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };
  const std::size_t nthreads = thread_count(npts);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  TrackedCurves out;
  out.t_grid = ts;
  out.curves.assign(m, TrackedCurve{});
  for (auto& c : out.curves) {
    c.t = ts;
    c.lambda.assign(npts, 0.0);
  }

  for (std::size_t j = 0; j < npts; ++j) {
    out.min_margin = std::min(out.min_margin, points[j].selection_margin);
    if (points[j].selection_margin < 0.1)
      throw TrackingAmbiguity("track_curves: cluster selection margin below 0.1 at t = " +
                              std::to_string(ts[j]) + ", refine the parameter grid");
  }

  // Labels follow eigenvector continuity from the smallest grid point,
  // where they are fixed in ascending eigenvalue order. A grid point whose
  // cluster values all coincide carries no orientation, so it never serves
  // as the reference for later points; while every value seen so far is
  // degenerate, ascending order is the (value-irrelevant) convention.
  const auto spread = [](const PointCluster& p) { return p.values.back() - p.values.front(); };
  std::vector<std::size_t> ref_label(m);
  std::iota(ref_label.begin(), ref_label.end(), 0);
  std::size_t ref = 0;
  bool ref_degenerate = spread(points[0]) <= 1e-9 * scales[0];
  for (std::size_t k = 0; k < m; ++k) out.curves[k].lambda[0] = points[0].values[k];
  for (std::size_t j = 1; j < npts; ++j) {
    const double value_tol = 1e-9 * scales[j];
    const bool cur_degenerate = spread(points[j]) <= value_tol;
    std::vector<std::size_t> cur_label(m);
    if (cur_degenerate || ref_degenerate) {
      cur_label = ref_label;
    } else {
      const std::vector<std::size_t> to_ref =
          chain_labels(points[ref], points[j], value_tol, &out.min_margin);
      for (std::size_t k = 0; k < m; ++k) cur_label[k] = ref_label[to_ref[k]];
    }
    if (!cur_degenerate || ref_degenerate) {
      ref = j;
      ref_label = cur_label;
      ref_degenerate = cur_degenerate;
    }
    for (std::size_t k = 0; k < m; ++k) out.curves[cur_label[k]].lambda[j] = points[j].values[k];
  }
  return out;
}

FdEstimate fd_derivatives(const TrackedCurve& curve, double t0,
                          const std::vector<double>& dt_ladder) {
  if (dt_ladder.empty()) throw BadGrid("fd_derivatives: empty step ladder");
  std::vector<double> dts = dt_ladder;
  std::sort(dts.begin(), dts.end(), std::greater<double>());

  FdEstimate out;
  const double at0 = curve_sample(curve, t0);
  std::vector<double> x;
  for (const double dt : dts) {
    const double up = curve_sample(curve, t0 + dt);
    const double dn = curve_sample(curve, t0 - dt);
    out.c1_ladder.push_back((up - dn) / (2.0 * dt));
    out.c2_ladder.push_back((up - 2.0 * at0 + dn) / (2.0 * dt * dt));
    x.push_back(dt * dt);
  }
  check_ladder_decay(out.c1_ladder, "slope");
  check_ladder_decay(out.c2_ladder, "curvature");
  out.c1 = extrapolate_to_zero(x, out.c1_ladder, &out.error_c1);
  out.c2 = extrapolate_to_zero(x, out.c2_ladder, &out.error_c2);
  return out;
}

OracleReport compare(const ExpansionResult& engine, const TrackedCurves& curves,
                     const std::vector<double>& dt_ladder) {
  const std::size_t m = engine.branches.size();
  if (curves.curves.size() != m)
    throw DimensionMismatch("compare: curve count does not match the group multiplicity");

  OracleReport report;
  report.t0 = engine.t0;
  report.t_grid = curves.t_grid;
  report.curves = curves;
  report.fd.reserve(m);
  for (const auto& c : curves.curves) report.fd.push_back(fd_derivatives(c, engine.t0, dt_ladder));

  // Branch labels on the two sides are independent, so pair them by value:
  // ascending c1, and ascending c2 inside each engine slope cluster.
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return report.fd[a].c1 < report.fd[b].c1;
  });
  std::size_t pos = 0;
  std::vector<std::size_t> paired(m, 0);
  for (const std::size_t size : engine.group_sizes) {
    std::stable_sort(order.begin() + pos, order.begin() + pos + size,
                     [&](std::size_t a, std::size_t b) { return report.fd[a].c2 < report.fd[b].c2; });
    pos += size;
  }
  for (std::size_t k = 0; k < m; ++k) paired[k] = order[k];

  report.all_pass = true;
  for (std::size_t k = 0; k < m; ++k) {
    const ExpansionBranch& br = engine.branches[k];
    const FdEstimate& fd = report.fd[paired[k]];
    BranchComparison row;
    row.branch_i = br.group_index;
    row.branch_k = br.branch_index;
    row.mu = br.mu;
    row.nu = br.nu;
    row.c1_formula = br.c1;
    row.c2_formula = br.c2;
    row.c1_fd = fd.c1;
    row.c2_fd = fd.c2;
    row.abs_dev_c1 = std::abs(row.c1_formula - row.c1_fd);
    row.abs_dev_c2 = std::abs(row.c2_formula - row.c2_fd);
    const double scale =
        std::max({1.0, std::abs(engine.lambda), std::abs(row.c1_formula), std::abs(row.c2_formula)});
    row.rel_dev_c1 = row.abs_dev_c1 / scale;
    row.rel_dev_c2 = row.abs_dev_c2 / scale;
    row.pass = row.abs_dev_c1 <= 1e-6 * scale && row.abs_dev_c2 <= 1e-4 * scale;
    report.all_pass = report.all_pass && row.pass;
    report.branches.push_back(row);
  }
  return report;
}

std::string oracle_csv(const OracleReport& report) {
  std::string out =
      "branch_i,branch_k,mu,nu,c1_formula,c2_formula,c1_fd,c2_fd,abs_dev_c1,abs_dev_c2,pass\n";
  char buf[256];
  for (const BranchComparison& row : report.branches) {
    std::snprintf(buf, sizeof buf,
                  "%zu,%zu,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,%s\n", row.branch_i,
                  row.branch_k, row.mu, row.nu, row.c1_formula, row.c2_formula, row.c1_fd,
                  row.c2_fd, row.abs_dev_c1, row.abs_dev_c2, row.pass ? "PASS" : "FAIL");
    out += buf;
  }
  return out;
}

}  // namespace eigencurve
