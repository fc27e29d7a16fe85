#pragma once
#include <array>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "eigencurve/discretization.hpp"
#include "eigencurve/perturbation.hpp"
#include "eigencurve/spectral.hpp"

namespace eigencurve {

// One eigenvalue branch followed over a parameter grid.
struct TrackedCurve {
  std::vector<double> t;
  std::vector<double> lambda;
  bool complete = true;
};

// All branches of one group over a common grid, with the worst matching
// margin seen while labeling them.
struct TrackedCurves {
  std::vector<double> t_grid;
  std::vector<TrackedCurve> curves;
  double min_margin = 1.0;
};

// Follow the eigenvalues of a group across a parameter grid by direct
// diagonalization at every grid point. The cluster members at each t are
// the eigenvectors with the largest total overlap against the base group's
// eigenspace; branch labels are then chained between neighboring grid
// points through the pairwise eigenvector overlaps. Labels are assigned in
// ascending eigenvalue order at the smallest grid point, so the result
// depends only on the set of grid values, not on their order.
// Throws TrackingAmbiguity when an overlap decision has margin below 0.1
// and the competing eigenvalues actually differ; a finer grid resolves it.
TrackedCurves track_curves(std::shared_ptr<const DiscreteTriplet> trip, const BoundaryFamily& fam,
                           const LambdaGroup& group, const std::vector<double>& t_grid);

// First and second Taylor coefficients of a sampled curve at t0 by central
// differences over a ladder of step sizes, extrapolated to zero step. The
// error fields report the last extrapolation correction. Requires samples
// at t0 and t0 +/- dt for every ladder step. Throws LadderInconsistent
// when successive raw estimates diverge by more than 100x the decay the
// ladder predicts, which signals a kink or a mistracked branch.
struct FdEstimate {
  double c1 = 0.0;
  double c2 = 0.0;
  double error_c1 = 0.0;
  double error_c2 = 0.0;
  std::vector<double> c1_ladder;
  std::vector<double> c2_ladder;
};
FdEstimate fd_derivatives(const TrackedCurve& curve, double t0,
                          const std::vector<double>& dt_ladder = {1e-3, 5e-4, 2.5e-4});

// One row of the formula-versus-oracle comparison.
struct BranchComparison {
  std::size_t branch_i = 0;
  std::size_t branch_k = 0;
  double mu = 0.0;
  double nu = 0.0;
  double c1_formula = 0.0;
  double c2_formula = 0.0;
  double c1_fd = 0.0;
  double c2_fd = 0.0;
  double abs_dev_c1 = 0.0;
  double abs_dev_c2 = 0.0;
  double rel_dev_c1 = 0.0;
  double rel_dev_c2 = 0.0;
  bool pass = false;
};

struct OracleReport {
  double t0 = 0.0;
  std::vector<double> t_grid;
  TrackedCurves curves;
  std::vector<FdEstimate> fd;              // one per tracked curve
  std::vector<BranchComparison> branches;  // engine branch order
  bool all_pass = false;
  // Optional grid-refinement rows (N, c1, c2), filled by drivers.
  std::vector<std::array<double, 3>> convergence_table;
};

// Match the expansion branches against finite-difference estimates from the
// tracked curves. Labels on the oracle side are not trusted: branches are
// paired by sorting both sides by c1 and, inside clusters of equal c1, by
// c2. A branch passes when |dc1| <= 1e-6 * scale and |dc2| <= 1e-4 * scale
// with scale = max(1, |lambda|, |c1|, |c2|).
OracleReport compare(const ExpansionResult& engine, const TrackedCurves& curves,
                     const std::vector<double>& dt_ladder = {1e-3, 5e-4, 2.5e-4});

// CSV rendering of the comparison rows, one line per branch.
std::string oracle_csv(const OracleReport& report);

}  // namespace eigencurve
