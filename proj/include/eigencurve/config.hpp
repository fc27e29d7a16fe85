#pragma once
#include <cstddef>
#include <string>
#include <vector>

#include "eigencurve/discretization.hpp"
#include "eigencurve/perturbation.hpp"

namespace eigencurve {

// Which eigenvalue group a run works on: the group containing the
// eigenvalue closest to a value, or the group holding a given position in
// the ascending spectrum.
struct TargetSpec {
  enum class Kind { kValue, kIndex };
  Kind kind = Kind::kValue;
  double value = 0.0;
  std::size_t index = 0;
};

// Grid and step-ladder settings for oracle runs and sweeps.
struct OracleSettings {
  std::vector<double> dt_ladder{1e-3, 5e-4, 2.5e-4};
  double grid_center = 0.0;
  double grid_halfwidth = 0.1;
  std::size_t grid_points = 9;
};

// A complete problem instance as read from a JSON config: the interval
// model, the boundary condition family with any additive part, the base
// parameter, the target group, and tolerance overrides.
struct ProblemConfig {
  std::string name = "problem";
  double a = 0.0;
  double b = 1.0;
  std::size_t n = 1;
  std::size_t N = 0;
  PotentialSpec potential;
  BoundaryFamily family;
  bool has_window = false;
  double window_lo = 0.0;
  double window_hi = 0.0;
  double t0 = 0.0;
  TargetSpec target;
  OracleSettings oracle;
  ExpansionTols tols;

  // The parameter range run-level scans may use: the declared window, or a
  // hull of the base point, the oracle grid, and the step ladder.
  double scan_lo() const;
  double scan_hi() const;
};

// Parse a JSON config document. Messages carry line and column positions
// for syntax errors and the offending key for schema errors; both raise
// ConfigError.
ProblemConfig parse_config(const std::string& json_text);
ProblemConfig load_config(const std::string& path);

// Canonical built-in problems. Throws UnknownGallery for other names.
extern const std::vector<std::string> kGalleryNames;
std::string gallery_json(const std::string& name);
ProblemConfig gallery_config(const std::string& name);

// Build the discrete model and the assembled operator at the base point.
std::shared_ptr<const DiscreteTriplet> make_triplet(const ProblemConfig& cfg);
LambdaGroup select_group(const ExtensionOperator& op, const ProblemConfig& cfg);

}  // namespace eigencurve
