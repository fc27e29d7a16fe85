#pragma once
#include <cstddef>
#include <ostream>
#include <string>

#include "eigencurve/config.hpp"

namespace eigencurve {

struct CommandOptions {
  std::string out_dir = ".";
  std::string format = "both";  // "csv", "json" or "both"
  unsigned long seed = 12345;   // randomized checks only
  bool predict_only = false;    // oracle: close the loop on the engine's own prediction
};

// Model diagnostics: Green-identity sampling, condition-plane validation
// over the parameter window, endpoint-elimination conditioning scan, and
// resolvent-difference probes at real shifts. Prints one PASS/FAIL line per
// check and returns 0 when all pass, 2 otherwise.
int cmd_check(const ProblemConfig& cfg, const CommandOptions& opts, std::ostream& out);

// Two-term eigenvalue expansion at t0 for the configured group. Writes
// expand.csv / expand.json under the output directory.
int cmd_expand(const ProblemConfig& cfg, const CommandOptions& opts, std::ostream& out);

// Independent verification: track the group's eigenvalue curves across the
// configured grid, differentiate them numerically, and compare against the
// engine coefficients. Writes oracle.csv / oracle.json; returns 0 iff every
// branch passes.
int cmd_oracle(const ProblemConfig& cfg, const CommandOptions& opts, std::ostream& out);

// Predicted versus tracked curves over [t_min, t_max]. Writes sweep.csv.
int cmd_sweep(const ProblemConfig& cfg, const CommandOptions& opts, double t_min, double t_max,
              std::size_t steps, std::ostream& out);

// Write the named built-in configuration as <out>/<name>.json.
int cmd_gallery(const std::string& name, const CommandOptions& opts, std::ostream& out);

}  // namespace eigencurve
