// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Named finite-difference gradient checks covering every differentiable
// building block in the model: pointwise ops, convolutions, normalization,
// attention variants, graph layers, codec, separator blocks, and the
// training objective. Each case builds a tiny fixture, runs one analytic
// backward pass, and compares every parameter gradient against a central
// difference in double precision.

#ifndef EEGSEP_CLI_GRADCHECK_SUITE_H_
#define EEGSEP_CLI_GRADCHECK_SUITE_H_

#include <cstdint>
#include <string>
#include <vector>

namespace eegsep::cli {

// Relative-error acceptance threshold for every case (double precision).
inline constexpr double kGradTolerance = 1e-6;

struct GradCheckRow {
  std::string name;
  double max_rel_err = 0.0;
  std::string worst_param;  // parameter holding the worst entry
  int64_t checked = 0;      // scalar gradient entries compared
  double seconds = 0.0;
  bool pass = false;
};

// All case names, in execution order.
std::vector<std::string> gradcheck_case_names();

// Runs every case. `corrupt_op` names one case whose analytic gradient is
// deliberately damaged after backward (self-test that the harness flags
// wrong gradients); "" disables. Unknown names raise ConfigError.
std::vector<GradCheckRow> run_gradcheck_suite(const std::string& corrupt_op = "");

bool gradcheck_all_pass(const std::vector<GradCheckRow>& rows);

// Fixed-width human-readable table, one row per case plus a verdict line.
std::string gradcheck_table(const std::vector<GradCheckRow>& rows);

}  // namespace eegsep::cli

#endif  // EEGSEP_CLI_GRADCHECK_SUITE_H_
