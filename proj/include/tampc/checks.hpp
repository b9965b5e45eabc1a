#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tampc {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Invariant and oracle suite: estimator sign and zero data, Dörfler minimality,
/// bisection nestedness, MPC feedback/continuity, FEM matrix properties and the
/// discrete Laplacian eigenfunction. Deterministic (fixed RNG seed).
[[nodiscard]] std::vector<CheckResult> run_property_checks();

/// Prints one "PASS name" / "FAIL name: detail" line per result; true when all passed.
bool print_check_results(std::ostream& out, const std::vector<CheckResult>& results);

}  // namespace tampc
