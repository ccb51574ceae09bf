#pragma once

// The identity suite behind `weylsheet selfcheck` and the acceptance binary.
// Every check is deterministic: fixed seeds, fixed grids, fixed formatting.

#include <functional>
#include <string>
#include <vector>

namespace weylsheet {

struct Measure {
  std::string label;
  double value = 0;
  double bound = 0;
  bool upper = true;  // value <= bound when true, value > bound otherwise

  bool ok() const;
};

struct CheckResult {
  int id = 0;
  std::string name;
  std::vector<Measure> measures;
  std::string error;  // set when the check threw

  bool pass() const;
};

/// One line: "PASS  3 theorema-egregium  label=value<=bound ...".
std::string format_result(const CheckResult& r);

CheckResult check_effective_thickness();
CheckResult check_boundary_ratio();
CheckResult check_theorema_egregium();
CheckResult check_weyl();
CheckResult check_thermal_solver();
CheckResult check_conformal_law();
CheckResult check_congruence();
CheckResult check_shape_parameter();
CheckResult check_variational();
CheckResult check_minkowski();
/// Grid export -> load bit-exactness (the in-process half of the determinism check).
CheckResult check_grid_round_trip();

/// Runs all checks in order, reporting each as it finishes.
std::vector<CheckResult> run_selfcheck(const std::function<void(const CheckResult&)>& on_result = {});

}  // namespace weylsheet
