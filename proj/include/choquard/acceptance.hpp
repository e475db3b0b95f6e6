#pragma once

#include <string>
#include <vector>

#include "choquard/common.hpp"

namespace choquard {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double value = 0.0;      // worst measured quantity
  double threshold = 0.0;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  int flagship_grid = 2048;
  std::string out_dir;  // branch CSVs are written here when non-empty
};

CriterionResult run_criterion(int id, const AcceptanceOptions& opt = {});
/// All criteria 1..10 when ids is empty.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt = {}, std::vector<int> ids = {});

/// Robin value at the centre from shooting the radial ODE for r G(r).
double shooting_robin_center(Kind kind, double lambda);
/// Neumann threshold by bisection on the closed-form centre value.
double neumann_threshold_oracle();

}  // namespace choquard
