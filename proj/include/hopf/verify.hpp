#pragma once

#include <map>
#include <string>
#include <vector>

#include "hopf/calculus.hpp"

namespace hopf::verify {

struct CheckResult {
  std::string name;
  int criterion = 0;  // grouping tag 1..14; 0 = supplementary
  bool pass = false;
  double value = 0;   // measured figure (defect, slope error, ...)
  double tol = 0;
  std::string detail;
};

// full deterministic battery; tolerance overrides are keyed by check name
std::vector<CheckResult> run_all(const fourier::EngineParams& base,
                                 const std::map<std::string, double>& tol_overrides = {});

std::string report_json(const std::vector<CheckResult>& results);

}  // namespace hopf::verify
