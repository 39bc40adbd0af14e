// Acceptance gate: runs the full verification battery at the pinned
// configuration and prints one PASS/FAIL line per criterion. Exits 0 only if
// every criterion passes. Tolerances are pinned in src/verify.cpp.
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "hopf/verify.hpp"

int main() {
  hopf::fourier::EngineParams base;  // pinned: band 12, x-band 4, order 3, seed 42
  std::vector<hopf::verify::CheckResult> results;
  try {
    results = hopf::verify::run_all(base);
  } catch (const std::exception& e) {
    std::printf("FAIL  battery aborted: %s\n", e.what());
    return 1;
  }

  static const char* const descriptions[15] = {
      "",
      "Schur orthogonality of matrix coefficients",
      "Fourier roundtrip and Plancherel identity",
      "Casimir scalarity and eigenvalue ratios",
      "vertical derivative on bundle sections",
      "quantization reproduces operator action",
      "first-order composition matches Leibniz rule",
      "composition is exact on invariant symbols",
      "parametrix inverts invariant elliptic operators exactly",
      "parametrix residual order drops per correction term",
      "difference operators lower the symbol order",
      "pairing route matches coordinate difference route",
      "heat and resolvent symbols (spectral and series routes)",
      "heat semigroup property and sector preservation",
      "dual derivative biorthogonality and Taylor remainder",
  };

  bool all = true;
  for (int crit = 1; crit <= 14; ++crit) {
    bool present = false, pass = true;
    double worst_margin = 0;  // value/tol, worst over the criterion's checks
    std::string failing;
    for (const auto& r : results) {
      if (r.criterion != crit) continue;
      present = true;
      pass = pass && r.pass;
      if (r.tol > 0) worst_margin = std::max(worst_margin, r.value / r.tol);
      if (!r.pass) failing += (failing.empty() ? "" : ", ") + r.name;
    }
    if (!present) {
      pass = false;
      failing = "no checks ran";
    }
    all = all && pass;
    std::printf("%s  criterion %2d: %s (worst value/tol %.3g%s%s)\n", pass ? "PASS" : "FAIL",
                crit, descriptions[crit], worst_margin, failing.empty() ? "" : "; failing: ",
                failing.c_str());
  }
  std::printf("%s\n", all ? "ACCEPTANCE: ALL 14 CRITERIA PASS" : "ACCEPTANCE: FAILURES PRESENT");
  return all ? 0 : 1;
}
