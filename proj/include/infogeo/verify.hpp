#pragma once

// Identity suites: every cross-route, symmetry and bridge property the
// library is built around, runnable in one shot. The CLI `verify`
// subcommand prints these as a pass/fail table; the acceptance binary maps
// them onto its criteria. Suites are deterministic given the seed.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace infogeo {

struct SuiteResult {
  std::string name;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

struct VerifyOptions {
  std::uint64_t seed = 20240817;
  std::map<std::string, double> tol_overrides;  // suite name -> tolerance
  std::string only;                             // substring filter on names
};

/// Runs all (matching) suites. Empty result means the filter matched
/// nothing; callers decide how to report that.
std::vector<SuiteResult> run_verification(const VerifyOptions& opt = {});

}  // namespace infogeo
