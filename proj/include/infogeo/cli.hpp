#pragma once

// Command-line front end, callable in-process for tests. Subcommands:
//   report   per-point Hessian-structure reports for a potential, or Fisher
//            summaries for a family
//   verify   run the identity suites, print a pass/fail table
//   foliate  integrate kernel leaves of a degenerate family (RK4)
//   natgrad  natural-gradient descent preconditioned by the Fisher
//            pseudo-inverse restricted to the normal space
// Exit codes: 0 success, 1 verification failure, 2 usage/domain error.

#include <iosfwd>
#include <string>
#include <vector>

namespace infogeo {

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace infogeo
