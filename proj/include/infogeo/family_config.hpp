#pragma once

// Family configuration files (JSON). Schema documented in the README:
//
// { "family": "gaussian" }                                  built-ins, or
// { "family": "categorical-softmax", "k": 3 }
// { "family": "linear-reparam", "matrix": [[1],[1]], "inner": {...} }
// { "family": "exponential-family-natural",
//   "psi": "log(1+exp(t1))", "param_names": ["t1"],
//   "sample_space": [ {"kind": "finite", "points": [0,1]} ],
//   "log_base": "0" }                                       optional
// { "family": "custom",
//   "param_names": ["p1","p2"],
//   "log_density": "x1*p1 - log(1+exp(p1)) + ...",          vars x1..xk then params
//   "sample_space": [ {"kind": "line", "center": "p1", "scale": "p2"},
//                     {"kind": "half-line", "scale": "1/p1"} ] }
// plus an optional integration block:
//   "integration": { "method": "exact-sum" | "gauss-hermite" |
//                    "gauss-legendre" | "monte-carlo",
//                    "n": 64, "n_half_line": 128, "seed": 1 }

#include <string>

#include "infogeo/fisher.hpp"

namespace infogeo {

/// Parses a family description from JSON text. Throws Error subclasses on
/// malformed configs (message names the offending key).
FamilySpec family_from_json_text(const std::string& text);

/// Loads the file and parses it.
FamilySpec load_family(const std::string& path);

}  // namespace infogeo
