#pragma once

// JSON serialization of per-point reports. Field names are part of the
// public schema (see README): "y", "g", "gamma", "christoffel", "Q", "R",
// "alpha", "beta", "c_fit", "c_residual", "einstein_lambda",
// "einstein_residual", plus the lifted-metric check fields
// "kahler_R_residual", "kahler_ricci_residual", "holo_sectional".

#include <string>

#include "infogeo/hessian.hpp"
#include "infogeo/kahler.hpp"

namespace infogeo {

/// One ndjson line (no trailing newline). `kahler` may be null when the
/// lifted checks were not requested.
std::string report_to_json_line(const HessianReport& rep, const KahlerCheck* kahler);

/// CSV header and row of scalar summary columns for dimension q.
std::string report_csv_header(int q);
std::string report_csv_row(const HessianReport& rep, const KahlerCheck* kahler);

}  // namespace infogeo
