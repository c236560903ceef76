#pragma once

#include <functional>
#include <optional>

namespace warpdirac {

// Deterministic policy for infima and suprema over the half-line (0, inf).
struct InfimumScanPolicy {
  double r_min = 1e-6;
  double r_max = 1e6;
  int points = 100000;        // log-spaced samples in [r_min, r_max]
  int refine_iterations = 80; // golden-section steps in log r around the discrete extremum
};

struct ScanExtremum {
  double value = 0.0;
  double arg = 0.0;        // location; 0 or +inf when an analytic limit wins
  bool diverges = false;   // true when the scan detected a trend to -inf (or +inf for sup)
};

// Infimum of f over (0, inf). Optional analytic limits at r -> 0 and r -> inf
// are compared against the scanned values. When the discrete minimum sits at
// an end of the grid, the trend there is strictly decreasing and no analytic
// limit is available, the result is the -inf sentinel with the end point as
// witness.
ScanExtremum scan_infimum(const std::function<double(double)>& f, const InfimumScanPolicy& policy,
                          std::optional<double> limit_at_zero = std::nullopt,
                          std::optional<double> limit_at_infinity = std::nullopt);

ScanExtremum scan_supremum(const std::function<double(double)>& f, const InfimumScanPolicy& policy,
                           std::optional<double> limit_at_zero = std::nullopt,
                           std::optional<double> limit_at_infinity = std::nullopt);

}  // namespace warpdirac
