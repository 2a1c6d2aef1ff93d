#pragma once

#include <span>
#include <utility>

namespace xdiff {

/// Least-squares line log e = intercept + slope log h.
struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    /// Standard error of the slope; NaN with only two points.
    double slope_stderr = 0.0;
    /// 95% Student-t interval for the slope; NaN with only two points.
    double slope_ci_low = 0.0;
    double slope_ci_high = 0.0;
};

/// Points are (h, e). Throws Error for fewer than two points, non-positive
/// entries or a degenerate h column.
RateFit fit_rate(std::span<const std::pair<double, double>> points);

}  // namespace xdiff
