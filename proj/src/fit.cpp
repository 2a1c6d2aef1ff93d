#include "xdiff/fit.hpp"

#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>

#include "xdiff/error.hpp"

namespace xdiff {

RateFit fit_rate(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2) throw Error("fit_rate: need at least two points");
    const double count = static_cast<double>(points.size());
    double mx = 0.0;
    double my = 0.0;
    for (const auto& [h, e] : points) {
        if (!(h > 0.0) || !(e > 0.0) || !std::isfinite(h) || !std::isfinite(e)) {
            throw Error("fit_rate: entries must be positive and finite");
        }
        mx += std::log(h);
        my += std::log(e);
    }
    mx /= count;
    my /= count;

    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (const auto& [h, e] : points) {
        const double dx = std::log(h) - mx;
        const double dy = std::log(e) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw Error("fit_rate: all h values coincide");

    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    const double sse = std::max(syy - fit.slope * sxy, 0.0);
    fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;

    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    if (points.size() > 2) {
        const double dof = count - 2.0;
        fit.slope_stderr = std::sqrt(sse / dof / sxx);
        const double q = boost::math::quantile(boost::math::students_t(dof), 0.975);
        fit.slope_ci_low = fit.slope - q * fit.slope_stderr;
        fit.slope_ci_high = fit.slope + q * fit.slope_stderr;
    } else {
        fit.slope_stderr = fit.slope_ci_low = fit.slope_ci_high = nan;
    }
    return fit;
}

}  // namespace xdiff
