#include "xdiff/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "xdiff/error.hpp"

namespace xdiff {

std::string_view to_string(TensorPreset p) {
    switch (p) {
        case TensorPreset::identity: return "identity";
        case TensorPreset::diagonal: return "diagonal";
        case TensorPreset::rotation_mixed: return "rotation-mixed";
        case TensorPreset::smooth_varying: return "smooth-varying";
        case TensorPreset::cellwise: return "cellwise";
    }
    return "identity";
}

TensorPreset parse_tensor_preset(std::string_view text) {
    if (text == "identity") return TensorPreset::identity;
    if (text == "diagonal") return TensorPreset::diagonal;
    if (text == "rotation-mixed") return TensorPreset::rotation_mixed;
    if (text == "smooth-varying") return TensorPreset::smooth_varying;
    throw ConfigError("unknown tensor preset '" + std::string(text) +
                      "' (expected identity|diagonal|rotation-mixed|smooth-varying)");
}

namespace {

TensorValue rotated(double a1, double a2, double phi) {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    TensorValue v;
    v.xx = a1 * c * c + a2 * s * s;
    v.yy = a1 * s * s + a2 * c * c;
    v.xy = (a1 - a2) * c * s;
    v.yx = v.xy;
    return v;
}

}  // namespace

TensorField TensorField::make(const Grid& grid, TensorPreset preset, const TensorParams& p) {
    if (preset == TensorPreset::cellwise) {
        throw ConfigError("cellwise tensors are built with TensorField::cellwise");
    }
    TensorField f;
    f.grid_ = grid;
    f.preset_ = preset;
    f.params_ = p;
    switch (preset) {
        case TensorPreset::identity:
            f.params_ = TensorParams{};
            f.floor_ = 1.0;
            break;
        case TensorPreset::diagonal:
        case TensorPreset::rotation_mixed:
            if (!(p.a1 > 0.0) || !(p.a2 > 0.0)) throw ConfigError("tensor principal values a1, a2 must be positive");
            f.floor_ = grid.dimension() == 1 ? p.a1 : std::min(p.a1, p.a2);
            break;
        case TensorPreset::smooth_varying:
            if (!(p.a1 > 0.0) || !(p.a2 > 0.0)) throw ConfigError("tensor principal values a1, a2 must be positive");
            if (!(std::abs(p.eps) < 1.0)) throw ConfigError("tensor modulation eps must satisfy |eps| < 1");
            f.floor_ = (1.0 - std::abs(p.eps)) * (grid.dimension() == 1 ? p.a1 : std::min(p.a1, p.a2));
            break;
        case TensorPreset::cellwise:
            break;
    }
    return f;
}

TensorField TensorField::diagonal(const Grid& grid, double a1, double a2) {
    TensorParams p;
    p.a1 = a1;
    p.a2 = a2;
    return make(grid, TensorPreset::diagonal, p);
}

TensorField TensorField::cellwise(const Grid& grid, std::vector<TensorValue> cells, double ellipticity_floor) {
    if (cells.size() != grid.cell_count()) throw Error("cellwise tensor: value count does not match the grid");
    TensorField f;
    f.grid_ = grid;
    f.preset_ = TensorPreset::cellwise;
    f.floor_ = ellipticity_floor;
    f.cells_ = std::move(cells);
    return f;
}

TensorValue TensorField::at(std::size_t cell, double t) const {
    const TensorParams& p = params_;
    switch (preset_) {
        case TensorPreset::identity:
            return {};
        case TensorPreset::diagonal:
            return {p.a1, 0.0, 0.0, p.a2};
        case TensorPreset::rotation_mixed:
            if (grid_.dimension() == 1) return {p.a1, 0.0, 0.0, 1.0};
            return rotated(p.a1, p.a2, p.theta);
        case TensorPreset::smooth_varying: {
            const auto [x, y] = grid_.cell_center(cell);
            const double k = std::numbers::pi / grid_.half_length();
            const double ct = std::cos(p.omega * t);
            if (grid_.dimension() == 1) {
                return {p.a1 * (1.0 + p.eps * std::sin(k * x) * ct), 0.0, 0.0, 1.0};
            }
            const double s = 1.0 + p.eps * std::sin(k * x) * std::cos(k * y) * ct;
            const double phi = p.theta + p.beta * std::sin(k * (x + y)) * ct;
            TensorValue v = rotated(p.a1, p.a2, phi);
            v.xx *= s;
            v.xy *= s;
            v.yx *= s;
            v.yy *= s;
            return v;
        }
        case TensorPreset::cellwise:
            return cells_[cell];
    }
    return {};
}

std::vector<TensorValue> TensorField::sample(double t) const {
    if (preset_ == TensorPreset::cellwise) return cells_;
    std::vector<TensorValue> out(grid_.cell_count());
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = at(c, t);
    return out;
}

double min_eigenvalue(const TensorValue& a) {
    const double off = 0.5 * (a.xy + a.yx);
    const double mean = 0.5 * (a.xx + a.yy);
    const double half_diff = 0.5 * (a.xx - a.yy);
    return mean - std::hypot(half_diff, off);
}

double operator_norm(const TensorValue& a) {
    // Largest singular value of a 2x2 matrix.
    const double p = a.xx * a.xx + a.xy * a.xy + a.yx * a.yx + a.yy * a.yy;
    const double det = a.xx * a.yy - a.xy * a.yx;
    const double disc = std::sqrt(std::max(0.0, p * p - 4.0 * det * det));
    return std::sqrt(0.5 * (p + disc));
}

double sup_norm(std::span<const TensorValue> cells, int dimension) {
    double m = 0.0;
    for (const auto& a : cells) m = std::max(m, dimension == 1 ? std::abs(a.xx) : operator_norm(a));
    return m;
}

ValidationReport validate_tensor(const TensorField& a, std::span<const double> sample_times) {
    ValidationReport r;
    r.ellipticity_floor = a.ellipticity_floor();
    r.min_eigenvalue = std::numeric_limits<double>::infinity();
    const int d = a.grid().dimension();
    const std::vector<double> fallback{0.0};
    const std::span<const double> times = sample_times.empty() ? std::span<const double>(fallback) : sample_times;

    // Eigenvalues computed in floating point may land a few ulps under an exact floor.
    const double floor_with_slack = a.ellipticity_floor() * (1.0 - 64.0 * std::numeric_limits<double>::epsilon());
    bool ok = true;
    for (double t : times) {
        const auto cells = a.sample(t);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const TensorValue& v = cells[c];
            const bool finite = std::isfinite(v.xx) && std::isfinite(v.xy) && std::isfinite(v.yx) && std::isfinite(v.yy);
            const double asym = d == 1 ? 0.0 : std::abs(v.xy - v.yx);
            const double lmin = d == 1 ? v.xx : min_eigenvalue(v);
            r.max_asymmetry = std::max(r.max_asymmetry, asym);
            r.min_eigenvalue = std::min(r.min_eigenvalue, lmin);
            r.sup_norm = std::max(r.sup_norm, d == 1 ? std::abs(v.xx) : operator_norm(v));
            const bool cell_ok = finite && asym == 0.0 && lmin >= floor_with_slack;
            if (!cell_ok && ok) {
                ok = false;
                r.failing_cell = c;
                r.failing_time = t;
                std::ostringstream msg;
                msg << "tensor check failed at cell " << c << ", t = " << t;
                if (!finite) msg << ": non-finite entry";
                else if (asym != 0.0) msg << ": asymmetry " << asym;
                else msg << ": eigenvalue " << lmin << " below floor " << a.ellipticity_floor();
                r.message = msg.str();
            }
        }
    }
    r.passed = ok;
    if (ok) r.message = "ok";
    return r;
}

}  // namespace xdiff
