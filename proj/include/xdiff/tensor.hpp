#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xdiff/grid.hpp"

namespace xdiff {

/// A 2x2 matrix; for d = 1 only xx is used.
struct TensorValue {
    double xx = 1.0;
    double xy = 0.0;
    double yx = 0.0;
    double yy = 1.0;
};

enum class TensorPreset { identity, diagonal, rotation_mixed, smooth_varying, cellwise };

std::string_view to_string(TensorPreset p);
TensorPreset parse_tensor_preset(std::string_view text);  // throws ConfigError

/// Preset parameters. `a1`, `a2` are the principal values, `theta` the
/// principal angle, `beta` the spatial amplitude of the angle, `eps` the
/// relative amplitude of the scalar modulation and `omega` its time frequency.
struct TensorParams {
    double a1 = 1.0;
    double a2 = 1.0;
    double theta = 0.0;
    double beta = 0.0;
    double eps = 0.0;
    double omega = 0.0;

    bool operator==(const TensorParams&) const = default;
};

/// Anisotropy tensor A(x, t) on a grid, with its ellipticity floor lambda.
///
/// smooth-varying: A = s(x,t) R(phi) diag(a1,a2) R(phi)^T with
///   s   = 1 + eps sin(pi x/L) [cos(pi y/L)] cos(omega t)
///   phi = theta + beta sin(pi (x + y)/L) cos(omega t)
/// so the floor is (1 - |eps|) min(a1, a2). All presets are 2L-periodic.
class TensorField {
public:
    static TensorField make(const Grid& grid, TensorPreset preset, const TensorParams& params);
    static TensorField identity(const Grid& grid) { return make(grid, TensorPreset::identity, {}); }
    static TensorField diagonal(const Grid& grid, double a1, double a2 = 1.0);
    /// Explicit per-cell values, time independent; no symmetry is enforced.
    static TensorField cellwise(const Grid& grid, std::vector<TensorValue> cells, double ellipticity_floor);

    const Grid& grid() const { return grid_; }
    TensorPreset preset() const { return preset_; }
    const TensorParams& params() const { return params_; }
    double ellipticity_floor() const { return floor_; }

    TensorValue at(std::size_t cell, double t) const;
    std::vector<TensorValue> sample(double t) const;

private:
    TensorField() = default;

    Grid grid_;
    TensorPreset preset_ = TensorPreset::identity;
    TensorParams params_;
    double floor_ = 1.0;
    std::vector<TensorValue> cells_;
};

/// Smallest eigenvalue of the symmetric part.
double min_eigenvalue(const TensorValue& a);
/// Spectral norm.
double operator_norm(const TensorValue& a);
/// Operator-norm maximum over the sampled cells (Lambda).
double sup_norm(std::span<const TensorValue> cells, int dimension);

struct ValidationReport {
    bool passed = false;
    double max_asymmetry = 0.0;
    double min_eigenvalue = 0.0;
    double sup_norm = 0.0;
    double ellipticity_floor = 0.0;
    /// First offending cell and sample time, when the check fails.
    std::optional<std::size_t> failing_cell;
    std::optional<double> failing_time;
    std::string message;
};

ValidationReport validate_tensor(const TensorField& a, std::span<const double> sample_times);

}  // namespace xdiff
