#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "xdiff/grid.hpp"

namespace xdiff {

/// Cell-centered values (densities, potentials).
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const Grid& grid, double value = 0.0)
        : grid_(grid), values_(grid.cell_count(), value) {}
    ScalarField(const Grid& grid, std::vector<double> values);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    bool all_finite() const;
    double min() const;
    double max() const;

    ScalarField& operator+=(const ScalarField& other);
    ScalarField& operator-=(const ScalarField& other);
    ScalarField& operator*=(double s);

private:
    Grid grid_;
    std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
/// Pointwise product.
ScalarField hadamard(const ScalarField& a, const ScalarField& b);

/// Face-normal components, one array per axis, addressed with Grid::face_index.
class FaceField {
public:
    FaceField() = default;
    explicit FaceField(const Grid& grid);

    const Grid& grid() const { return grid_; }

    double& at(int axis, std::size_t k, std::size_t t) { return comps_[axis][grid_.face_index(k, t)]; }
    double at(int axis, std::size_t k, std::size_t t) const { return comps_[axis][grid_.face_index(k, t)]; }

    std::span<double> axis(int a) { return comps_[a]; }
    std::span<const double> axis(int a) const { return comps_[a]; }

    bool all_finite() const;
    /// max |value| over all faces.
    double max_abs() const;

    FaceField& operator*=(double s);
    FaceField& operator-=(const FaceField& other);

private:
    Grid grid_;
    std::vector<double> comps_[2];
};

}  // namespace xdiff
