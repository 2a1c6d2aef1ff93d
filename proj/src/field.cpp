#include "xdiff/field.hpp"

#include <algorithm>
#include <cmath>

#include "xdiff/error.hpp"

namespace xdiff {

namespace {

void require_same_grid(const Grid& a, const Grid& b) {
    if (!(a == b)) throw Error("field grid mismatch");
}

}  // namespace

ScalarField::ScalarField(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid.cell_count()) {
        throw Error("ScalarField: value count does not match the grid cell count");
    }
}

bool ScalarField::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

ScalarField& ScalarField::operator+=(const ScalarField& other) {
    require_same_grid(grid_, other.grid_);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
    require_same_grid(grid_, other.grid_);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

ScalarField& ScalarField::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

ScalarField hadamard(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid(), b.grid());
    ScalarField out(a.grid());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

FaceField::FaceField(const Grid& grid) : grid_(grid) {
    for (int a = 0; a < grid.dimension(); ++a) comps_[a].assign(grid.faces_per_axis(), 0.0);
}

bool FaceField::all_finite() const {
    for (int a = 0; a < grid_.dimension(); ++a) {
        for (double v : comps_[a]) {
            if (!std::isfinite(v)) return false;
        }
    }
    return true;
}

double FaceField::max_abs() const {
    double m = 0.0;
    for (int a = 0; a < grid_.dimension(); ++a) {
        for (double v : comps_[a]) m = std::max(m, std::abs(v));
    }
    return m;
}

FaceField& FaceField::operator*=(double s) {
    for (int a = 0; a < grid_.dimension(); ++a) {
        for (double& v : comps_[a]) v *= s;
    }
    return *this;
}

FaceField& FaceField::operator-=(const FaceField& other) {
    require_same_grid(grid_, other.grid_);
    for (int a = 0; a < grid_.dimension(); ++a) {
        for (std::size_t i = 0; i < comps_[a].size(); ++i) comps_[a][i] -= other.comps_[a][i];
    }
    return *this;
}

}  // namespace xdiff
