#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace xdiff {

enum class Boundary { periodic, noflux };

std::string_view to_string(Boundary b);
Boundary parse_boundary(std::string_view text);  // throws ConfigError

/// Uniform cell-centered mesh over [-L, L]^d, d in {1, 2}.
///
/// Cells are stored row-major with x fastest: cell (i, j) has index i + N*j.
/// Faces normal to an axis are addressed by (k, t): k in [0, N] is the face
/// position along the axis (face k separates cells k-1 and k) and t in
/// [0, N^(d-1)) is the tangential cell index. Face N duplicates face 0 for
/// periodic grids; for no-flux grids faces 0 and N are the walls.
class Grid {
public:
    Grid() = default;

    int dimension() const { return dim_; }
    double half_length() const { return half_length_; }
    std::size_t cells_per_axis() const { return n_; }
    Boundary boundary() const { return boundary_; }
    double cell_size() const { return dx_; }

    std::size_t cell_count() const { return dim_ == 1 ? n_ : n_ * n_; }
    std::size_t tangential_count() const { return dim_ == 1 ? 1 : n_; }
    std::size_t faces_per_axis() const { return (n_ + 1) * tangential_count(); }
    /// dx^d, the measure of one cell.
    double cell_volume() const { return dim_ == 1 ? dx_ : dx_ * dx_; }

    double center(std::size_t i) const {
        return -half_length_ + (static_cast<double>(i) + 0.5) * dx_;
    }
    /// Coordinates of a cell center; the second entry is 0 for d = 1.
    std::array<double, 2> cell_center(std::size_t cell) const;

    /// Index of the cell at position k along `axis` with tangential index t.
    std::size_t cell_along(int axis, std::size_t k, std::size_t t) const {
        if (dim_ == 1) return k;
        return axis == 0 ? k + n_ * t : t + n_ * k;
    }
    std::size_t face_index(std::size_t k, std::size_t t) const { return t * (n_ + 1) + k; }

    bool operator==(const Grid&) const = default;

private:
    friend Grid build_grid(int, double, std::size_t, Boundary);

    int dim_ = 1;
    double half_length_ = 1.0;
    std::size_t n_ = 2;
    Boundary boundary_ = Boundary::noflux;
    double dx_ = 1.0;
};

/// Throws ConfigError for d not in {1,2}, L <= 0 or N < 2.
Grid build_grid(int dimension, double half_length, std::size_t cells_per_axis, Boundary boundary);

/// |x|^2 sampled at cell centers.
class SecondMomentWeight {
public:
    explicit SecondMomentWeight(const Grid& grid);
    const Grid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }

private:
    Grid grid_;
    std::vector<double> values_;
};

}  // namespace xdiff
