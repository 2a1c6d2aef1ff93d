#include "xdiff/grid.hpp"

#include <cmath>
#include <string>

#include "xdiff/error.hpp"

namespace xdiff {

std::string_view to_string(Boundary b) {
    return b == Boundary::periodic ? "periodic" : "noflux";
}

Boundary parse_boundary(std::string_view text) {
    if (text == "periodic") return Boundary::periodic;
    if (text == "noflux") return Boundary::noflux;
    throw ConfigError("unknown boundary '" + std::string(text) + "' (expected periodic|noflux)");
}

Grid build_grid(int dimension, double half_length, std::size_t cells_per_axis, Boundary boundary) {
    if (dimension != 1 && dimension != 2) {
        throw ConfigError("unsupported dimension " + std::to_string(dimension) + " (expected 1 or 2)");
    }
    if (!(half_length > 0.0) || !std::isfinite(half_length)) {
        throw ConfigError("half_length must be positive and finite");
    }
    if (cells_per_axis < 2) {
        throw ConfigError("cells_per_axis must be at least 2");
    }
    Grid g;
    g.dim_ = dimension;
    g.half_length_ = half_length;
    g.n_ = cells_per_axis;
    g.boundary_ = boundary;
    g.dx_ = 2.0 * half_length / static_cast<double>(cells_per_axis);
    return g;
}

std::array<double, 2> Grid::cell_center(std::size_t cell) const {
    if (dim_ == 1) return {center(cell), 0.0};
    return {center(cell % n_), center(cell / n_)};
}

SecondMomentWeight::SecondMomentWeight(const Grid& grid) : grid_(grid), values_(grid.cell_count()) {
    for (std::size_t c = 0; c < values_.size(); ++c) {
        const auto [x, y] = grid.cell_center(c);
        values_[c] = x * x + y * y;
    }
}

}  // namespace xdiff
