#include "xdiff/calculus.hpp"

#include "xdiff/error.hpp"

namespace xdiff {

namespace {

// Cell indices on the low and high side of face k along an axis.
struct FaceCells {
    std::size_t low;
    std::size_t high;
};

FaceCells face_cells(const Grid& g, int axis, std::size_t k, std::size_t t) {
    const std::size_t n = g.cells_per_axis();
    const std::size_t lo = (k == 0) ? n - 1 : k - 1;
    const std::size_t hi = (k == n) ? 0 : k;
    return {g.cell_along(axis, lo, t), g.cell_along(axis, hi, t)};
}

bool is_wall(const Grid& g, std::size_t k) {
    return g.boundary() == Boundary::noflux && (k == 0 || k == g.cells_per_axis());
}

// Mean of the two faces of `cell` normal to `axis`.
double cell_mean(const FaceField& f, int axis, std::size_t cell) {
    const Grid& g = f.grid();
    const std::size_t n = g.cells_per_axis();
    const std::size_t i = cell % n;
    const std::size_t j = cell / n;
    if (axis == 0) return 0.5 * (f.at(0, i, j) + f.at(0, i + 1, j));
    return 0.5 * (f.at(1, j, i) + f.at(1, j + 1, i));
}

}  // namespace

FaceField gradient(const ScalarField& f) {
    const Grid& g = f.grid();
    FaceField out(g);
    const std::size_t n = g.cells_per_axis();
    const double inv_dx = 1.0 / g.cell_size();
    for (int axis = 0; axis < g.dimension(); ++axis) {
        for (std::size_t t = 0; t < g.tangential_count(); ++t) {
            for (std::size_t k = 0; k <= n; ++k) {
                if (is_wall(g, k)) continue;
                const auto [lo, hi] = face_cells(g, axis, k, t);
                out.at(axis, k, t) = (f[hi] - f[lo]) * inv_dx;
            }
        }
    }
    return out;
}

ScalarField divergence(const FaceField& flux) {
    const Grid& g = flux.grid();
    ScalarField out(g);
    const std::size_t n = g.cells_per_axis();
    const double inv_dx = 1.0 / g.cell_size();
    for (int axis = 0; axis < g.dimension(); ++axis) {
        for (std::size_t t = 0; t < g.tangential_count(); ++t) {
            for (std::size_t k = 0; k < n; ++k) {
                out[g.cell_along(axis, k, t)] += (flux.at(axis, k + 1, t) - flux.at(axis, k, t)) * inv_dx;
            }
        }
    }
    return out;
}

FaceField apply_tensor(std::span<const TensorValue> cells, const FaceField& grad) {
    const Grid& g = grad.grid();
    if (cells.size() != g.cell_count()) throw Error("apply_tensor: tensor sample does not match the grid");
    FaceField out(g);
    const std::size_t n = g.cells_per_axis();
    const bool two_d = g.dimension() == 2;
    for (int axis = 0; axis < g.dimension(); ++axis) {
        for (std::size_t t = 0; t < g.tangential_count(); ++t) {
            for (std::size_t k = 0; k < n + 1; ++k) {
                if (is_wall(g, k)) continue;
                if (k == n) {
                    out.at(axis, n, t) = out.at(axis, 0, t);  // periodic duplicate
                    continue;
                }
                const auto [lo, hi] = face_cells(g, axis, k, t);
                const TensorValue& a = cells[lo];
                const TensorValue& b = cells[hi];
                const double normal = axis == 0 ? 0.5 * (a.xx + b.xx) : 0.5 * (a.yy + b.yy);
                double value = normal * grad.at(axis, k, t);
                if (two_d) {
                    const int other = 1 - axis;
                    const double ca = axis == 0 ? a.xy : a.yx;
                    const double cb = axis == 0 ? b.xy : b.yx;
                    value += 0.5 * (ca * cell_mean(grad, other, lo) + cb * cell_mean(grad, other, hi));
                }
                out.at(axis, k, t) = value;
            }
        }
    }
    return out;
}

FaceField apply_tensor(const TensorField& a, const FaceField& g, double t) {
    const auto cells = a.sample(t);
    return apply_tensor(cells, g);
}

double integrate(const ScalarField& f) {
    double s = 0.0;
    for (double v : f.values()) s += v;
    return s * f.grid().cell_volume();
}

double face_dot(const FaceField& f, const FaceField& h) {
    const Grid& g = f.grid();
    if (!(g == h.grid())) throw Error("face_dot: grid mismatch");
    const std::size_t n = g.cells_per_axis();
    const std::size_t last = g.boundary() == Boundary::periodic ? n - 1 : n;
    double s = 0.0;
    for (int axis = 0; axis < g.dimension(); ++axis) {
        for (std::size_t t = 0; t < g.tangential_count(); ++t) {
            for (std::size_t k = 0; k <= last; ++k) s += f.at(axis, k, t) * h.at(axis, k, t);
        }
    }
    return s * g.cell_volume();
}

}  // namespace xdiff
