#include "xdiff/brinkman.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "xdiff/calculus.hpp"

namespace xdiff {

std::string_view to_string(Preconditioner p) {
    return p == Preconditioner::jacobi ? "jacobi" : "none";
}

Preconditioner parse_preconditioner(std::string_view text) {
    if (text == "jacobi") return Preconditioner::jacobi;
    if (text == "none") return Preconditioner::none;
    throw ConfigError("unknown preconditioner '" + std::string(text) + "' (expected none|jacobi)");
}

void validate(const SolverConfig& cfg) {
    if (!(cfg.rel_tolerance > 0.0 && cfg.rel_tolerance < 1.0)) {
        throw ConfigError("solver rel_tolerance must lie in (0, 1)");
    }
}

BrinkmanOperator::BrinkmanOperator(double nu, const TensorField& tensor, double t)
    : BrinkmanOperator(nu, tensor.grid(), tensor.sample(t), t) {}

BrinkmanOperator::BrinkmanOperator(double nu, const Grid& grid, std::vector<TensorValue> cells, double t)
    : nu_(nu), grid_(grid), cells_(std::move(cells)), t_(t) {
    if (!(nu >= 0.0) || !std::isfinite(nu)) throw ConfigError("viscosity nu must be finite and nonnegative");
    if (cells_.size() != grid_.cell_count()) throw Error("BrinkmanOperator: tensor sample does not match the grid");
}

ScalarField BrinkmanOperator::tensor_laplacian(const ScalarField& m) const {
    return divergence(apply_tensor(cells_, gradient(m)));
}

ScalarField BrinkmanOperator::apply(const ScalarField& m) const {
    if (nu_ == 0.0) return m;
    ScalarField out = tensor_laplacian(m);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = m[c] - nu_ * out[c];
    return out;
}

ScalarField BrinkmanOperator::diagonal() const {
    const Grid& g = grid_;
    const std::size_t n = g.cells_per_axis();
    const double inv_dx = 1.0 / g.cell_size();
    const bool noflux = g.boundary() == Boundary::noflux;
    ScalarField diag(g, 1.0);
    if (nu_ == 0.0) return diag;

    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        const std::size_t i = c % n;
        const std::size_t j = g.dimension() == 1 ? 0 : c / n;
        double coupling = 0.0;  // coefficient of m_c in div(A grad m) at c
        for (int axis = 0; axis < g.dimension(); ++axis) {
            const std::size_t k = axis == 0 ? i : j;
            const bool left_open = !(noflux && k == 0);
            const bool right_open = !(noflux && k == n - 1);
            const std::size_t left = (k == 0) ? n - 1 : k - 1;
            const std::size_t right = (k == n - 1) ? 0 : k + 1;
            const std::size_t t = axis == 0 ? j : i;
            const TensorValue& self = cells_[c];
            const double a_self = axis == 0 ? self.xx : self.yy;
            const auto normal = [&](std::size_t other) {
                const TensorValue& o = cells_[g.cell_along(axis, other, t)];
                return 0.5 * (a_self + (axis == 0 ? o.xx : o.yy));
            };
            // Coefficient of m_c in the cell-mean tangential gradient of c.
            double tangential = 0.0;
            if (g.dimension() == 2) {
                const std::size_t kt = axis == 0 ? j : i;
                const double low_open = (noflux && kt == 0) ? 0.0 : 1.0;
                const double high_open = (noflux && kt == n - 1) ? 0.0 : 1.0;
                const double cross = axis == 0 ? self.xy : self.yx;
                tangential = 0.5 * cross * 0.5 * (low_open - high_open) * inv_dx;
            }
            const double right_face = right_open ? (-normal(right) * inv_dx + tangential) : 0.0;
            const double left_face = left_open ? (normal(left) * inv_dx + tangential) : 0.0;
            coupling += (right_face - left_face) * inv_dx;
        }
        diag[c] = 1.0 - nu_ * coupling;
    }
    return diag;
}

namespace {

double dot(const ScalarField& a, const ScalarField& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

double l2_norm(const ScalarField& f) {
    return std::sqrt(dot(f, f) * f.grid().cell_volume());
}

namespace {

std::string format_residual(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

}  // namespace

BrinkmanSolution solve_brinkman(const BrinkmanOperator& op, const ScalarField& n, const SolverConfig& cfg) {
    validate(cfg);
    if (!(n.grid() == op.grid())) throw Error("solve_brinkman: grid mismatch");
    if (!n.all_finite()) throw SolverFailure("solve_brinkman: right-hand side is not finite", n, NAN, 0);

    if (op.nu() == 0.0) return {n, 0, 0.0};

    const std::size_t max_it = cfg.max_iterations > 0 ? cfg.max_iterations : 10 * op.grid().cell_count();
    const double b_norm = std::sqrt(dot(n, n));
    if (b_norm == 0.0) return {ScalarField(n.grid()), 0, 0.0};

    ScalarField inv_diag(n.grid(), 1.0);
    if (cfg.preconditioner == Preconditioner::jacobi) {
        inv_diag = op.diagonal();
        for (double& v : inv_diag.values()) v = 1.0 / v;
    }

    const double target = cfg.rel_tolerance * b_norm;
    ScalarField x = n;
    ScalarField best = x;
    double best_norm = std::numeric_limits<double>::infinity();
    std::size_t it = 0;
    double rel = 0.0;
    // Each pass restarts CG from the true residual, since the recurrence
    // residual can meet the target while the true one does not.
    while (true) {
        ScalarField r = n - op.apply(x);
        double r_norm = std::sqrt(dot(r, r));
        if (r_norm < best_norm) {
            best = x;
            best_norm = r_norm;
        }
        rel = r_norm / b_norm;
        if (r_norm <= target || it >= max_it) break;

        ScalarField z = hadamard(inv_diag, r);
        ScalarField p = z;
        double rz = dot(r, z);
        while (it < max_it) {
            const ScalarField ap = op.apply(p);
            const double pap = dot(p, ap);
            if (!std::isfinite(pap) || pap <= 0.0) {
                throw SolverFailure("solve_brinkman: breakdown (p.Ap = " + format_residual(pap) + ")", best,
                                    best_norm / b_norm, it);
            }
            const double alpha = rz / pap;
            for (std::size_t c = 0; c < x.size(); ++c) {
                x[c] += alpha * p[c];
                r[c] -= alpha * ap[c];
            }
            ++it;
            r_norm = std::sqrt(dot(r, r));
            if (!std::isfinite(r_norm)) {
                throw SolverFailure("solve_brinkman: non-finite residual", best, best_norm / b_norm, it);
            }
            if (r_norm <= target) break;
            for (std::size_t c = 0; c < z.size(); ++c) z[c] = inv_diag[c] * r[c];
            const double rz_next = dot(r, z);
            const double beta = rz_next / rz;
            rz = rz_next;
            for (std::size_t c = 0; c < p.size(); ++c) p[c] = z[c] + beta * p[c];
        }
    }

    if (!(rel <= cfg.rel_tolerance)) {
        throw SolverFailure("solve_brinkman: no convergence after " + std::to_string(it) +
                                " iterations (relative residual " + format_residual(rel) + ")",
                            best, best_norm / b_norm, it);
    }
    return {std::move(x), it, rel};
}

FaceField velocity(const BrinkmanOperator& op, const ScalarField& m) {
    FaceField v = apply_tensor(op.cell_tensors(), gradient(m));
    v *= -1.0;
    return v;
}

double brinkman_consistency(const BrinkmanOperator& op, const ScalarField& m, const ScalarField& n) {
    if (op.nu() == 0.0) throw Error("brinkman_consistency: undefined for nu = 0");
    ScalarField diff = op.tensor_laplacian(m);
    for (std::size_t c = 0; c < diff.size(); ++c) diff[c] -= (m[c] - n[c]) / op.nu();
    return l2_norm(diff);
}

}  // namespace xdiff
