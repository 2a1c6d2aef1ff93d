#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "support.hpp"
#include "xdiff/brinkman.hpp"
#include "xdiff/calculus.hpp"
#include "xdiff/error.hpp"

using namespace xdiff;
using std::numbers::pi;

namespace {

TensorField varying(const Grid& g) {
    TensorParams p;
    p.a1 = 1.5;
    p.a2 = 0.4;
    p.theta = 0.3;
    p.beta = 0.5;
    p.eps = 0.3;
    p.omega = 1.0;
    return TensorField::make(g, TensorPreset::smooth_varying, p);
}

/// Random symmetric tensors with eigenvalues in [0.5, 2.5].
TensorField random_spd(const Grid& g) {
    std::uniform_real_distribution<double> eig(0.5, 2.5);
    std::uniform_real_distribution<double> angle(0.0, pi);
    std::vector<TensorValue> cells(g.cell_count());
    for (TensorValue& a : cells) {
        const double l1 = eig(testing::rng());
        const double l2 = eig(testing::rng());
        const double th = angle(testing::rng());
        const double c = std::cos(th);
        const double s = std::sin(th);
        a.xx = l1 * c * c + l2 * s * s;
        a.yy = l1 * s * s + l2 * c * c;
        a.xy = a.yx = (l1 - l2) * c * s;
    }
    return TensorField::cellwise(g, cells, 0.5);
}

double inner(const ScalarField& a, const ScalarField& b) { return integrate(hadamard(a, b)); }

}  // namespace

TEST_CASE("constant density is reproduced exactly") {
    const SolverConfig cfg;
    for (double nu : {1e-4, 1e-2, 1.0}) {
        for (Boundary b : {Boundary::periodic, Boundary::noflux}) {
            const Grid g = build_grid(2, 1.0, 8, b);
            for (const TensorField& a : {TensorField::identity(g), TensorField::diagonal(g, 1.0, 4.0)}) {
                const ScalarField n(g, 0.7);
                const BrinkmanSolution s = solve_brinkman(BrinkmanOperator(nu, a, 0.0), n, cfg);
                CHECK(s.relative_residual <= 1e-12);
                for (double v : s.m.values()) CHECK(std::abs(v - 0.7) <= 1e-12);
            }
        }
    }
}

TEST_CASE("nu = 0 returns the density without iterating") {
    const Grid g = build_grid(1, 1.0, 16, Boundary::noflux);
    const ScalarField n = testing::random_field(g, 0.0, 1.0);
    const BrinkmanSolution s = solve_brinkman(BrinkmanOperator(0.0, TensorField::identity(g), 0.0), n, SolverConfig{});
    CHECK(s.iterations == 0);
    for (std::size_t i = 0; i < n.size(); ++i) CHECK(s.m[i] == n[i]);
}

TEST_CASE("Fourier mode matches the discrete symbol") {
    // Domain length 1: -m'' has the discrete symbol 4 sin^2(pi dx) / dx^2 on sin(2 pi x).
    const double nu = 0.1;
    double previous_gap = std::numeric_limits<double>::infinity();
    for (std::size_t n_cells : {64, 256}) {
        const Grid g = build_grid(1, 0.5, n_cells, Boundary::periodic);
        const double dx = g.cell_size();
        const double symbol = 4.0 * std::pow(std::sin(pi * dx), 2) / (dx * dx);
        ScalarField n(g);
        ScalarField exact(g);
        for (std::size_t i = 0; i < n_cells; ++i) {
            const double wave = std::sin(2.0 * pi * g.center(i));
            n[i] = 1.0 + 0.5 * wave;
            exact[i] = 1.0 + 0.5 * wave / (1.0 + nu * symbol);
        }
        const BrinkmanSolution s = solve_brinkman(BrinkmanOperator(nu, TensorField::identity(g), 0.0), n, SolverConfig{});
        CHECK(l2_norm(s.m - exact) / l2_norm(exact) <= 1e-9);

        const double continuous = 0.5 / (1.0 + nu * 4.0 * pi * pi);
        const double gap = std::abs(0.5 / (1.0 + nu * symbol) - continuous);
        CHECK(gap < previous_gap);
        previous_gap = gap;
    }
}

TEST_CASE("velocity on a 3x3 grid by hand") {
    // dx = 1, m = cell index (x fastest): grad_x = 1, grad_y = 3 inside.
    const Grid g = build_grid(2, 1.5, 3, Boundary::noflux);
    ScalarField m(g);
    for (std::size_t c = 0; c < 9; ++c) m[c] = static_cast<double>(c);
    const BrinkmanOperator op(0.1, TensorField::diagonal(g, 2.0, 3.0), 0.0);
    const FaceField v = velocity(op, m);
    for (std::size_t t = 0; t < 3; ++t) {
        for (std::size_t k = 0; k <= 3; ++k) {
            const bool wall = k == 0 || k == 3;
            CHECK(v.at(0, k, t) == doctest::Approx(wall ? 0.0 : -2.0));
            CHECK(v.at(1, k, t) == doctest::Approx(wall ? 0.0 : -9.0));
        }
    }
}

TEST_CASE("velocity of a constant vanishes and identity gives minus the gradient") {
    const Grid g = build_grid(2, 1.0, 6, Boundary::periodic);
    CHECK(velocity(BrinkmanOperator(0.1, varying(g), 0.3), ScalarField(g, 2.0)).max_abs() == 0.0);
    const ScalarField m = testing::random_field(g);
    const FaceField v = velocity(BrinkmanOperator(0.1, TensorField::identity(g), 0.0), m);
    const FaceField grad = gradient(m);
    for (int a = 0; a < 2; ++a) {
        for (std::size_t i = 0; i < g.faces_per_axis(); ++i) CHECK(v.axis(a)[i] == -grad.axis(a)[i]);
    }
}

TEST_CASE("operator is symmetric and dominates the identity") {
    for (Boundary b : {Boundary::periodic, Boundary::noflux}) {
        const Grid g = build_grid(2, 1.0, 9, b);
        for (const TensorField& a : {varying(g), random_spd(g)}) {
            const BrinkmanOperator op(0.05, a, 0.4);
            for (int trial = 0; trial < 4; ++trial) {
                const ScalarField u = testing::random_field(g);
                const ScalarField w = testing::random_field(g);
                CHECK(inner(u, op.apply(w)) == doctest::Approx(inner(w, op.apply(u))).epsilon(1e-12));
                CHECK(inner(u, op.apply(u)) >= inner(u, u));
            }
        }
    }
}

TEST_CASE("analytic Jacobi diagonal equals the assembled diagonal") {
    for (Boundary b : {Boundary::periodic, Boundary::noflux}) {
        for (int d : {1, 2}) {
            const Grid g = build_grid(d, 1.0, 5, b);
            for (const TensorField& a : {varying(g), d == 2 ? random_spd(g) : TensorField::diagonal(g, 2.0)}) {
                const BrinkmanOperator op(0.3, a, 0.2);
                const ScalarField diag = op.diagonal();
                for (std::size_t c = 0; c < g.cell_count(); ++c) {
                    ScalarField e(g);
                    e[c] = 1.0;
                    CHECK(diag[c] == doctest::Approx(op.apply(e)[c]).epsilon(1e-13));
                }
            }
        }
    }
}

TEST_CASE("solutions obey the maximum principle") {
    const SolverConfig cfg;
    for (Boundary b : {Boundary::periodic, Boundary::noflux}) {
        for (int d : {1, 2}) {
            const Grid g = build_grid(d, 1.0, 16, b);
            for (const TensorField& a : {TensorField::identity(g), TensorField::diagonal(g, 1.0, 4.0)}) {
                const ScalarField n = testing::random_field(g, 0.0, 1.0);
                const ScalarField m = solve_brinkman(BrinkmanOperator(0.1, a, 0.0), n, cfg).m;
                const double eps = 10.0 * cfg.rel_tolerance * n.max();
                CHECK(m.min() >= n.min() - eps);
                CHECK(m.max() <= n.max() + eps);
            }
        }
    }
    // Smooth data under a rotating tensor.
    const Grid g = build_grid(2, 2.0, 32, Boundary::noflux);
    ScalarField n(g);
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        const auto [x, y] = g.cell_center(c);
        n[c] = 0.6 * std::exp(-(x * x + 2.0 * y * y));
    }
    const ScalarField m = solve_brinkman(BrinkmanOperator(0.05, varying(g), 0.0), n, cfg).m;
    const double eps = 10.0 * cfg.rel_tolerance * n.max();
    CHECK(m.min() >= n.min() - eps);
    CHECK(m.max() <= n.max() + eps);
}

TEST_CASE("solve conserves mass and satisfies the energy identity") {
    const SolverConfig cfg;
    for (Boundary b : {Boundary::periodic, Boundary::noflux}) {
        const Grid g = build_grid(2, 1.0, 12, b);
        const TensorField a = varying(g);
        const double nu = 0.02;
        const BrinkmanOperator op(nu, a, 0.0);
        const ScalarField n = testing::random_field(g, 0.0, 1.0);
        const ScalarField m = solve_brinkman(op, n, cfg).m;
        const double scale = integrate(n);
        CHECK(std::abs(integrate(m) - scale) <= 1e-8 * scale);

        const FaceField grad = gradient(m);
        const double lhs = nu * face_dot(grad, apply_tensor(a, grad, 0.0)) + inner(m, m);
        CHECK(std::abs(lhs - inner(m, n)) <= 1e-8 * inner(m, n));
    }
}

TEST_CASE("consistency diagnostic") {
    const Grid g = build_grid(2, 1.0, 12, Boundary::noflux);
    const TensorField a = varying(g);
    const double nu = 0.05;
    const BrinkmanOperator op(nu, a, 0.0);

    const ScalarField c(g, 0.4);
    CHECK(brinkman_consistency(op, c, c) <= 1e-13);

    const ScalarField n = testing::random_field(g, 0.0, 1.0);
    const ScalarField converged = solve_brinkman(op, n, SolverConfig{}).m;
    const double good = brinkman_consistency(op, converged, n);
    CHECK(good <= 1e-8 * l2_norm(n) / nu);

    SolverConfig one_step;
    one_step.max_iterations = 1;
    try {
        solve_brinkman(op, n, one_step);
        FAIL("one CG step should not converge on rough data");
    } catch (const SolverFailure& e) {
        CHECK(e.iterations() == 1);
        CHECK(brinkman_consistency(op, e.best_iterate(), n) > good);
    }

    CHECK_THROWS_AS(brinkman_consistency(BrinkmanOperator(0.0, a, 0.0), c, c), Error);
}

TEST_CASE("failure modes") {
    const Grid g = build_grid(1, 1.0, 64, Boundary::periodic);
    const BrinkmanOperator op(0.1, TensorField::identity(g), 0.0);
    ScalarField bad(g, 1.0);
    bad[3] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(solve_brinkman(op, bad, SolverConfig{}), SolverFailure);

    SolverConfig tight;
    tight.max_iterations = 2;
    try {
        solve_brinkman(op, testing::random_field(g), tight);
        FAIL("expected a convergence failure");
    } catch (const SolverFailure& e) {
        CHECK(e.residual() > tight.rel_tolerance);
        CHECK(e.best_iterate().all_finite());
        CHECK(std::string(e.what()).find("no convergence") != std::string::npos);
    }

    SolverConfig zero_tol;
    zero_tol.rel_tolerance = 0.0;
    CHECK_THROWS_AS(validate(zero_tol), ConfigError);
    CHECK_THROWS_AS(BrinkmanOperator(-1.0, TensorField::identity(g), 0.0), ConfigError);
    CHECK_THROWS_AS(parse_preconditioner("ilu"), ConfigError);
}

TEST_CASE("both preconditioners reach the tolerance") {
    const Grid g = build_grid(2, 1.0, 16, Boundary::noflux);
    const ScalarField n = testing::random_field(g, 0.0, 1.0);
    const BrinkmanOperator op(0.1, random_spd(g), 0.0);
    for (Preconditioner p : {Preconditioner::none, Preconditioner::jacobi}) {
        SolverConfig cfg;
        cfg.preconditioner = p;
        const BrinkmanSolution s = solve_brinkman(op, n, cfg);
        CHECK(s.relative_residual <= cfg.rel_tolerance);
        CHECK(s.iterations > 0);
    }
}
