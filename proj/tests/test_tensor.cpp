#include <cmath>
#include <vector>

#include <doctest.h>

#include "xdiff/error.hpp"
#include "xdiff/tensor.hpp"

using namespace xdiff;

namespace {

std::vector<double> times() { return {0.0, 0.25, 0.5, 1.0, 2.0}; }

}  // namespace

TEST_CASE("identity passes validation") {
    const Grid g = build_grid(2, 1.0, 8, Boundary::periodic);
    const auto t = times();
    const ValidationReport r = validate_tensor(TensorField::identity(g), t);
    CHECK(r.passed);
    CHECK(r.max_asymmetry == 0.0);
    CHECK(r.min_eigenvalue == doctest::Approx(1.0));
    CHECK(r.sup_norm == doctest::Approx(1.0));
}

TEST_CASE("diagonal(1,4) passes with floor 1 and sup norm 4") {
    const Grid g = build_grid(2, 1.0, 8, Boundary::noflux);
    const auto t = times();
    const ValidationReport r = validate_tensor(TensorField::diagonal(g, 1.0, 4.0), t);
    CHECK(r.passed);
    CHECK(r.min_eigenvalue == doctest::Approx(1.0));
    CHECK(r.sup_norm == doctest::Approx(4.0));
}

TEST_CASE("asymmetric cell is located") {
    const Grid g = build_grid(2, 1.0, 4, Boundary::periodic);
    std::vector<TensorValue> cells(16);
    cells[5] = TensorValue{1.0, 0.3, 0.1, 1.0};
    const auto t = times();
    const ValidationReport r = validate_tensor(TensorField::cellwise(g, cells, 0.5), t);
    CHECK_FALSE(r.passed);
    REQUIRE(r.failing_cell.has_value());
    CHECK(*r.failing_cell == 5);
    CHECK(r.max_asymmetry == doctest::Approx(0.2));
    CHECK_FALSE(r.message.empty());
}

TEST_CASE("eigenvalue below the floor fails") {
    const Grid g = build_grid(2, 1.0, 4, Boundary::periodic);
    std::vector<TensorValue> cells(16);
    cells[11] = TensorValue{0.2, 0.0, 0.0, 1.0};
    const auto t = times();
    const ValidationReport r = validate_tensor(TensorField::cellwise(g, cells, 0.5), t);
    CHECK_FALSE(r.passed);
    REQUIRE(r.failing_cell.has_value());
    CHECK(*r.failing_cell == 11);
}

TEST_CASE("rotation-mixed keeps the principal values") {
    const Grid g = build_grid(2, 1.0, 6, Boundary::periodic);
    TensorParams p;
    p.a1 = 3.0;
    p.a2 = 0.5;
    p.theta = 0.7;
    const TensorField a = TensorField::make(g, TensorPreset::rotation_mixed, p);
    const auto t = times();
    const ValidationReport r = validate_tensor(a, t);
    CHECK(r.passed);
    CHECK(r.min_eigenvalue == doctest::Approx(0.5));
    CHECK(r.sup_norm == doctest::Approx(3.0));
    const TensorValue v = a.at(0, 0.0);
    CHECK(v.xy != 0.0);
    CHECK(v.xx + v.yy == doctest::Approx(3.5));
}

TEST_CASE("smooth-varying stays symmetric and above its floor") {
    for (int d : {1, 2}) {
        const Grid g = build_grid(d, 2.0, 16, Boundary::periodic);
        TensorParams p;
        p.a1 = 1.0;
        p.a2 = 0.25;
        p.theta = 0.5;
        p.beta = 0.3;
        p.eps = 0.4;
        p.omega = 2.0;
        const TensorField a = TensorField::make(g, TensorPreset::smooth_varying, p);
        const auto t = times();
        const ValidationReport r = validate_tensor(a, t);
        CHECK(r.passed);
        CHECK(r.min_eigenvalue >= a.ellipticity_floor());
        CHECK(a.ellipticity_floor() == doctest::Approx(0.6 * (d == 1 ? 1.0 : 0.25)));
    }
}

TEST_CASE("small-matrix helpers") {
    const TensorValue a{2.0, 1.0, 1.0, 2.0};
    CHECK(min_eigenvalue(a) == doctest::Approx(1.0));
    CHECK(operator_norm(a) == doctest::Approx(3.0));
    const TensorValue rot{0.0, -1.0, 1.0, 0.0};
    CHECK(operator_norm(rot) == doctest::Approx(1.0));
    CHECK(min_eigenvalue(rot) == doctest::Approx(0.0));
}

TEST_CASE("preset names") {
    CHECK(parse_tensor_preset("smooth-varying") == TensorPreset::smooth_varying);
    CHECK(parse_tensor_preset("rotation-mixed") == TensorPreset::rotation_mixed);
    CHECK(to_string(TensorPreset::diagonal) == "diagonal");
    CHECK_THROWS_AS(parse_tensor_preset("isotropic"), ConfigError);
    const Grid g = build_grid(2, 1.0, 4, Boundary::periodic);
    TensorParams bad;
    bad.a2 = -1.0;
    CHECK_THROWS_AS(TensorField::make(g, TensorPreset::diagonal, bad), ConfigError);
}
