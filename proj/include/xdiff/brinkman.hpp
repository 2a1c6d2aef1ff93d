#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "xdiff/error.hpp"
#include "xdiff/field.hpp"
#include "xdiff/tensor.hpp"

namespace xdiff {

enum class Preconditioner { none, jacobi };

std::string_view to_string(Preconditioner p);
Preconditioner parse_preconditioner(std::string_view text);  // throws ConfigError

struct SolverConfig {
    double rel_tolerance = 1e-10;
    /// 0 selects the default of 10 * N^d.
    std::size_t max_iterations = 0;
    Preconditioner preconditioner = Preconditioner::jacobi;

    bool operator==(const SolverConfig&) const = default;
};

/// Throws ConfigError unless rel_tolerance is in (0, 1).
void validate(const SolverConfig& cfg);

/// The map m -> m - nu div(A grad m) with A frozen at one time.
class BrinkmanOperator {
public:
    BrinkmanOperator(double nu, const TensorField& tensor, double t);
    BrinkmanOperator(double nu, const Grid& grid, std::vector<TensorValue> cells, double t);

    double nu() const { return nu_; }
    double time() const { return t_; }
    const Grid& grid() const { return grid_; }
    const std::vector<TensorValue>& cell_tensors() const { return cells_; }

    ScalarField apply(const ScalarField& m) const;
    /// div(A grad m).
    ScalarField tensor_laplacian(const ScalarField& m) const;
    /// Exact diagonal of the stencil, assembled cell by cell.
    ScalarField diagonal() const;

private:
    double nu_;
    Grid grid_;
    std::vector<TensorValue> cells_;
    double t_;
};

struct BrinkmanSolution {
    ScalarField m;
    std::size_t iterations = 0;
    /// ||op(m) - n||_2 / ||n||_2 recomputed from the returned iterate.
    double relative_residual = 0.0;
};

/// Raised when CG stalls or produces non-finite values. Carries the best
/// iterate seen so far.
class SolverFailure : public RuntimeFailure {
public:
    SolverFailure(const std::string& what, ScalarField best, double residual, std::size_t iterations)
        : RuntimeFailure(what), best_(std::move(best)), residual_(residual), iterations_(iterations) {}

    const ScalarField& best_iterate() const { return best_; }
    double residual() const { return residual_; }
    std::size_t iterations() const { return iterations_; }

private:
    ScalarField best_;
    double residual_;
    std::size_t iterations_;
};

/// Solves -nu div(A grad m) + m = n by preconditioned conjugate gradients
/// starting from m = n. nu = 0 returns n without iterating.
BrinkmanSolution solve_brinkman(const BrinkmanOperator& op, const ScalarField& n, const SolverConfig& cfg = {});

/// -A grad m on faces.
FaceField velocity(const BrinkmanOperator& op, const ScalarField& m);

/// L2 norm of div(A grad m) - (m - n)/nu. Throws for nu = 0.
double brinkman_consistency(const BrinkmanOperator& op, const ScalarField& m, const ScalarField& n);

/// Discrete L2 norm sqrt(integrate(f^2)).
double l2_norm(const ScalarField& f);

}  // namespace xdiff
