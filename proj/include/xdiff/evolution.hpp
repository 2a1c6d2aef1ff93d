#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string_view>

#include "xdiff/brinkman.hpp"
#include "xdiff/error.hpp"
#include "xdiff/field.hpp"
#include "xdiff/tensor.hpp"

namespace xdiff {

/// Affine growth G(n) = slope * (nbar - n). slope = 0 switches growth off.
struct GrowthLaw {
    double nbar = 1.0;
    double slope = 1.0;

    double operator()(double n) const { return slope * (nbar - n); }
    bool operator==(const GrowthLaw&) const = default;
};

struct GrowthLaws {
    GrowthLaw first;
    GrowthLaw second;

    /// Global density ceiling max(nbar1, nbar2).
    double nbar() const;
    /// Monotonicity constant min(slope1, slope2).
    double alpha() const;
    /// max_i max_{s in [0, nbar]} |G_i(s)|.
    double rate_bound() const;
    bool operator==(const GrowthLaws&) const = default;
};

/// Throws ConfigError for nbar <= 0 or slope < 0.
void validate(const GrowthLaws& laws);

/// Species densities and the cached potential m at time t.
struct State {
    ScalarField n1;
    ScalarField n2;
    ScalarField m;
    double t = 0.0;
    /// Cumulative mass removed by clipping negative undershoots.
    double clipped_mass = 0.0;
    /// Set once any single step clipped more than 1e-6 of the total mass.
    bool clip_warning = false;

    ScalarField total() const { return n1 + n2; }
};

enum class Mode { brinkman, darcy };
std::string_view to_string(Mode m);
Mode parse_mode(std::string_view text);  // throws ConfigError

struct StepperConfig {
    double cfl_safety = 0.4;
    double bound_tolerance = 1e-8;
    Mode mode = Mode::brinkman;
    double nu = 1e-2;
    SolverConfig solver;

    bool operator==(const StepperConfig&) const = default;
};

/// Throws ConfigError on cfl_safety outside (0, 1] or inconsistent mode/nu.
void validate(const StepperConfig& cfg);

/// First-order upwind flux n_upwind * v on every face for transport velocity v.
FaceField upwind_flux(const ScalarField& n, const FaceField& v);

struct Reaction {
    ScalarField r1;
    ScalarField r2;
};

/// r_i = n_i G_i(n1 + n2).
Reaction reaction(const ScalarField& n1, const ScalarField& n2, const GrowthLaws& laws);

/// Transport velocity of the current state: -A grad m (brinkman) or -A grad n (darcy).
FaceField transport_velocity(const State& state, const TensorField& tensor, Mode mode);

/// Stable explicit time step for the current state.
///
/// Both modes: dt <= cfl * dx / (2 d max|v| + 1e-14).
/// The remaining limits are added as rates and share one safety budget:
///   reaction     max_i(g_i) * nbar
///   parabolic    nbar * S / (2 (1 + nu S)), S = 4 d Lambda / dx^2 (nu = 0 in darcy mode)
///   brinkman     nbar * kappa / nu, kappa = max_j (m_j - n_j)^+ / (nbar - n_j)
/// so dt <= cfl / (sum of rates). S is the largest symbol of the discrete
/// tensor Laplacian; kappa is the compression rate that can push a cell above nbar.
double stable_dt(const State& state, const FaceField& v, const StepperConfig& cfg, const TensorField& tensor,
                 const GrowthLaws& laws);

/// Builds the initial state: solves for m (brinkman) or sets m = n (darcy).
State make_state(ScalarField n1, ScalarField n2, double t, const TensorField& tensor, const StepperConfig& cfg);

/// Raised when a step produces NaN/Inf; carries the step context.
class StepFailure : public RuntimeFailure {
public:
    StepFailure(const std::string& what, std::size_t step, double t) : RuntimeFailure(what), step_(step), t_(t) {}
    std::size_t step() const { return step_; }
    double time() const { return t_; }

private:
    std::size_t step_;
    double t_;
};

/// One forward-Euler step of length dt:
///   n_i <- n_i - dt div(upwind_flux(n_i, v)) + dt n_i G_i(n),  v = -A grad m,
/// then negatives are clipped into the ledger and m is recomputed at t + dt.
State step(const State& state, const TensorField& tensor, const GrowthLaws& laws, const StepperConfig& cfg, double dt);

using StateObserver = std::function<void(const State&, std::size_t step)>;

struct Observers {
    /// on_step fires at step 0, every `cadence` steps and at the final step.
    std::size_t cadence = 1;
    StateObserver on_step;
    /// When > 0, steps are shortened so that every multiple of
    /// sample_interval (from the initial time) is hit exactly; on_sample fires
    /// there, at the initial time and at t_final.
    double sample_interval = 0.0;
    StateObserver on_sample;
};

struct RunResult {
    State state;
    std::size_t steps = 0;
};

RunResult run(State initial, const TensorField& tensor, const GrowthLaws& laws, const StepperConfig& cfg,
              double t_final, const Observers& observers = {});

}  // namespace xdiff
