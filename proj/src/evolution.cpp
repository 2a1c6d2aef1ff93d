#include "xdiff/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "xdiff/calculus.hpp"

namespace xdiff {

double GrowthLaws::nbar() const { return std::max(first.nbar, second.nbar); }

double GrowthLaws::alpha() const { return std::min(first.slope, second.slope); }

double GrowthLaws::rate_bound() const {
    const double top = nbar();
    double r = 0.0;
    for (const GrowthLaw& g : {first, second}) {
        r = std::max({r, std::abs(g(0.0)), std::abs(g(top))});
    }
    return r;
}

void validate(const GrowthLaws& laws) {
    for (const GrowthLaw& g : {laws.first, laws.second}) {
        if (!(g.nbar > 0.0) || !std::isfinite(g.nbar)) throw ConfigError("growth nbar must be positive");
        if (!(g.slope >= 0.0) || !std::isfinite(g.slope)) throw ConfigError("growth slope must be nonnegative");
    }
}

std::string_view to_string(Mode m) { return m == Mode::brinkman ? "brinkman" : "darcy"; }

Mode parse_mode(std::string_view text) {
    if (text == "brinkman") return Mode::brinkman;
    if (text == "darcy") return Mode::darcy;
    throw ConfigError("unknown mode '" + std::string(text) + "' (expected brinkman|darcy)");
}

void validate(const StepperConfig& cfg) {
    if (!(cfg.cfl_safety > 0.0 && cfg.cfl_safety <= 1.0)) throw ConfigError("cfl_safety must lie in (0, 1]");
    if (!(cfg.bound_tolerance >= 0.0)) throw ConfigError("bound_tolerance must be nonnegative");
    if (cfg.mode == Mode::brinkman && !(cfg.nu > 0.0)) throw ConfigError("brinkman mode needs nu > 0");
    validate(cfg.solver);
}

FaceField upwind_flux(const ScalarField& n, const FaceField& v) {
    const Grid& g = n.grid();
    if (!(g == v.grid())) throw Error("upwind_flux: grid mismatch");
    FaceField flux(g);
    const std::size_t cells = g.cells_per_axis();
    const bool noflux = g.boundary() == Boundary::noflux;
    for (int axis = 0; axis < g.dimension(); ++axis) {
        for (std::size_t t = 0; t < g.tangential_count(); ++t) {
            for (std::size_t k = 0; k <= cells; ++k) {
                if (noflux && (k == 0 || k == cells)) continue;
                const std::size_t lo = g.cell_along(axis, k == 0 ? cells - 1 : k - 1, t);
                const std::size_t hi = g.cell_along(axis, k == cells ? 0 : k, t);
                const double speed = v.at(axis, k, t);
                flux.at(axis, k, t) = std::max(speed, 0.0) * n[lo] + std::min(speed, 0.0) * n[hi];
            }
        }
    }
    return flux;
}

Reaction reaction(const ScalarField& n1, const ScalarField& n2, const GrowthLaws& laws) {
    Reaction r{ScalarField(n1.grid()), ScalarField(n2.grid())};
    for (std::size_t c = 0; c < n1.size(); ++c) {
        const double total = n1[c] + n2[c];
        r.r1[c] = n1[c] * laws.first(total);
        r.r2[c] = n2[c] * laws.second(total);
    }
    return r;
}

FaceField transport_velocity(const State& state, const TensorField& tensor, Mode mode) {
    const ScalarField& potential = mode == Mode::darcy ? state.total() : state.m;
    FaceField v = apply_tensor(tensor, gradient(potential), state.t);
    v *= -1.0;
    return v;
}

double stable_dt(const State& state, const FaceField& v, const StepperConfig& cfg, const TensorField& tensor,
                 const GrowthLaws& laws) {
    constexpr double guard = 1e-14;
    const Grid& g = state.n1.grid();
    const double dx = g.cell_size();
    const double d = g.dimension();
    const double nbar = laws.nbar();

    const double dt_transport = cfg.cfl_safety * dx / (2.0 * d * v.max_abs() + guard);

    const double nu = cfg.mode == Mode::brinkman ? cfg.nu : 0.0;
    const double symbol = 4.0 * d * sup_norm(tensor.sample(state.t), g.dimension()) / (dx * dx);
    double rate = std::max(laws.first.slope, laws.second.slope) * nbar;
    rate += 0.5 * nbar * symbol / (1.0 + nu * symbol);
    if (cfg.mode == Mode::brinkman) {
        double kappa = 0.0;
        for (std::size_t c = 0; c < state.n1.size(); ++c) {
            const double n = state.n1[c] + state.n2[c];
            const double excess = state.m[c] - n;
            if (excess <= 0.0) continue;
            kappa = std::max(kappa, excess / std::max(nbar - n, 1e-3 * nbar));
        }
        rate += nbar * kappa / cfg.nu;
    }
    const double dt_rate = rate > 0.0 ? cfg.cfl_safety / rate : std::numeric_limits<double>::infinity();
    return std::min(dt_transport, dt_rate);
}

State make_state(ScalarField n1, ScalarField n2, double t, const TensorField& tensor, const StepperConfig& cfg) {
    if (!(n1.grid() == n2.grid()) || !(n1.grid() == tensor.grid())) throw Error("make_state: grid mismatch");
    if (n1.min() < 0.0 || n2.min() < 0.0) throw ConfigError("initial densities must be nonnegative");
    State s;
    s.t = t;
    ScalarField total = n1 + n2;
    s.n1 = std::move(n1);
    s.n2 = std::move(n2);
    if (cfg.mode == Mode::brinkman) {
        s.m = solve_brinkman(BrinkmanOperator(cfg.nu, tensor, t), total, cfg.solver).m;
    } else {
        s.m = std::move(total);
    }
    return s;
}

namespace {

State advance(const State& state, const FaceField& v, const TensorField& tensor, const GrowthLaws& laws,
              const StepperConfig& cfg, double dt, std::size_t step_index) {
    const Grid& g = state.n1.grid();
    const double vol = g.cell_volume();
    const Reaction r = reaction(state.n1, state.n2, laws);

    State next;
    next.t = state.t + dt;
    next.clipped_mass = state.clipped_mass;
    next.clip_warning = state.clip_warning;

    double clipped = 0.0;
    const auto update = [&](const ScalarField& n, const ScalarField& rate) {
        const ScalarField div = divergence(upwind_flux(n, v));
        ScalarField out(g);
        for (std::size_t c = 0; c < out.size(); ++c) {
            double value = n[c] - dt * div[c] + dt * rate[c];
            if (!std::isfinite(value)) {
                std::ostringstream msg;
                msg << "non-finite density at cell " << c << " in step " << step_index << " (t = " << state.t
                    << ", dt = " << dt << ")";
                throw StepFailure(msg.str(), step_index, state.t);
            }
            if (value < 0.0) {
                clipped -= value * vol;
                value = 0.0;
            }
            out[c] = value;
        }
        return out;
    };
    next.n1 = update(state.n1, r.r1);
    next.n2 = update(state.n2, r.r2);

    ScalarField total = next.total();
    next.clipped_mass += clipped;
    if (clipped > 1e-6 * integrate(total)) next.clip_warning = true;

    if (cfg.mode == Mode::brinkman) {
        try {
            next.m = solve_brinkman(BrinkmanOperator(cfg.nu, tensor, next.t), total, cfg.solver).m;
        } catch (const SolverFailure& e) {
            throw StepFailure(std::string(e.what()) + " in step " + std::to_string(step_index), step_index, state.t);
        }
    } else {
        next.m = std::move(total);
    }
    return next;
}

}  // namespace

State step(const State& state, const TensorField& tensor, const GrowthLaws& laws, const StepperConfig& cfg,
           double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error("step: dt must be positive and finite");
    const FaceField v = transport_velocity(state, tensor, cfg.mode);
    return advance(state, v, tensor, laws, cfg, dt, 0);
}

RunResult run(State initial, const TensorField& tensor, const GrowthLaws& laws, const StepperConfig& cfg,
              double t_final, const Observers& obs) {
    validate(cfg);
    if (!(t_final >= initial.t)) throw ConfigError("t_final must not precede the initial time");
    const std::size_t cadence = std::max<std::size_t>(obs.cadence, 1);

    RunResult result{std::move(initial), 0};
    State& s = result.state;
    const double t0 = s.t;
    if (obs.on_step) obs.on_step(s, 0);
    if (obs.on_sample) obs.on_sample(s, 0);

    std::size_t next_sample = 1;
    while (s.t < t_final) {
        const FaceField v = transport_velocity(s, tensor, cfg.mode);
        double dt = stable_dt(s, v, cfg, tensor, laws);
        if (!(dt > 0.0) || !std::isfinite(dt)) {
            throw StepFailure("no admissible time step", result.steps, s.t);
        }

        double stop = t_final;
        bool sample_stop = false;
        if (obs.sample_interval > 0.0) {
            const double ts = t0 + static_cast<double>(next_sample) * obs.sample_interval;
            if (ts < t_final) {
                stop = ts;
                sample_stop = true;
            }
        }
        // Land exactly on the stop; absorb slivers shorter than 1e-6 dt.
        bool landing = false;
        if (s.t + dt * (1.0 + 1e-6) >= stop) {
            dt = stop - s.t;
            landing = true;
        }

        try {
            s = advance(s, v, tensor, laws, cfg, dt, result.steps + 1);
        } catch (const StepFailure&) {
            throw;
        } catch (const Error& e) {
            throw StepFailure(std::string(e.what()) + " in step " + std::to_string(result.steps + 1),
                              result.steps + 1, s.t);
        }
        ++result.steps;
        if (landing) s.t = stop;

        const bool final = s.t >= t_final;
        if (obs.on_step && (final || result.steps % cadence == 0)) obs.on_step(s, result.steps);
        if (landing && sample_stop) {
            ++next_sample;
            if (obs.on_sample) obs.on_sample(s, result.steps);
        } else if (final && obs.on_sample) {
            obs.on_sample(s, result.steps);
        }
    }
    return result;
}

}  // namespace xdiff
