#include "xdiff/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "xdiff/brinkman.hpp"
#include "xdiff/calculus.hpp"

namespace xdiff {

namespace {

constexpr double log_guard = 1e-300;

void require_same_grid(const Grid& a, const Grid& b, const char* who) {
    if (!(a == b)) throw Error(std::string(who) + ": grid mismatch");
}

}  // namespace

double entropy(const ScalarField& n) {
    double s = 0.0;
    for (double v : n.values()) {
        if (v < 0.0) throw Error("entropy: negative density");
        if (v > 0.0) s += v * (std::log(v) - 1.0);
    }
    return s * n.grid().cell_volume();
}

double dissipation_rate(const ScalarField& n, const ScalarField& m, const TensorField& tensor, double t, double nu) {
    require_same_grid(n.grid(), m.grid(), "dissipation_rate");
    if (nu > 0.0) {
        double s = 0.0;
        for (std::size_t c = 0; c < n.size(); ++c) s += n[c] * (m[c] - n[c]);
        return -s * n.grid().cell_volume() / nu;
    }
    const FaceField grad = gradient(n);
    return face_dot(grad, apply_tensor(tensor, grad, t));
}

double dissipation_rate_direct(const ScalarField& n, const ScalarField& m, const TensorField& tensor, double t) {
    const ScalarField div = divergence(apply_tensor(tensor, gradient(m), t));
    return -integrate(hadamard(n, div));
}

double dissipation_kinetic(const ScalarField& n, const ScalarField& m) {
    require_same_grid(n.grid(), m.grid(), "dissipation_kinetic");
    const Grid& g = n.grid();
    const FaceField grad = gradient(m);
    const std::size_t cells = g.cells_per_axis();
    const bool periodic = g.boundary() == Boundary::periodic;
    double s = 0.0;
    for (int axis = 0; axis < g.dimension(); ++axis) {
        for (std::size_t t = 0; t < g.tangential_count(); ++t) {
            // Wall faces carry zero gradient, so only the open faces matter.
            for (std::size_t k = periodic ? 0 : 1; k < cells; ++k) {
                const std::size_t lo = g.cell_along(axis, k == 0 ? cells - 1 : k - 1, t);
                const std::size_t hi = g.cell_along(axis, k, t);
                const double gm = grad.at(axis, k, t);
                s += 0.5 * (n[lo] + n[hi]) * gm * gm;
            }
        }
    }
    return s * g.cell_volume();
}

double second_moment(const ScalarField& n, const SecondMomentWeight& weight) {
    require_same_grid(n.grid(), weight.grid(), "second_moment");
    double s = 0.0;
    const auto& w = weight.values();
    for (std::size_t c = 0; c < n.size(); ++c) s += n[c] * w[c];
    return s * n.grid().cell_volume();
}

double overlap(const ScalarField& n1, const ScalarField& n2) {
    require_same_grid(n1.grid(), n2.grid(), "overlap");
    return integrate(hadamard(n1, n2));
}

double reaction_entropy_rate(const ScalarField& n1, const ScalarField& n2, const GrowthLaws& laws) {
    require_same_grid(n1.grid(), n2.grid(), "reaction_entropy_rate");
    double s = 0.0;
    for (std::size_t c = 0; c < n1.size(); ++c) {
        const double n = n1[c] + n2[c];
        if (n <= 0.0) continue;
        s += std::log(n + log_guard) * (n1[c] * laws.first(n) + n2[c] * laws.second(n));
    }
    return s * n1.grid().cell_volume();
}

double l2_distance(const ScalarField& f, const ScalarField& g) {
    require_same_grid(f.grid(), g.grid(), "l2_distance");
    double s = 0.0;
    for (std::size_t c = 0; c < f.size(); ++c) {
        const double d = f[c] - g[c];
        s += d * d;
    }
    return std::sqrt(s * f.grid().cell_volume());
}

double face_l2_distance(const FaceField& f, const FaceField& g) {
    require_same_grid(f.grid(), g.grid(), "face_l2_distance");
    FaceField d = f;
    d -= g;
    return std::sqrt(face_dot(d, d));
}

DiagnosticsRecord compute_record(const State& state, std::size_t step, const TensorField& tensor,
                                 const GrowthLaws& laws, double nu, const SecondMomentWeight& weight) {
    const ScalarField n = state.total();
    DiagnosticsRecord r;
    r.step = step;
    r.t = state.t;
    r.mass1 = integrate(state.n1);
    r.mass2 = integrate(state.n2);
    r.mass_total = integrate(n);
    r.linf_total = n.max();
    r.second_moment = second_moment(n, weight);
    r.entropy = entropy(n);
    r.dissipation_rate = dissipation_rate(n, state.m, tensor, state.t, nu);
    r.dissipation_kinetic = dissipation_kinetic(n, state.m);
    if (nu > 0.0) {
        const FaceField grad = gradient(state.m);
        r.sqrt_nu_grad_m_l2 = std::sqrt(nu * face_dot(grad, grad));
    }
    r.overlap = overlap(state.n1, state.n2);
    r.clipped_mass_cum = state.clipped_mass;
    r.reaction_entropy_rate = reaction_entropy_rate(state.n1, state.n2, laws);
    return r;
}

void AuditAccumulator::add(const DiagnosticsRecord& r) {
    if (!started_) {
        started_ = true;
        audit_.entropy_initial = r.entropy;
    } else {
        if (r.step != last_.step + 1) {
            throw Error("entropy audit: records must cover every step (gap after step " + std::to_string(last_.step) +
                        ")");
        }
        const double dt = r.t - last_.t;
        audit_.dissipation_integral += 0.5 * dt * (r.dissipation_rate + last_.dissipation_rate);
        audit_.reaction_integral += 0.5 * dt * (r.reaction_entropy_rate + last_.reaction_entropy_rate);
    }
    audit_.entropy_final = r.entropy;
    last_ = r;
}

EntropyAudit AuditAccumulator::result() const {
    if (!started_) throw Error("entropy audit: no records");
    EntropyAudit a = audit_;
    a.residual = (a.entropy_final - a.entropy_initial + a.dissipation_integral) - a.reaction_integral;
    return a;
}

EntropyAudit entropy_audit(std::span<const DiagnosticsRecord> records) {
    AuditAccumulator acc;
    for (const DiagnosticsRecord& r : records) acc.add(r);
    return acc.result();
}

double second_moment_constant(double growth_bound, double tensor_sup, double kinetic_sup) {
    return std::max(1.0 + growth_bound, tensor_sup * tensor_sup * kinetic_sup);
}

double second_moment_envelope(double initial_moment, double constant, double t) {
    return (initial_moment + constant * t) * std::exp(constant * t);
}

}  // namespace xdiff
