#pragma once

#include <cstddef>
#include <span>

#include "xdiff/evolution.hpp"
#include "xdiff/field.hpp"
#include "xdiff/grid.hpp"
#include "xdiff/tensor.hpp"

namespace xdiff {

/// Observables of one state.
struct DiagnosticsRecord {
    std::size_t step = 0;
    double t = 0.0;
    double mass1 = 0.0;
    double mass2 = 0.0;
    double mass_total = 0.0;
    double linf_total = 0.0;
    double second_moment = 0.0;
    double entropy = 0.0;
    double dissipation_rate = 0.0;
    double dissipation_kinetic = 0.0;
    double sqrt_nu_grad_m_l2 = 0.0;
    double overlap = 0.0;
    double clipped_mass_cum = 0.0;
    /// integral of log n * (n1 G1(n) + n2 G2(n)); feeds the entropy audit.
    double reaction_entropy_rate = 0.0;
};

/// Entropy balance along a trajectory:
/// residual = (entropy_final - entropy_initial + dissipation_integral) - reaction_integral.
struct EntropyAudit {
    double entropy_initial = 0.0;
    double entropy_final = 0.0;
    double dissipation_integral = 0.0;
    double reaction_integral = 0.0;
    double residual = 0.0;
};

/// integral of n (log n - 1), with 0 (log 0 - 1) = 0. Throws on negative input.
double entropy(const ScalarField& n);

/// Instantaneous entropy dissipation -integral of n div(A grad m).
/// nu > 0 uses div(A grad m) = (m - n)/nu; nu = 0 uses the face form
/// integral of grad n . A grad n.
double dissipation_rate(const ScalarField& n, const ScalarField& m, const TensorField& tensor, double t, double nu);

/// The same quantity computed directly from the discrete divergence.
double dissipation_rate_direct(const ScalarField& n, const ScalarField& m, const TensorField& tensor, double t);

/// Face sum of n_face |grad m|^2 dx^d with n_face the mean of the adjacent cells.
double dissipation_kinetic(const ScalarField& n, const ScalarField& m);

double second_moment(const ScalarField& n, const SecondMomentWeight& weight);

/// integral of n1 * n2.
double overlap(const ScalarField& n1, const ScalarField& n2);

/// integral of log n (n1 G1(n) + n2 G2(n)); cells with n = 0 contribute 0.
double reaction_entropy_rate(const ScalarField& n1, const ScalarField& n2, const GrowthLaws& laws);

/// Discrete L2 distance of two cell fields; throws on grid mismatch.
double l2_distance(const ScalarField& f, const ScalarField& g);
/// Discrete L2 distance of two face fields (face_dot form); throws on grid mismatch.
double face_l2_distance(const FaceField& f, const FaceField& g);

/// All observables of a state.
DiagnosticsRecord compute_record(const State& state, std::size_t step, const TensorField& tensor,
                                 const GrowthLaws& laws, double nu, const SecondMomentWeight& weight);

/// Streaming form of the trapezoid-rule audit. Records must arrive at
/// consecutive steps; add() throws on a gap.
class AuditAccumulator {
public:
    void add(const DiagnosticsRecord& record);
    /// Throws Error before the first record.
    EntropyAudit result() const;

private:
    bool started_ = false;
    DiagnosticsRecord last_;
    EntropyAudit audit_;
};

/// Trapezoid-rule entropy audit. Records must be consecutive steps (cadence 1);
/// throws otherwise.
EntropyAudit entropy_audit(std::span<const DiagnosticsRecord> records);

/// Growth constant of the second-moment envelope:
/// C = max(1 + growth_bound, tensor_sup^2 * kinetic_sup).
double second_moment_constant(double growth_bound, double tensor_sup, double kinetic_sup);

/// (M2(0) + C t) exp(C t).
double second_moment_envelope(double initial_moment, double constant, double t);

}  // namespace xdiff
