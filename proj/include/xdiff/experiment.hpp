#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xdiff/config.hpp"
#include "xdiff/diagnostics.hpp"
#include "xdiff/evolution.hpp"
#include "xdiff/fit.hpp"

namespace xdiff {

/// Everything a single trajectory reports. Diagnostics are evaluated at every
/// step; `records` keeps the rows at the configured record cadence.
struct RunReport {
    State final_state;
    std::vector<DiagnosticsRecord> records;
    EntropyAudit audit;
    std::size_t steps = 0;
    double max_linf = 0.0;
    /// max(nbar1, nbar2) (1 + bound_tolerance).
    double linf_bound = 0.0;
    bool bound_ok = false;
    double dissipation_integral = 0.0;
    double kinetic_integral = 0.0;
    double kinetic_sup = 0.0;
    double sqrt_nu_gradm_sup = 0.0;
    double tensor_sup = 0.0;
    double moment_constant = 0.0;
    /// max over steps of M2(t) - envelope(t); nonpositive when the bound holds.
    double moment_excess = 0.0;
    bool moment_ok = false;
};

/// Runs the configured trajectory. With an output directory, writes
/// diagnostics.csv, audit.json and snapshots there; without, nothing is written.
/// `on_sample` fires at multiples of cfg.sample_interval, at t = 0 and at t_final.
RunReport simulate(const SimConfig& cfg, const std::optional<std::filesystem::path>& out_dir,
                   const StateObserver& on_sample = {});

/// simulate() into cfg.output.directory.
RunReport run_single(const SimConfig& cfg);

struct SweepRow {
    double nu = 0.0;
    /// L2(0,T;L2) norm of m_nu - n_nu within the same run.
    double l2_m_minus_n = 0.0;
    /// L2(0,T;L2) distance of n_nu to the darcy reference n_0.
    double l2_n_minus_n0 = 0.0;
    /// L2(0,T;L2) distance of grad m_nu to grad n_0.
    double l2_gradm_minus_gradn0 = 0.0;
    /// Time integral of dissipation_rate.
    double dissipation_integral = 0.0;
    /// Time integral of dissipation_kinetic.
    double kinetic_integral = 0.0;
    double sqrt_nu_gradm_sup = 0.0;
    std::size_t steps = 0;
    double max_linf = 0.0;
    bool bound_ok = false;
    bool moment_ok = false;
};

/// Rows sorted by decreasing nu, with log-log fits against nu when there are
/// at least two rows.
struct ConvergenceTable {
    std::vector<SweepRow> rows;
    std::optional<RateFit> fit_m_minus_n;
    std::optional<RateFit> fit_n_minus_n0;
    std::optional<RateFit> fit_gradm_minus_gradn0;
    RunReport reference;
    std::string config_digest;
};

/// Darcy reference first, then one brinkman run per nu in parallel. Distances
/// are trapezoid integrals over the common sample times. Writes
/// <out>/reference, <out>/nu_<value>, sweep.csv and sweep_summary.json. If a
/// member fails, the completed rows are still written and RuntimeFailure is
/// rethrown.
ConvergenceTable run_sweep(const SimConfig& cfg, std::span<const double> nu_list,
                           const std::optional<std::filesystem::path>& out_dir);

struct RefinementRow {
    std::size_t cells = 0;
    double dx = 0.0;
    std::size_t steps = 0;
    /// L2 distance of the total density to the next finer run averaged onto
    /// this grid; empty for the finest run.
    std::optional<double> self_error;
    double audit_residual = 0.0;
    double overlap = 0.0;
    double max_linf = 0.0;
    bool bound_ok = false;
    bool moment_ok = false;
};

struct RefinementReport {
    std::vector<RefinementRow> rows;
    /// Fits against dx; empty when fewer than two positive values exist.
    std::optional<RateFit> fit_self_error;
    std::optional<RateFit> fit_audit_residual;
    std::optional<RateFit> fit_overlap;
    std::string config_digest;
};

/// One run per cell count (ascending, each dividing the next; equal counts
/// allowed). Throws ConfigError otherwise. Writes <out>/level_<k>_cells_<N>,
/// refinement.csv and refinement_summary.json.
RefinementReport run_refinement(const SimConfig& cfg, std::span<const std::size_t> cells_list,
                                const std::optional<std::filesystem::path>& out_dir);

/// Averages a fine field onto a coarser nested grid with the same domain.
ScalarField restrict_average(const ScalarField& fine, const Grid& coarse);

}  // namespace xdiff
