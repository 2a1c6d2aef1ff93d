#include "xdiff/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <utility>

#include "xdiff/calculus.hpp"
#include "xdiff/error.hpp"
#include "xdiff/output.hpp"

namespace xdiff {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json to_json(const RateFit& f) {
    return {{"slope", f.slope},
            {"intercept", f.intercept},
            {"r_squared", f.r_squared},
            {"slope_stderr", f.slope_stderr},
            {"slope_ci95", {f.slope_ci_low, f.slope_ci_high}}};
}

json to_json(const std::optional<RateFit>& f) { return f ? to_json(*f) : json(nullptr); }

/// Fit over the points, or nothing when fewer than two usable points exist.
std::optional<RateFit> try_fit(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) return std::nullopt;
    try {
        return fit_rate(points);
    } catch (const Error&) {
        return std::nullopt;
    }
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
    double s = 0.0;
    for (std::size_t k = 1; k < t.size(); ++k) s += 0.5 * (t[k] - t[k - 1]) * (f[k] + f[k - 1]);
    return s;
}

std::string short_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::optional<fs::path> subdir(const std::optional<fs::path>& root, const std::string& name) {
    if (!root) return std::nullopt;
    return *root / name;
}

}  // namespace

RunReport simulate(const SimConfig& cfg, const std::optional<fs::path>& out_dir, const StateObserver& on_sample) {
    validate(cfg);
    const Grid grid = make_grid(cfg);
    const TensorField tensor = make_tensor(cfg, grid);
    InitialDensities init = make_initial(cfg, grid);
    const GrowthLaws& laws = cfg.growth;
    const double nu = cfg.stepper.mode == Mode::brinkman ? cfg.stepper.nu : 0.0;

    std::optional<DiagnosticsCsv> csv;
    if (out_dir) {
        ensure_directory(*out_dir);
        csv.emplace(*out_dir / "diagnostics.csv");
    }

    State initial = make_state(std::move(init.n1), std::move(init.n2), 0.0, tensor, cfg.stepper);

    RunReport rep;
    rep.linf_bound = laws.nbar() * (1.0 + cfg.stepper.bound_tolerance);
    const SecondMomentWeight weight(grid);
    AuditAccumulator audit;
    std::vector<std::pair<double, double>> moments;
    std::optional<DiagnosticsRecord> prev;

    Observers obs;
    obs.cadence = 1;
    obs.on_step = [&](const State& st, std::size_t step) {
        const DiagnosticsRecord r = compute_record(st, step, tensor, laws, nu, weight);
        audit.add(r);
        rep.max_linf = std::max(rep.max_linf, r.linf_total);
        rep.kinetic_sup = std::max(rep.kinetic_sup, r.dissipation_kinetic);
        rep.sqrt_nu_gradm_sup = std::max(rep.sqrt_nu_gradm_sup, r.sqrt_nu_grad_m_l2);
        rep.tensor_sup = std::max(rep.tensor_sup, sup_norm(tensor.sample(st.t), grid.dimension()));
        if (prev) {
            const double dt = r.t - prev->t;
            rep.dissipation_integral += 0.5 * dt * (r.dissipation_rate + prev->dissipation_rate);
            rep.kinetic_integral += 0.5 * dt * (r.dissipation_kinetic + prev->dissipation_kinetic);
        }
        prev = r;
        moments.emplace_back(r.t, r.second_moment);

        const bool final = st.t >= cfg.t_final;
        if (step % cfg.record_every == 0 || final) {
            rep.records.push_back(r);
            if (csv) csv->write(r);
        }
        if (out_dir && cfg.output.snapshot_every > 0 && (step % cfg.output.snapshot_every == 0 || final)) {
            write_snapshot(*out_dir, step, st);
        }
    };
    obs.sample_interval = cfg.sample_interval;
    obs.on_sample = on_sample;

    RunResult result = run(std::move(initial), tensor, laws, cfg.stepper, cfg.t_final, obs);
    rep.final_state = std::move(result.state);
    rep.steps = result.steps;
    rep.audit = audit.result();
    rep.bound_ok = rep.max_linf <= rep.linf_bound;

    rep.moment_constant = second_moment_constant(laws.rate_bound(), rep.tensor_sup, rep.kinetic_sup);
    const double m0 = moments.front().second;
    const double t0 = moments.front().first;
    rep.moment_excess = -std::numeric_limits<double>::infinity();
    for (const auto& [t, m2] : moments) {
        rep.moment_excess = std::max(rep.moment_excess, m2 - second_moment_envelope(m0, rep.moment_constant, t - t0));
    }
    rep.moment_ok = rep.moment_excess <= 0.0;

    if (out_dir) {
        const EntropyAudit& a = rep.audit;
        json doc = {
            {"config_digest", config_digest(cfg)},
            {"mode", std::string(to_string(cfg.stepper.mode))},
            {"nu", nu},
            {"steps", rep.steps},
            {"t_final", rep.final_state.t},
            {"entropy_audit",
             {{"entropy_initial", a.entropy_initial},
              {"entropy_final", a.entropy_final},
              {"dissipation_integral", a.dissipation_integral},
              {"reaction_integral", a.reaction_integral},
              {"residual", a.residual}}},
            {"max_linf_total", rep.max_linf},
            {"linf_bound", rep.linf_bound},
            {"bound_ok", rep.bound_ok},
            {"clipped_mass", rep.final_state.clipped_mass},
            {"clip_warning", rep.final_state.clip_warning},
            {"kinetic_integral", rep.kinetic_integral},
            {"sqrt_nu_gradm_sup", rep.sqrt_nu_gradm_sup},
            {"second_moment_envelope",
             {{"constant", rep.moment_constant}, {"max_excess", rep.moment_excess}, {"ok", rep.moment_ok}}},
        };
        write_json(*out_dir / "audit.json", doc);
    }
    return rep;
}

RunReport run_single(const SimConfig& cfg) { return simulate(cfg, fs::path(cfg.output.directory)); }

ScalarField restrict_average(const ScalarField& fine, const Grid& coarse) {
    const Grid& g = fine.grid();
    if (g.dimension() != coarse.dimension() || g.half_length() != coarse.half_length() ||
        g.boundary() != coarse.boundary() || g.cells_per_axis() % coarse.cells_per_axis() != 0) {
        throw Error("restrict_average: grids are not nested");
    }
    const std::size_t factor = g.cells_per_axis() / coarse.cells_per_axis();
    const std::size_t nf = g.cells_per_axis();
    const std::size_t nc = coarse.cells_per_axis();
    ScalarField out(coarse);
    const std::size_t rows = g.dimension() == 2 ? nf : 1;
    for (std::size_t j = 0; j < rows; ++j) {
        for (std::size_t i = 0; i < nf; ++i) {
            const std::size_t c = (i / factor) + (g.dimension() == 2 ? nc * (j / factor) : 0);
            out[c] += fine[i + nf * j];
        }
    }
    const double weight = 1.0 / std::pow(static_cast<double>(factor), g.dimension());
    out *= weight;
    return out;
}

ConvergenceTable run_sweep(const SimConfig& cfg, std::span<const double> nu_list,
                           const std::optional<fs::path>& out_dir) {
    validate(cfg);
    if (nu_list.empty()) throw ConfigError("sweep: the nu list is empty");
    std::vector<double> nus(nu_list.begin(), nu_list.end());
    for (double nu : nus) {
        if (!(nu > 0.0) || !std::isfinite(nu)) throw ConfigError("sweep: nu values must be positive and finite");
    }
    std::sort(nus.begin(), nus.end(), std::greater<>());
    if (std::adjacent_find(nus.begin(), nus.end()) != nus.end()) throw ConfigError("sweep: duplicate nu value");
    if (out_dir) ensure_directory(*out_dir);

    ConvergenceTable table;
    table.config_digest = config_digest(cfg);

    struct Sample {
        double t;
        ScalarField n;
        FaceField grad;
    };
    const Grid coarse = make_grid(cfg);
    SimConfig ref_cfg = cfg;
    ref_cfg.stepper.mode = Mode::darcy;
    ref_cfg.cells_per_axis = cfg.cells_per_axis * cfg.reference_refinement;
    std::vector<Sample> reference;
    table.reference = simulate(ref_cfg, subdir(out_dir, "reference"), [&](const State& st, std::size_t) {
        ScalarField n = st.total();
        if (cfg.reference_refinement > 1) n = restrict_average(n, coarse);
        FaceField grad = gradient(n);
        reference.push_back({st.t, std::move(n), std::move(grad)});
    });

    const auto member = [&](double nu) {
        SimConfig c = cfg;
        c.stepper.mode = Mode::brinkman;
        c.stepper.nu = nu;
        std::vector<double> times, mn, nn0, gm;
        std::size_t k = 0;
        const RunReport rep = simulate(c, subdir(out_dir, "nu_" + short_number(nu)), [&](const State& st, std::size_t) {
            if (k >= reference.size() || st.t != reference[k].t) {
                throw RuntimeFailure("sweep: sample times of nu = " + short_number(nu) + " differ from the reference");
            }
            const ScalarField n = st.total();
            const double a = l2_distance(st.m, n);
            const double b = l2_distance(n, reference[k].n);
            const double g = face_l2_distance(gradient(st.m), reference[k].grad);
            times.push_back(st.t);
            mn.push_back(a * a);
            nn0.push_back(b * b);
            gm.push_back(g * g);
            ++k;
        });
        if (k != reference.size()) {
            throw RuntimeFailure("sweep: nu = " + short_number(nu) + " recorded " + std::to_string(k) +
                                 " samples, the reference " + std::to_string(reference.size()));
        }
        SweepRow row;
        row.nu = nu;
        row.l2_m_minus_n = std::sqrt(trapezoid(times, mn));
        row.l2_n_minus_n0 = std::sqrt(trapezoid(times, nn0));
        row.l2_gradm_minus_gradn0 = std::sqrt(trapezoid(times, gm));
        row.dissipation_integral = rep.dissipation_integral;
        row.kinetic_integral = rep.kinetic_integral;
        row.sqrt_nu_gradm_sup = rep.sqrt_nu_gradm_sup;
        row.steps = rep.steps;
        row.max_linf = rep.max_linf;
        row.bound_ok = rep.bound_ok;
        row.moment_ok = rep.moment_ok;
        return row;
    };

    std::vector<std::future<SweepRow>> jobs;
    jobs.reserve(nus.size());
    for (double nu : nus) jobs.push_back(std::async(std::launch::async, member, nu));
    std::string failure;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        try {
            table.rows.push_back(jobs[i].get());
        } catch (const std::exception& e) {
            if (failure.empty()) failure = "sweep member nu = " + short_number(nus[i]) + " failed: " + e.what();
        }
    }

    std::vector<std::pair<double, double>> p_mn, p_nn0, p_gm;
    for (const SweepRow& r : table.rows) {
        p_mn.emplace_back(r.nu, r.l2_m_minus_n);
        p_nn0.emplace_back(r.nu, r.l2_n_minus_n0);
        p_gm.emplace_back(r.nu, r.l2_gradm_minus_gradn0);
    }
    table.fit_m_minus_n = try_fit(p_mn);
    table.fit_n_minus_n0 = try_fit(p_nn0);
    table.fit_gradm_minus_gradn0 = try_fit(p_gm);

    if (out_dir) {
        std::string text = "nu,l2_m_minus_n,l2_n_minus_n0,l2_gradm_minus_gradn0,dissipation_integral,sqrt_nu_gradm_sup\n";
        for (const SweepRow& r : table.rows) {
            text += format_value(r.nu) + ',' + format_value(r.l2_m_minus_n) + ',' + format_value(r.l2_n_minus_n0) +
                    ',' + format_value(r.l2_gradm_minus_gradn0) + ',' + format_value(r.dissipation_integral) + ',' +
                    format_value(r.sqrt_nu_gradm_sup) + '\n';
        }
        write_text(*out_dir / "sweep.csv", text);

        json rows = json::array();
        for (const SweepRow& r : table.rows) {
            rows.push_back({{"nu", r.nu},
                            {"kinetic_integral", r.kinetic_integral},
                            {"steps", r.steps},
                            {"max_linf_total", r.max_linf},
                            {"bound_ok", r.bound_ok},
                            {"second_moment_ok", r.moment_ok}});
        }
        json doc = {
            {"config_digest", table.config_digest},
            {"status", failure.empty() ? "complete" : "partial"},
            {"fits_against_nu",
             {{"l2_m_minus_n", to_json(table.fit_m_minus_n)},
              {"l2_n_minus_n0", to_json(table.fit_n_minus_n0)},
              {"l2_gradm_minus_gradn0", to_json(table.fit_gradm_minus_gradn0)}}},
            {"reference",
             {{"mode", "darcy"},
              {"refinement", cfg.reference_refinement},
              {"steps", table.reference.steps},
              {"samples", reference.size()}}},
            {"runs", rows},
        };
        if (!failure.empty()) doc["failure"] = failure;
        write_json(*out_dir / "sweep_summary.json", doc);
    }
    if (!failure.empty()) throw RuntimeFailure(failure);
    return table;
}

RefinementReport run_refinement(const SimConfig& cfg, std::span<const std::size_t> cells_list,
                                const std::optional<fs::path>& out_dir) {
    validate(cfg);
    if (cells_list.empty()) throw ConfigError("refine: the cell list is empty");
    for (std::size_t k = 0; k < cells_list.size(); ++k) {
        if (cells_list[k] < 2) throw ConfigError("refine: cell counts must be at least 2");
        if (k > 0 && (cells_list[k] < cells_list[k - 1] || cells_list[k] % cells_list[k - 1] != 0)) {
            throw ConfigError("refine: cell counts must be ascending and each must divide the next (" +
                              std::to_string(cells_list[k - 1]) + ", " + std::to_string(cells_list[k]) + ")");
        }
    }
    if (out_dir) ensure_directory(*out_dir);

    std::vector<std::future<RunReport>> jobs;
    for (std::size_t k = 0; k < cells_list.size(); ++k) {
        SimConfig c = cfg;
        c.cells_per_axis = cells_list[k];
        const std::string name = "level_" + std::to_string(k) + "_cells_" + std::to_string(cells_list[k]);
        jobs.push_back(std::async(std::launch::async, [c, dir = subdir(out_dir, name)] { return simulate(c, dir); }));
    }
    std::vector<RunReport> runs;
    std::string failure;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        try {
            runs.push_back(jobs[k].get());
        } catch (const std::exception& e) {
            if (failure.empty()) failure = "refine member cells = " + std::to_string(cells_list[k]) + " failed: " + e.what();
        }
    }
    if (!failure.empty()) throw RuntimeFailure(failure);

    RefinementReport report;
    report.config_digest = config_digest(cfg);
    for (std::size_t k = 0; k < runs.size(); ++k) {
        const RunReport& r = runs[k];
        RefinementRow row;
        row.cells = cells_list[k];
        row.dx = r.final_state.n1.grid().cell_size();
        row.steps = r.steps;
        row.audit_residual = r.audit.residual;
        row.overlap = overlap(r.final_state.n1, r.final_state.n2);
        row.max_linf = r.max_linf;
        row.bound_ok = r.bound_ok;
        row.moment_ok = r.moment_ok;
        if (k + 1 < runs.size()) {
            const ScalarField coarse = r.final_state.total();
            row.self_error = l2_distance(coarse, restrict_average(runs[k + 1].final_state.total(), coarse.grid()));
        }
        report.rows.push_back(row);
    }

    std::vector<std::pair<double, double>> p_self, p_audit, p_overlap;
    for (const RefinementRow& r : report.rows) {
        if (r.self_error) p_self.emplace_back(r.dx, *r.self_error);
        p_audit.emplace_back(r.dx, std::abs(r.audit_residual));
        p_overlap.emplace_back(r.dx, r.overlap);
    }
    report.fit_self_error = try_fit(p_self);
    report.fit_audit_residual = try_fit(p_audit);
    report.fit_overlap = try_fit(p_overlap);

    if (out_dir) {
        std::string text = "cells,dx,steps,self_error,audit_residual,overlap,max_linf_total\n";
        for (const RefinementRow& r : report.rows) {
            text += std::to_string(r.cells) + ',' + format_value(r.dx) + ',' + std::to_string(r.steps) + ',' +
                    (r.self_error ? format_value(*r.self_error) : std::string()) + ',' +
                    format_value(r.audit_residual) + ',' + format_value(r.overlap) + ',' + format_value(r.max_linf) +
                    '\n';
        }
        write_text(*out_dir / "refinement.csv", text);
        json doc = {
            {"config_digest", report.config_digest},
            {"fits_against_dx",
             {{"self_error", to_json(report.fit_self_error)},
              {"abs_audit_residual", to_json(report.fit_audit_residual)},
              {"overlap", to_json(report.fit_overlap)}}},
        };
        write_json(*out_dir / "refinement_summary.json", doc);
    }
    return report;
}

}  // namespace xdiff
