// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.
//
// Usage: acceptance <work-dir> [--known-failures 6,10]
// The exit status is nonzero when a criterion fails that is not listed as a
// known failure. Known failures still print FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xdiff/brinkman.hpp"
#include "xdiff/calculus.hpp"
#include "xdiff/config.hpp"
#include "xdiff/diagnostics.hpp"
#include "xdiff/experiment.hpp"
#include "xdiff/fit.hpp"

namespace fs = std::filesystem;
using namespace xdiff;

namespace {

// Criterion 1
constexpr double constant_tol = 1e-12;
constexpr double fourier_tol = 1e-9;
constexpr double solver_seconds = 1.0;
// Criterion 2
constexpr double linf_slack = 1e-8;
// Criterion 3
constexpr double mass_rel_tol = 1e-12;
// Criteria 4, 5, 10, 11
constexpr double min_order = 0.8;
constexpr double max_final_residual = 1e-3;
// Criterion 6
constexpr double rate_low = 0.45;
constexpr double rate_high = 0.75;
constexpr double sweep_seconds = 300.0;
// Criteria 7, 8
constexpr double dissipation_factor = 3.0;
constexpr double gradient_factor = 2.0;

const std::vector<std::size_t> refine_cells{64, 128, 256, 512};
const std::vector<std::size_t> segregation_cells{128, 256, 512};
const std::vector<double> sweep_nus{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

SimConfig load(const std::string& name) { return load_config(std::string(XDIFF_SOURCE_DIR) + "/configs/" + name); }

/// Shared state: runs reused by several criteria, and every run's envelope verdict.
struct Suite {
    fs::path work;
    std::vector<std::pair<std::string, bool>> moment_checks;
    std::optional<RefinementReport> brinkman_refine;
    std::optional<RefinementReport> darcy_refine;
    std::optional<ConvergenceTable> sweep;
    double sweep_time = 0.0;

    void note(const std::string& label, bool ok) { moment_checks.emplace_back(label, ok); }
    void note(const std::string& label, const RefinementReport& r) {
        for (const RefinementRow& row : r.rows) note(label + " N=" + std::to_string(row.cells), row.moment_ok);
    }
};

Outcome solver_exactness() {
    const auto start = std::chrono::steady_clock::now();
    double worst_constant = 0.0;
    for (double nu : {1e-4, 1e-2, 1.0}) {
        for (Boundary b : {Boundary::periodic, Boundary::noflux}) {
            for (int which = 0; which < 2; ++which) {
                const Grid g = build_grid(2, 1.0, 32, b);
                const TensorField a = which == 0 ? TensorField::identity(g) : TensorField::diagonal(g, 1.0, 4.0);
                const double c = 0.37;
                const BrinkmanOperator op(nu, a, 0.0);
                const ScalarField n(g, c);
                const BrinkmanSolution s = solve_brinkman(op, n);
                double err = 0.0;
                for (double v : s.m.values()) err = std::max(err, std::abs(v - c));
                worst_constant = std::max({worst_constant, err, s.relative_residual});
            }
        }
    }

    // n = 1 + 0.5 sin(k pi x) is an eigenvector of the periodic three-point
    // Laplacian with eigenvalue -4 sin^2(k pi dx / 2) / dx^2.
    double worst_fourier = 0.0;
    const std::size_t cells = 256;
    const Grid g = build_grid(1, 1.0, cells, Boundary::periodic);
    const double dx = g.cell_size();
    for (double nu : {1e-4, 1e-2, 1.0}) {
        for (int k : {1, 3, 17}) {
            const double kpi = k * std::numbers::pi;
            const double symbol = 4.0 * std::pow(std::sin(0.5 * kpi * dx), 2) / (dx * dx);
            ScalarField n(g);
            ScalarField exact(g);
            for (std::size_t i = 0; i < cells; ++i) {
                const double s = std::sin(kpi * g.center(i));
                n[i] = 1.0 + 0.5 * s;
                exact[i] = 1.0 + 0.5 * s / (1.0 + nu * symbol);
            }
            const ScalarField m = solve_brinkman(BrinkmanOperator(nu, TensorField::identity(g), 0.0), n).m;
            worst_fourier = std::max(worst_fourier, l2_distance(m, exact) / l2_norm(exact));
        }
    }
    const double elapsed = seconds_since(start);
    const bool pass = worst_constant <= constant_tol && worst_fourier <= fourier_tol && elapsed < solver_seconds;
    return {pass, fmt("constant error %.2e (<= %.0e), Fourier rel. L2 %.2e (<= %.0e), %.3f s (< %.0f s)",
                      worst_constant, constant_tol, worst_fourier, fourier_tol, elapsed, solver_seconds)};
}

std::optional<RefinementReport> refine(Suite& suite, const SimConfig& cfg, const std::vector<std::size_t>& cells,
                                       const std::string& name) {
    const RefinementReport r = run_refinement(cfg, cells, suite.work / name);
    suite.note(name, r);
    return r;
}

Outcome max_principle(Suite& suite) {
    std::string detail;
    bool pass = true;
    for (const auto* rep : {&suite.brinkman_refine, &suite.darcy_refine}) {
        const auto it = std::find_if((*rep)->rows.begin(), (*rep)->rows.end(),
                                     [](const RefinementRow& r) { return r.cells == 256; });
        const double bound = 1.0 + linf_slack;
        pass = pass && it->max_linf <= bound;
        detail += fmt("%s max |n|_inf %.10f; ", rep == &suite.brinkman_refine ? "brinkman" : "darcy", it->max_linf);
    }
    return {pass, detail + fmt("bound 1 + %.0e", linf_slack)};
}

Outcome conservation(Suite& suite) {
    struct Case {
        std::string label;
        SimConfig cfg;
    };
    std::vector<Case> cases;
    SimConfig smooth = load("smooth_1d.cfg");
    smooth.growth.first.slope = 0.0;
    smooth.growth.second.slope = 0.0;
    cases.push_back({"brinkman 1d", smooth});
    smooth.stepper.mode = Mode::darcy;
    smooth.stepper.nu = 0.0;
    cases.push_back({"darcy 1d", smooth});
    SimConfig aniso = load("aniso_2d.cfg");
    aniso.growth.first.slope = 0.0;
    aniso.growth.second.slope = 0.0;
    aniso.cells_per_axis = 32;
    aniso.t_final = 1.0;
    aniso.output.snapshot_every = 0;
    cases.push_back({"brinkman 2d anisotropic", aniso});

    bool pass = true;
    double worst = 0.0;
    for (Case& c : cases) {
        const RunReport r = simulate(c.cfg, std::nullopt);
        suite.note("conservation " + c.label, r.moment_ok);
        const DiagnosticsRecord& first = r.records.front();
        const DiagnosticsRecord& last = r.records.back();
        const double ledger = r.final_state.clipped_mass;
        for (const auto& [m0, m1] : {std::pair{first.mass1, last.mass1}, std::pair{first.mass2, last.mass2}}) {
            const double excess = std::abs(m1 - m0) - ledger;
            worst = std::max(worst, excess / m0);
            pass = pass && std::abs(m1 - m0) <= mass_rel_tol * m0 + ledger;
        }
    }
    return {pass, fmt("worst relative drift beyond the clip ledger %.2e (<= %.0e), T = 1, 1d and 2d", worst,
                      mass_rel_tol)};
}

Outcome audit_refinement(const RefinementReport& r) {
    bool decreasing = true;
    std::string series;
    for (std::size_t k = 0; k < r.rows.size(); ++k) {
        series += fmt("%s%.2e", k ? ", " : "", std::abs(r.rows[k].audit_residual));
        if (k > 0 && !(std::abs(r.rows[k].audit_residual) < std::abs(r.rows[k - 1].audit_residual))) decreasing = false;
    }
    const double order = r.fit_audit_residual ? r.fit_audit_residual->slope : std::nan("");
    const double finest = std::abs(r.rows.back().audit_residual);
    const bool pass = decreasing && order >= min_order && finest <= max_final_residual;
    return {pass, fmt("|residual| %s; decreasing %s, order %.3f (>= %.1f), N=512 %.2e (<= %.0e)", series.c_str(),
                      decreasing ? "yes" : "no", order, min_order, finest, max_final_residual)};
}

bool strictly_decreasing_in_nu(const std::vector<SweepRow>& rows, double SweepRow::*field) {
    // Rows are sorted by decreasing nu, so the distances must shrink along the rows.
    for (std::size_t k = 1; k < rows.size(); ++k) {
        if (!(rows[k].*field < rows[k - 1].*field)) return false;
    }
    return true;
}

Outcome viscosity_rate(Suite& suite) {
    const ConvergenceTable& t = *suite.sweep;
    const double slope = t.fit_m_minus_n ? t.fit_m_minus_n->slope : std::nan("");
    const bool n_dec = strictly_decreasing_in_nu(t.rows, &SweepRow::l2_n_minus_n0);
    const bool g_dec = strictly_decreasing_in_nu(t.rows, &SweepRow::l2_gradm_minus_gradn0);
    const bool pass = slope >= rate_low && slope <= rate_high && n_dec && g_dec && suite.sweep_time < sweep_seconds;
    return {pass, fmt("slope of |m - n| vs nu %.3f (required in [%.2f, %.2f]); |n - n0| decreasing %s; |grad m - grad n0| "
                      "decreasing %s; sweep %.1f s (< %.0f s)",
                      slope, rate_low, rate_high, n_dec ? "yes" : "no", g_dec ? "yes" : "no", suite.sweep_time,
                      sweep_seconds)};
}

const SweepRow& largest_nu(const ConvergenceTable& t) { return t.rows.front(); }

Outcome uniform_dissipation(Suite& suite) {
    const ConvergenceTable& t = *suite.sweep;
    const SweepRow& base = largest_nu(t);
    double kin = 0.0;
    double dis = 0.0;
    for (const SweepRow& r : t.rows) {
        kin = std::max(kin, r.kinetic_integral);
        dis = std::max(dis, r.dissipation_integral);
    }
    const bool pass = kin <= dissipation_factor * base.kinetic_integral &&
                      dis <= dissipation_factor * base.dissipation_integral;
    return {pass, fmt("max kinetic integral %.4g vs %.4g at nu=0.1; max dissipation integral %.4g vs %.4g at nu=0.1; "
                      "factor %.0f",
                      kin, base.kinetic_integral, dis, base.dissipation_integral, dissipation_factor)};
}

Outcome uniform_gradient(Suite& suite) {
    const ConvergenceTable& t = *suite.sweep;
    const SweepRow& base = largest_nu(t);
    double worst = 0.0;
    for (const SweepRow& r : t.rows) worst = std::max(worst, r.sqrt_nu_gradm_sup);
    const bool pass = worst <= gradient_factor * base.sqrt_nu_gradm_sup;
    return {pass, fmt("max sqrt(nu)|grad m| %.4g vs %.4g at nu=0.1; factor %.0f", worst, base.sqrt_nu_gradm_sup,
                      gradient_factor)};
}

Outcome second_moment_bound(const Suite& suite) {
    std::size_t bad = 0;
    std::string first_bad;
    for (const auto& [label, ok] : suite.moment_checks) {
        if (!ok) {
            if (!bad) first_bad = label;
            ++bad;
        }
    }
    return {bad == 0, fmt("%zu runs checked at every step, %zu violations%s%s", suite.moment_checks.size(), bad,
                          bad ? "; first: " : "", first_bad.c_str())};
}

Outcome segregation(Suite& suite) {
    const SimConfig cfg = load("segregated_1d.cfg");
    const std::optional<RefinementReport> r = refine(suite, cfg, segregation_cells, "segregation");
    bool decreasing = true;
    std::string series;
    for (std::size_t k = 0; k < r->rows.size(); ++k) {
        series += fmt("%s%.3e", k ? ", " : "", r->rows[k].overlap);
        if (k > 0 && !(r->rows[k].overlap < r->rows[k - 1].overlap)) decreasing = false;
    }
    const double order = r->fit_overlap ? r->fit_overlap->slope : std::nan("");
    return {decreasing && order >= min_order,
            fmt("overlap at T %s; decreasing %s, order %.3f (>= %.1f)", series.c_str(), decreasing ? "yes" : "no",
                order, min_order)};
}

Outcome self_convergence(Suite& suite) {
    const SimConfig cfg = load("pme_1d.cfg");
    const std::optional<RefinementReport> r = refine(suite, cfg, refine_cells, "porous_medium");
    std::string series;
    for (const RefinementRow& row : r->rows) {
        if (row.self_error) series += fmt("%s%.3e", series.empty() ? "" : ", ", *row.self_error);
    }
    const double order = r->fit_self_error ? r->fit_self_error->slope : std::nan("");
    return {order >= min_order, fmt("self errors %s; order %.3f (>= %.1f)", series.c_str(), order, min_order)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism(Suite& suite) {
    const std::string cfg = std::string(XDIFF_SOURCE_DIR) + "/configs/smooth_1d.cfg";
    std::vector<std::string> csv;
    for (const char* name : {"determinism_a", "determinism_b"}) {
        const fs::path out = suite.work / name;
        fs::remove_all(out);
        const std::string cmd =
            std::string("\"") + XDIFF_CLI_PATH + "\" run \"" + cfg + "\" --out \"" + out.string() + "\" > /dev/null";
        if (std::system(cmd.c_str()) != 0) return {false, "cli run failed"};
        csv.push_back(slurp(out / "diagnostics.csv"));
    }
    const bool same = !csv[0].empty() && csv[0] == csv[1];
    return {same, fmt("two cli runs, diagnostics.csv %zu bytes, %s", csv[0].size(),
                      same ? "byte-identical" : "different")};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance suite"};
    std::string work = "acceptance_work";
    std::vector<int> known;
    app.add_option("work", work, "scratch directory for run outputs");
    app.add_option("--known-failures", known, "criteria whose failure does not affect the exit status")
        ->delimiter(',');
    CLI11_PARSE(app, argc, argv);
    const std::set<int> known_set(known.begin(), known.end());

    Suite suite;
    suite.work = work;
    fs::create_directories(suite.work);

    // Shared runs: the default refinements (criteria 2, 4, 5) and the sweep (6, 7, 8).
    const auto prepare = [&]() {
        suite.brinkman_refine = refine(suite, load("smooth_1d.cfg"), refine_cells, "brinkman_refine");
        suite.darcy_refine = refine(suite, load("darcy_1d.cfg"), refine_cells, "darcy_refine");
        const auto start = std::chrono::steady_clock::now();
        suite.sweep = run_sweep(load("smooth_1d.cfg"), sweep_nus, suite.work / "sweep");
        suite.sweep_time = seconds_since(start);
        suite.note("sweep reference", suite.sweep->reference.moment_ok);
        for (const SweepRow& r : suite.sweep->rows) suite.note(fmt("sweep nu=%g", r.nu), r.moment_ok);
    };

    std::string setup_error;
    try {
        prepare();
    } catch (const std::exception& e) {
        setup_error = e.what();
    }

    const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
        {1, [] { return solver_exactness(); }},
        {2, [&] { return max_principle(suite); }},
        {3, [&] { return conservation(suite); }},
        {4, [&] { return audit_refinement(*suite.brinkman_refine); }},
        {5, [&] { return audit_refinement(*suite.darcy_refine); }},
        {6, [&] { return viscosity_rate(suite); }},
        {7, [&] { return uniform_dissipation(suite); }},
        {8, [&] { return uniform_gradient(suite); }},
        {10, [&] { return segregation(suite); }},
        {11, [&] { return self_convergence(suite); }},
        {12, [&] { return determinism(suite); }},
        // Criterion 9 reads the envelope verdicts of every run above.
        {9, [&] { return second_moment_bound(suite); }},
    };

    std::vector<std::pair<int, Outcome>> results;
    for (const auto& [id, check] : criteria) {
        Outcome o;
        const bool needs_setup = id != 1 && id != 3 && id != 10 && id != 11 && id != 12;
        if (needs_setup && !setup_error.empty()) {
            o = {false, "shared runs failed: " + setup_error};
        } else {
            try {
                o = check();
            } catch (const std::exception& e) {
                o = {false, std::string("exception: ") + e.what()};
            }
        }
        results.emplace_back(id, o);
    }
    std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    int unexpected = 0;
    int failed = 0;
    for (const auto& [id, o] : results) {
        const bool is_known = known_set.count(id) > 0;
        std::printf("criterion %2d: %s%s  %s\n", id, o.pass ? "PASS" : "FAIL", !o.pass && is_known ? " (known)" : "",
                    o.detail.c_str());
        if (!o.pass) {
            ++failed;
            if (!is_known) ++unexpected;
        }
    }
    std::printf("%d of %zu criteria passed; %d unexpected failures\n", static_cast<int>(results.size()) - failed,
                results.size(), unexpected);
    return unexpected == 0 ? 0 : 1;
}
