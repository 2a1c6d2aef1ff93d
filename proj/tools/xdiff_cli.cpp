// Command-line front end: validate, run, sweep and refine.
// Exit codes: 0 success, 1 invalid configuration or arguments, 2 runtime failure.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xdiff/config.hpp"
#include "xdiff/error.hpp"
#include "xdiff/experiment.hpp"
#include "xdiff/tensor.hpp"

namespace {

using namespace xdiff;

constexpr int exit_ok = 0;
constexpr int exit_invalid = 1;
constexpr int exit_runtime = 2;

SimConfig load(const std::string& path, const std::optional<std::string>& out) {
    SimConfig cfg = load_config(path);
    if (out) cfg.output.directory = *out;
    return cfg;
}

int cmd_validate(const SimConfig& cfg) {
    const Grid grid = make_grid(cfg);
    const TensorField tensor = make_tensor(cfg, grid);
    std::vector<double> times;
    constexpr int samples = 10;
    for (int k = 0; k <= samples; ++k) times.push_back(cfg.t_final * k / samples);
    const ValidationReport report = validate_tensor(tensor, times);
    make_initial(cfg, grid);
    std::printf("tensor: max asymmetry %.3e, min eigenvalue %.6g, sup norm %.6g, floor %.6g\n", report.max_asymmetry,
                report.min_eigenvalue, report.sup_norm, report.ellipticity_floor);
    if (!report.passed) {
        std::fprintf(stderr, "invalid tensor: %s\n", report.message.c_str());
        return exit_invalid;
    }
    std::printf("config ok (digest %s)\n", config_digest(cfg).c_str());
    return exit_ok;
}

int cmd_run(const SimConfig& cfg) {
    const RunReport r = run_single(cfg);
    std::printf("steps %zu, t = %.6g\n", r.steps, r.final_state.t);
    std::printf("entropy audit residual %.6e\n", r.audit.residual);
    std::printf("max total density %.12g (bound %.12g)%s\n", r.max_linf, r.linf_bound,
                r.bound_ok ? "" : "  VIOLATED");
    std::printf("clipped mass %.6e%s\n", r.final_state.clipped_mass,
                r.final_state.clip_warning ? "  (a single step clipped more than 1e-6 of the mass)" : "");
    std::printf("output in %s\n", cfg.output.directory.c_str());
    return exit_ok;
}

void print_fit(const char* name, const std::optional<RateFit>& f) {
    if (f) {
        std::printf("%-24s slope %.4f  (95%% CI [%.4f, %.4f], r^2 %.4f)\n", name, f->slope, f->slope_ci_low,
                    f->slope_ci_high, f->r_squared);
    } else {
        std::printf("%-24s no fit\n", name);
    }
}

int cmd_sweep(const SimConfig& cfg, const std::vector<double>& nus) {
    const ConvergenceTable t = run_sweep(cfg, nus, std::filesystem::path(cfg.output.directory));
    std::printf("%-10s %-14s %-14s %-14s\n", "nu", "l2_m_minus_n", "l2_n_minus_n0", "l2_gradm_gradn0");
    for (const SweepRow& r : t.rows) {
        std::printf("%-10g %-14.6e %-14.6e %-14.6e\n", r.nu, r.l2_m_minus_n, r.l2_n_minus_n0, r.l2_gradm_minus_gradn0);
    }
    print_fit("l2_m_minus_n", t.fit_m_minus_n);
    print_fit("l2_n_minus_n0", t.fit_n_minus_n0);
    print_fit("l2_gradm_minus_gradn0", t.fit_gradm_minus_gradn0);
    std::printf("output in %s\n", cfg.output.directory.c_str());
    return exit_ok;
}

int cmd_refine(const SimConfig& cfg, const std::vector<std::size_t>& cells) {
    const RefinementReport rep = run_refinement(cfg, cells, std::filesystem::path(cfg.output.directory));
    std::printf("%-8s %-12s %-14s %-14s %-14s\n", "cells", "dx", "self_error", "audit_resid", "overlap");
    for (const RefinementRow& r : rep.rows) {
        std::printf("%-8zu %-12.6g %-14s %-14.6e %-14.6e\n", r.cells, r.dx,
                    r.self_error ? std::to_string(*r.self_error).c_str() : "-", r.audit_residual, r.overlap);
    }
    print_fit("self_error", rep.fit_self_error);
    print_fit("|audit_residual|", rep.fit_audit_residual);
    print_fit("overlap", rep.fit_overlap);
    std::printf("output in %s\n", cfg.output.directory.c_str());
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-species cross-diffusion simulator and verification harness"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    std::string config_path;
    std::optional<std::string> out;
    std::vector<double> nus;
    std::vector<std::size_t> cells;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output directory (overrides output.directory)");
    };
    CLI::App* validate_cmd = app.add_subcommand("validate", "check the configuration and the tensor field");
    add_common(validate_cmd);
    CLI::App* run_cmd = app.add_subcommand("run", "run one trajectory");
    add_common(run_cmd);
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "viscosity sweep against the darcy reference");
    add_common(sweep_cmd);
    sweep_cmd->add_option("--nu", nus, "comma-separated viscosities")->required()->delimiter(',');
    CLI::App* refine_cmd = app.add_subcommand("refine", "grid refinement study");
    add_common(refine_cmd);
    refine_cmd->add_option("--cells", cells, "comma-separated cells per axis")->required()->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_invalid;
    }

    try {
        const SimConfig cfg = load(config_path, out);
        if (*validate_cmd) return cmd_validate(cfg);
        if (*run_cmd) return cmd_run(cfg);
        if (*sweep_cmd) return cmd_sweep(cfg, nus);
        return cmd_refine(cfg, cells);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return exit_invalid;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime failure: %s\n", e.what());
        return exit_runtime;
    }
}
