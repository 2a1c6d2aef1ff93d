#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "xdiff/diagnostics.hpp"
#include "xdiff/evolution.hpp"

namespace xdiff {

/// Frozen column order of the diagnostics CSV.
inline constexpr std::array<std::string_view, 12> diagnostics_columns{
    "t",       "mass1",           "mass2",               "mass_total",        "linf_total", "second_moment",
    "entropy", "dissipation_rate", "dissipation_kinetic", "sqrt_nu_grad_m_l2", "overlap",    "clipped_mass_cum"};

/// 17 significant digits, enough to round-trip a double.
std::string format_value(double v);

std::string diagnostics_header();
std::string diagnostics_row(const DiagnosticsRecord& r);

/// Streaming diagnostics CSV; the header is written on construction.
class DiagnosticsCsv {
public:
    explicit DiagnosticsCsv(const std::filesystem::path& path);
    void write(const DiagnosticsRecord& r);

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

/// d = 1: snapshot_<step>.csv with columns x, n1, n2, m.
/// d = 2: snapshot_<step>_<field>.bin as little-endian float64, x fastest,
/// plus snapshot_<step>.json describing grid, time, fields and byte order.
void write_snapshot(const std::filesystem::path& dir, std::size_t step, const State& state);

/// IO helpers; failures throw RuntimeFailure naming the path.
void ensure_directory(const std::filesystem::path& dir);
void write_text(const std::filesystem::path& path, std::string_view text);
void write_json(const std::filesystem::path& path, const nlohmann::json& value);

}  // namespace xdiff
