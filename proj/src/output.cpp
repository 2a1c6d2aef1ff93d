#include "xdiff/output.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <vector>

#include "xdiff/error.hpp"

namespace xdiff {

namespace fs = std::filesystem;

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string diagnostics_header() {
    std::string h;
    for (std::string_view c : diagnostics_columns) {
        if (!h.empty()) h += ',';
        h += c;
    }
    return h + '\n';
}

std::string diagnostics_row(const DiagnosticsRecord& r) {
    const double values[] = {r.t,       r.mass1,           r.mass2,
                             r.mass_total, r.linf_total,   r.second_moment,
                             r.entropy, r.dissipation_rate, r.dissipation_kinetic,
                             r.sqrt_nu_grad_m_l2, r.overlap, r.clipped_mass_cum};
    static_assert(std::size(values) == diagnostics_columns.size());
    std::string row;
    for (double v : values) {
        if (!row.empty()) row += ',';
        row += format_value(v);
    }
    return row + '\n';
}

DiagnosticsCsv::DiagnosticsCsv(const fs::path& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw RuntimeFailure("cannot open '" + path.string() + "' for writing");
    out_ << diagnostics_header();
}

void DiagnosticsCsv::write(const DiagnosticsRecord& r) {
    out_ << diagnostics_row(r);
    if (!out_) throw RuntimeFailure("write to '" + path_.string() + "' failed");
}

void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw RuntimeFailure("cannot create directory '" + dir.string() + "': " + ec.message());
}

void write_text(const fs::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw RuntimeFailure("cannot write '" + path.string() + "'");
}

void write_json(const fs::path& path, const nlohmann::json& value) { write_text(path, value.dump(2) + "\n"); }

namespace {

std::string step_tag(std::size_t step) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%08zu", step);
    return buf;
}

void write_le_float64(const fs::path& path, const ScalarField& f) {
    std::vector<unsigned char> bytes(f.size() * 8);
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto bits = std::bit_cast<std::uint64_t>(f[i]);
        if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
        std::memcpy(bytes.data() + 8 * i, &bits, 8);
    }
    write_text(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

}  // namespace

void write_snapshot(const fs::path& dir, std::size_t step, const State& state) {
    const Grid& g = state.n1.grid();
    const std::string stem = "snapshot_" + step_tag(step);
    if (g.dimension() == 1) {
        std::string text = "x,n1,n2,m\n";
        for (std::size_t i = 0; i < g.cell_count(); ++i) {
            text += format_value(g.center(i)) + ',' + format_value(state.n1[i]) + ',' + format_value(state.n2[i]) +
                    ',' + format_value(state.m[i]) + '\n';
        }
        write_text(dir / (stem + ".csv"), text);
        return;
    }
    nlohmann::json fields = nlohmann::json::array();
    const std::pair<const char*, const ScalarField*> named[] = {{"n1", &state.n1}, {"n2", &state.n2}, {"m", &state.m}};
    for (const auto& [name, field] : named) {
        const std::string file = stem + "_" + name + ".bin";
        write_le_float64(dir / file, *field);
        fields.push_back({{"name", name}, {"file", file}});
    }
    nlohmann::json sidecar = {
        {"grid",
         {{"dimension", g.dimension()},
          {"half_length", g.half_length()},
          {"cells_per_axis", g.cells_per_axis()},
          {"boundary", std::string(to_string(g.boundary()))}}},
        {"step", step},
        {"time", state.t},
        {"fields", fields},
        {"dtype", "float64"},
        {"byte_order", "little-endian"},
        {"layout", "row-major, x fastest"},
    };
    write_json(dir / (stem + ".json"), sidecar);
}

}  // namespace xdiff
