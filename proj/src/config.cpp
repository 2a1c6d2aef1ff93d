#include "xdiff/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "xdiff/error.hpp"

namespace xdiff {

std::string_view to_string(InitialPreset p) {
    switch (p) {
        case InitialPreset::constant: return "constant";
        case InitialPreset::gauss_bump: return "gauss-bump";
        case InitialPreset::segregated_blocks: return "segregated-blocks";
    }
    return "?";
}

InitialPreset parse_initial_preset(std::string_view text) {
    if (text == "constant") return InitialPreset::constant;
    if (text == "gauss-bump") return InitialPreset::gauss_bump;
    if (text == "segregated-blocks") return InitialPreset::segregated_blocks;
    throw ConfigError("unknown initial preset '" + std::string(text) +
                      "' (expected constant|gauss-bump|segregated-blocks)");
}

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(std::string_view text) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || end != text.data() + text.size()) throw ConfigError("not a number: '" + std::string(text) + "'");
    if (!std::isfinite(v)) throw ConfigError("not finite: '" + std::string(text) + "'");
    return v;
}

std::size_t parse_count(std::string_view text) {
    unsigned long long v = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || end != text.data() + text.size()) {
        throw ConfigError("not a nonnegative integer: '" + std::string(text) + "'");
    }
    return static_cast<std::size_t>(v);
}

struct Key {
    std::string section;
    std::string name;
    bool required = false;
    std::function<void(SimConfig&, std::string_view)> set;
    std::function<std::string(const SimConfig&)> get;

    std::string path() const { return section + "." + name; }
};

Key real(std::string section, std::string name, double SimConfig::*member, bool required = false) {
    return {std::move(section), std::move(name), required,
            [member](SimConfig& c, std::string_view v) { c.*member = parse_double(v); },
            [member](const SimConfig& c) { return format_double(c.*member); }};
}

template <class Get>
Key real_ref(std::string section, std::string name, Get ref) {
    return {std::move(section), std::move(name), false,
            [ref](SimConfig& c, std::string_view v) { ref(c) = parse_double(v); },
            [ref](const SimConfig& c) { return format_double(ref(c)); }};
}

template <class Get>
Key count_ref(std::string section, std::string name, Get ref, bool required = false) {
    return {std::move(section), std::move(name), required,
            [ref](SimConfig& c, std::string_view v) { ref(c) = parse_count(v); },
            [ref](const SimConfig& c) { return std::to_string(ref(c)); }};
}

const std::vector<Key>& registry() {
    static const std::vector<Key> keys = [] {
        std::vector<Key> k;
        k.push_back({"grid", "dimension", true,
                     [](SimConfig& c, std::string_view v) {
                         const std::size_t d = parse_count(v);
                         if (d != 1 && d != 2) throw ConfigError("must be 1 or 2");
                         c.dimension = static_cast<int>(d);
                     },
                     [](const SimConfig& c) { return std::to_string(c.dimension); }});
        k.push_back(real("grid", "half_length", &SimConfig::half_length, true));
        k.push_back(count_ref("grid", "cells_per_axis", [](auto& c) -> auto& { return c.cells_per_axis; }, true));
        k.push_back({"grid", "boundary", false,
                     [](SimConfig& c, std::string_view v) { c.boundary = parse_boundary(v); },
                     [](const SimConfig& c) { return std::string(to_string(c.boundary)); }});

        k.push_back(real("time", "t_final", &SimConfig::t_final, true));
        k.push_back(real_ref("time", "cfl_safety", [](auto& c) -> auto& { return c.stepper.cfl_safety; }));
        k.push_back(count_ref("time", "record_every", [](auto& c) -> auto& { return c.record_every; }));
        k.push_back(real("time", "sample_interval", &SimConfig::sample_interval));
        k.push_back(real_ref("time", "bound_tolerance", [](auto& c) -> auto& { return c.stepper.bound_tolerance; }));

        k.push_back({"model", "mode", false,
                     [](SimConfig& c, std::string_view v) { c.stepper.mode = parse_mode(v); },
                     [](const SimConfig& c) { return std::string(to_string(c.stepper.mode)); }});
        k.push_back(real_ref("model", "nu", [](auto& c) -> auto& { return c.stepper.nu; }));
        k.push_back({"model", "tensor", false,
                     [](SimConfig& c, std::string_view v) {
                         c.tensor = parse_tensor_preset(v);
                         if (c.tensor == TensorPreset::cellwise) throw ConfigError("cellwise tensors cannot be configured");
                     },
                     [](const SimConfig& c) { return std::string(to_string(c.tensor)); }});
        k.push_back(real_ref("model", "a1", [](auto& c) -> auto& { return c.tensor_params.a1; }));
        k.push_back(real_ref("model", "a2", [](auto& c) -> auto& { return c.tensor_params.a2; }));
        k.push_back(real_ref("model", "theta", [](auto& c) -> auto& { return c.tensor_params.theta; }));
        k.push_back(real_ref("model", "beta", [](auto& c) -> auto& { return c.tensor_params.beta; }));
        k.push_back(real_ref("model", "eps", [](auto& c) -> auto& { return c.tensor_params.eps; }));
        k.push_back(real_ref("model", "omega", [](auto& c) -> auto& { return c.tensor_params.omega; }));

        k.push_back(real_ref("species1", "nbar", [](auto& c) -> auto& { return c.growth.first.nbar; }));
        k.push_back(real_ref("species1", "slope", [](auto& c) -> auto& { return c.growth.first.slope; }));
        k.push_back(real_ref("species2", "nbar", [](auto& c) -> auto& { return c.growth.second.nbar; }));
        k.push_back(real_ref("species2", "slope", [](auto& c) -> auto& { return c.growth.second.slope; }));

        k.push_back({"initial", "preset", false,
                     [](SimConfig& c, std::string_view v) { c.initial.preset = parse_initial_preset(v); },
                     [](const SimConfig& c) { return std::string(to_string(c.initial.preset)); }});
        for (int s = 0; s < 2; ++s) {
            const std::string i = std::to_string(s + 1);
            k.push_back(real_ref("initial", "value" + i, [s](auto& c) -> auto& { return c.initial.value[s]; }));
            k.push_back(real_ref("initial", "amplitude" + i, [s](auto& c) -> auto& { return c.initial.amplitude[s]; }));
            k.push_back(real_ref("initial", "width" + i, [s](auto& c) -> auto& { return c.initial.width[s]; }));
            k.push_back(real_ref("initial", "height" + i, [s](auto& c) -> auto& { return c.initial.height[s]; }));
        }
        k.push_back(real_ref("initial", "center1_x", [](auto& c) -> auto& { return c.initial.center1[0]; }));
        k.push_back(real_ref("initial", "center1_y", [](auto& c) -> auto& { return c.initial.center1[1]; }));
        k.push_back(real_ref("initial", "center2_x", [](auto& c) -> auto& { return c.initial.center2[0]; }));
        k.push_back(real_ref("initial", "center2_y", [](auto& c) -> auto& { return c.initial.center2[1]; }));
        k.push_back(real_ref("initial", "interface", [](auto& c) -> auto& { return c.initial.interface; }));
        k.push_back(real_ref("initial", "block_width", [](auto& c) -> auto& { return c.initial.block_width; }));

        k.push_back(real_ref("solver", "rel_tolerance", [](auto& c) -> auto& { return c.stepper.solver.rel_tolerance; }));
        k.push_back(count_ref("solver", "max_iterations", [](auto& c) -> auto& { return c.stepper.solver.max_iterations; }));
        k.push_back({"solver", "preconditioner", false,
                     [](SimConfig& c, std::string_view v) { c.stepper.solver.preconditioner = parse_preconditioner(v); },
                     [](const SimConfig& c) { return std::string(to_string(c.stepper.solver.preconditioner)); }});

        k.push_back({"output", "directory", false,
                     [](SimConfig& c, std::string_view v) {
                         if (v.empty()) throw ConfigError("must not be empty");
                         c.output.directory = std::string(v);
                     },
                     [](const SimConfig& c) { return c.output.directory; }});
        k.push_back(count_ref("output", "snapshot_every", [](auto& c) -> auto& { return c.output.snapshot_every; }));

        k.push_back(count_ref("sweep", "reference_refinement", [](auto& c) -> auto& { return c.reference_refinement; }));
        return k;
    }();
    return keys;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config key '" + path + "': " + what);
}

}  // namespace

SimConfig parse_config(std::string_view text) {
    std::map<std::string, const Key*> by_path;
    std::set<std::string> sections;
    for (const Key& k : registry()) {
        by_path[k.path()] = &k;
        sections.insert(k.section);
    }

    SimConfig cfg;
    std::set<std::string> seen;
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (!sections.contains(section)) {
                throw ConfigError("line " + std::to_string(line_no) + ": unknown section '" + section + "'");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string name(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (section.empty()) throw ConfigError("line " + std::to_string(line_no) + ": key '" + name + "' outside a section");
        const std::string path = section + "." + name;
        const auto it = by_path.find(path);
        if (it == by_path.end()) fail(path, "unknown key");
        if (!seen.insert(path).second) fail(path, "duplicate key");
        try {
            it->second->set(cfg, value);
        } catch (const ConfigError& e) {
            fail(path, e.what());
        }
    }
    for (const Key& k : registry()) {
        if (k.required && !seen.contains(k.path())) fail(k.path(), "missing required key");
    }
    validate(cfg);
    return cfg;
}

SimConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize(const SimConfig& cfg) {
    std::string out;
    std::string section;
    for (const Key& k : registry()) {
        if (k.section != section) {
            if (!section.empty()) out += '\n';
            section = k.section;
            out += "[" + section + "]\n";
        }
        out += k.name + " = " + k.get(cfg) + "\n";
    }
    return out;
}

void validate(const SimConfig& c) {
    if (c.dimension != 1 && c.dimension != 2) fail("grid.dimension", "must be 1 or 2");
    if (!(c.half_length > 0.0)) fail("grid.half_length", "must be positive");
    if (c.cells_per_axis < 2) fail("grid.cells_per_axis", "must be at least 2");
    if (!(c.t_final >= 0.0)) fail("time.t_final", "must be nonnegative");
    if (!(c.stepper.cfl_safety > 0.0 && c.stepper.cfl_safety <= 1.0)) fail("time.cfl_safety", "must lie in (0, 1]");
    if (c.record_every < 1) fail("time.record_every", "must be at least 1");
    if (!(c.sample_interval > 0.0)) fail("time.sample_interval", "must be positive");
    if (!(c.stepper.bound_tolerance >= 0.0)) fail("time.bound_tolerance", "must be nonnegative");
    if (!(c.stepper.nu >= 0.0)) fail("model.nu", "must be nonnegative");
    if (c.stepper.mode == Mode::brinkman && !(c.stepper.nu > 0.0)) fail("model.nu", "brinkman mode needs nu > 0");
    if (!(c.tensor_params.a1 > 0.0)) fail("model.a1", "must be positive");
    if (!(c.tensor_params.a2 > 0.0)) fail("model.a2", "must be positive");
    if (!(std::abs(c.tensor_params.eps) < 1.0)) fail("model.eps", "must satisfy |eps| < 1");

    const GrowthLaw* laws[2] = {&c.growth.first, &c.growth.second};
    for (int s = 0; s < 2; ++s) {
        const std::string sec = "species" + std::to_string(s + 1);
        if (!(laws[s]->nbar > 0.0)) fail(sec + ".nbar", "must be positive");
        if (!(laws[s]->slope >= 0.0)) fail(sec + ".slope", "must be nonnegative");
    }

    const InitialConfig& in = c.initial;
    for (int s = 0; s < 2; ++s) {
        const std::string i = std::to_string(s + 1);
        const double nbar = laws[s]->nbar;
        const auto bounded = [&](const std::string& key, double v) {
            if (!(v >= 0.0 && v <= nbar)) fail("initial." + key + i, "must lie in [0, species" + i + ".nbar]");
        };
        switch (in.preset) {
            case InitialPreset::constant: bounded("value", in.value[s]); break;
            case InitialPreset::gauss_bump:
                bounded("amplitude", in.amplitude[s]);
                if (!(in.width[s] > 0.0)) fail("initial.width" + i, "must be positive");
                break;
            case InitialPreset::segregated_blocks: bounded("height", in.height[s]); break;
        }
    }
    if (in.preset == InitialPreset::segregated_blocks && !(in.block_width > 0.0)) {
        fail("initial.block_width", "must be positive");
    }

    try {
        validate(c.stepper.solver);
    } catch (const ConfigError& e) {
        fail("solver.rel_tolerance", e.what());
    }
    if (c.output.directory.empty()) fail("output.directory", "must not be empty");
    if (c.reference_refinement < 1) fail("sweep.reference_refinement", "must be at least 1");
}

std::string config_digest(const SimConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char ch : serialize(cfg)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Grid make_grid(const SimConfig& cfg) {
    return build_grid(cfg.dimension, cfg.half_length, cfg.cells_per_axis, cfg.boundary);
}

TensorField make_tensor(const SimConfig& cfg, const Grid& grid) {
    return TensorField::make(grid, cfg.tensor, cfg.tensor_params);
}

InitialDensities make_initial(const SimConfig& cfg, const Grid& grid) {
    InitialDensities out{ScalarField(grid), ScalarField(grid)};
    const InitialConfig& in = cfg.initial;
    const std::array<double, 2>* centers[2] = {&in.center1, &in.center2};
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        const auto x = grid.cell_center(c);
        for (int s = 0; s < 2; ++s) {
            double v = 0.0;
            switch (in.preset) {
                case InitialPreset::constant: v = in.value[s]; break;
                case InitialPreset::gauss_bump: {
                    double r2 = 0.0;
                    for (int a = 0; a < grid.dimension(); ++a) {
                        const double dx = x[a] - (*centers[s])[a];
                        r2 += dx * dx;
                    }
                    v = in.amplitude[s] * std::exp(-r2 / (2.0 * in.width[s] * in.width[s]));
                    break;
                }
                case InitialPreset::segregated_blocks: {
                    const bool inside = s == 0 ? (x[0] >= in.interface - in.block_width && x[0] < in.interface)
                                               : (x[0] >= in.interface && x[0] < in.interface + in.block_width);
                    v = inside ? in.height[s] : 0.0;
                    break;
                }
            }
            (s == 0 ? out.n1 : out.n2)[c] = v;
        }
    }
    const double top = (out.n1 + out.n2).max();
    if (top > cfg.growth.nbar()) {
        throw ConfigError("config key 'initial.preset': total initial density " + format_double(top) +
                          " exceeds max(species1.nbar, species2.nbar)");
    }
    return out;
}

}  // namespace xdiff
