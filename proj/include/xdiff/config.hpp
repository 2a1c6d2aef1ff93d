#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "xdiff/brinkman.hpp"
#include "xdiff/evolution.hpp"
#include "xdiff/grid.hpp"
#include "xdiff/tensor.hpp"

namespace xdiff {

enum class InitialPreset { constant, gauss_bump, segregated_blocks };
std::string_view to_string(InitialPreset p);
InitialPreset parse_initial_preset(std::string_view text);  // throws ConfigError

/// Initial densities.
///
/// constant           n_i = value_i everywhere
/// gauss-bump         n_i = amplitude_i exp(-|x - center_i|^2 / (2 width_i^2))
/// segregated-blocks  n1 = height1 on interface - block_width <= x < interface,
///                    n2 = height2 on interface <= x < interface + block_width,
///                    constant in y for d = 2
struct InitialConfig {
    InitialPreset preset = InitialPreset::gauss_bump;
    std::array<double, 2> value{0.5, 0.5};
    std::array<double, 2> amplitude{0.35, 0.35};
    std::array<double, 2> width{0.8, 0.8};
    std::array<double, 2> center1{-0.5, 0.0};
    std::array<double, 2> center2{0.5, 0.0};
    double interface = 0.0;
    double block_width = 1.0;
    std::array<double, 2> height{0.8, 0.4};

    bool operator==(const InitialConfig&) const = default;
};

struct OutputConfig {
    std::string directory = "out";
    /// Snapshot cadence in steps; 0 disables snapshots.
    std::size_t snapshot_every = 0;

    bool operator==(const OutputConfig&) const = default;
};

struct SimConfig {
    // [grid]
    int dimension = 1;
    double half_length = 2.0;
    std::size_t cells_per_axis = 256;
    Boundary boundary = Boundary::noflux;
    // [time]
    double t_final = 1.0;
    /// Diagnostics CSV cadence in steps.
    std::size_t record_every = 1;
    /// Common sample spacing for sweep distances.
    double sample_interval = 0.01;
    // [model] and [solver]; cfl_safety and bound_tolerance are read from [time].
    StepperConfig stepper;
    TensorPreset tensor = TensorPreset::identity;
    TensorParams tensor_params;
    // [species1], [species2]
    GrowthLaws growth{{1.0, 0.5}, {1.0, 0.5}};
    // [initial]
    InitialConfig initial;
    // [output]
    OutputConfig output;
    // [sweep]
    /// Darcy reference grid refinement factor for sweeps; 1 uses the same grid.
    std::size_t reference_refinement = 1;

    bool operator==(const SimConfig&) const = default;
};

/// Parses the sectioned key = value format ('#' comments, "[section]" headers).
/// Unknown sections or keys, missing required keys, malformed or out-of-range
/// values throw ConfigError naming the key path (section.key).
/// Required: grid.dimension, grid.half_length, grid.cells_per_axis, time.t_final.
SimConfig parse_config(std::string_view text);
SimConfig load_config(const std::string& path);

/// Canonical text form; every key is written, doubles with 17 significant
/// digits, so parse_config(serialize(c)) == c.
std::string serialize(const SimConfig& cfg);

/// Cross-field checks; throws ConfigError naming the offending key.
void validate(const SimConfig& cfg);

/// FNV-1a 64 of the canonical text, as 16 hex digits.
std::string config_digest(const SimConfig& cfg);

Grid make_grid(const SimConfig& cfg);
TensorField make_tensor(const SimConfig& cfg, const Grid& grid);

struct InitialDensities {
    ScalarField n1;
    ScalarField n2;
};

/// Samples the initial preset on the grid. Throws ConfigError if the total
/// exceeds max(nbar1, nbar2).
InitialDensities make_initial(const SimConfig& cfg, const Grid& grid);

}  // namespace xdiff
