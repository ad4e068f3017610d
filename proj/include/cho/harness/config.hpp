#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "cho/control.hpp"
#include "cho/galerkin.hpp"

/// Run configuration: a flat INI-like text
///
///     # comment
///     [section]
///     key = value
///
/// Unknown sections or keys are parse errors. Everything not given takes the
/// default listed in README.md.
namespace cho::harness {

/// Field or space-time data source:
///   constant:V
///   eigen:J,K,AMP
///   bandlimited:AMP,N          sum of the N lowest modes, seeded coefficients in [-AMP, AMP]
///   random_smooth:AMP[,MODES[,TIME_MODES]]   seeded, max |.| = AMP
///   file:PATH                  CHO1 snapshot (first frame for fields, nt+1 frames for controls)
struct Descriptor {
    std::string kind;
    std::vector<double> args;
    std::string path;

    [[nodiscard]] std::string to_string() const;
};

[[nodiscard]] Descriptor parse_descriptor(const std::string& text);

struct RunConfig {
    // [grid]
    int nx = 32;
    int ny = 32;
    double lx = 6.283185307179586;
    double ly = 6.283185307179586;
    // [time]
    double final_time = 1.0;
    int steps = 100;
    // [potential]
    potentials::PotentialSpec potential = potentials::PotentialSpec::regular();
    bool auto_stabilization = true;
    // [initial]
    Descriptor phi0{"constant", {0.0}, {}};
    // [control]
    double M = 1.0;
    double Mprime = 1e6;
    Descriptor control{"constant", {0.0}, {}};
    // [cost]
    std::array<double, 4> alpha{1.0, 0.0, 0.0, 1e-2};
    /// "zero" or "from_control": targets produced by a forward run with target_control
    std::string targets = "zero";
    Descriptor target_control{"constant", {0.0}, {}};
    // [optimizer]
    control::OptimizerConfig optimizer{};
    int vi_probes = 100;
    // [oracle]
    int oracle_modes = 8;
    int oracle_substeps = 10;
    // [verify]
    std::vector<std::string> checks{"all"};
    int fd_directions = 5;
    // [output]
    int snapshot_every = 1;
    // [run]
    std::uint64_t seed = 0;
    bool override_compatibility = false;
    double compatibility_margin = 1e-3;
    std::filesystem::path out = "out";
    /// Directory of the config file; relative file: paths resolve against it.
    std::filesystem::path base_dir = ".";

    [[nodiscard]] Grid grid() const { return Grid(nx, ny, lx, ly); }
    [[nodiscard]] TimeGrid time() const { return TimeGrid(final_time, steps); }

    /// Checks every numeric constraint and, unless overridden, the
    /// compatibility of phi0 with M. Throws ValidationError.
    void validate() const;
};

/// "section.key" = value pairs applied after the file and before validation.
using Overrides = std::vector<std::pair<std::string, std::string>>;

/// Throws ParseError (with line and key) or ValidationError.
[[nodiscard]] RunConfig parse_config(const std::filesystem::path& path, const Overrides& overrides = {});
[[nodiscard]] RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = ".",
                                          const Overrides& overrides = {});

/// Applies `key=value` style overrides ("section.key" = value), as the CLI
/// does for --seed and friends.
void apply_override(RunConfig& config, const std::string& section, const std::string& key, const std::string& value);

/// Realizes the descriptors. Random draws depend only on (seed, salt).
[[nodiscard]] Field make_field(const Descriptor& d, const Grid& grid, std::uint64_t seed, std::uint64_t salt,
                               const std::filesystem::path& base_dir);
[[nodiscard]] FieldSeries make_series(const Descriptor& d, const Grid& grid, const TimeGrid& time,
                                      std::uint64_t seed, std::uint64_t salt, const std::filesystem::path& base_dir);

[[nodiscard]] Field initial_state(const RunConfig& config);
/// Initial control, projected onto U_ad.
[[nodiscard]] FieldSeries initial_control(const RunConfig& config);
[[nodiscard]] control::CostSpec cost_spec(const RunConfig& config);
/// Potential with S filled in when auto_stabilization is set: sup |f''| over
/// [-1.2, 1.2] for the regular potential, over the compatibility interval
/// otherwise.
[[nodiscard]] potentials::PotentialSpec effective_potential(const RunConfig& config);

}  // namespace cho::harness
