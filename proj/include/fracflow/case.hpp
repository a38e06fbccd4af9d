#pragma once

#include "fracflow/netgen.hpp"
#include "fracflow/sim.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fracflow {

struct RockConfig {
    double porosity = 0.2;
    double permeability = 10.0 * units::milli_darcy; ///< geometric mean for log-normal fields
    double log_sigma = 0.0;          ///< std of ln k; 0 gives a homogeneous field
    double correlation_cells = 4.0;  ///< smoothing radius in cells
    std::uint64_t seed = 1;
    std::filesystem::path perm_file; ///< per-cell values in mD, x-fastest
};

struct FractureConfig {
    std::filesystem::path file;
    std::optional<NetworkGeneratorParams> generator;
    int target_cells = 0; ///< > 0: rescale generated traces to this per-layer count
    double porosity = 0.5;
};

/// Column location; negative indices count from the far end (-1 = last).
struct WellConfig {
    std::string name;
    WellKind kind = WellKind::injector;
    WellControl control = WellControl::rate;
    double rate = 0.0;          ///< m^3/s; overrides rate_pv when > 0
    double rate_pv = 0.0;       ///< pore volumes injected over rate_pv_period
    double rate_pv_period = 0.0; ///< 0 means the schedule total time
    double bhp = 100.0 * units::bar;
    int i = 0;
    int j = 0;
    int k_top = 0;
    int k_bottom = -1;
    double radius = 0.1;
};

struct CaseConfig {
    std::string name;
    std::filesystem::path base_dir;

    Dims dims{1, 1, 1};
    Vec3 extent{1.0, 1.0, 1.0};
    RockConfig rock;
    FractureConfig fractures;
    FluidModel fluid;
    std::vector<WellConfig> wells;
    Schedule schedule;
    double initial_pressure = 100.0 * units::bar;
    double initial_saturation = 0.0;
    SolverConfig solver;
};

/// Parses the sectioned `key = value unit` format. Errors name the
/// offending `section.key` (or `file:line` for syntax errors).
CaseConfig parse_case(std::istream& in, const std::string& source,
                      const std::filesystem::path& base_dir);
CaseConfig load_case(const std::filesystem::path& path);

/// Resolves the config into a ready model: grid, rock field, embedded
/// fractures, Peaceman wells and the initial state.
SimulationCase build_case(const CaseConfig& config);

/// Log-normal field: smoothed white noise rescaled to unit variance, then
/// k = k_geo * exp(sigma * z). Generated on the (nx, ny) plane and repeated
/// over layers.
std::vector<double> lognormal_permeability(const Dims& dims, double geometric_mean,
                                           double log_sigma, double correlation_cells,
                                           std::uint64_t seed);

/// Locates packaged cases: an existing path as given, else
/// `<data dir>/<name>.case`.
std::filesystem::path resolve_case_path(const std::string& name_or_path);

} // namespace fracflow
