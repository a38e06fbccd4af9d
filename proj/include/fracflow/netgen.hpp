#pragma once

#include "fracflow/edfm.hpp"
#include "fracflow/units.hpp"

#include <cstdint>
#include <vector>

namespace fracflow {

/// Orientation family: strike angle (degrees from +x) with a normal spread.
struct FractureSet {
    double mean_angle_deg;
    double spread_deg;
    double weight = 1.0;
};

struct NetworkGeneratorParams {
    std::uint64_t seed = 42;
    int count = 48;
    Point2 domain{1000.0, 1000.0};
    double length_median = 100.0; ///< m, log-normal lengths
    double length_log_sigma = 0.5;
    double length_min = 10.0;
    double length_max = 400.0;
    std::vector<FractureSet> sets{{30.0, 10.0, 1.0}, {120.0, 10.0, 1.0}};
    double aperture = 0.04;
    double permeability = 1000.0 * units::darcy;
    double porosity = 0.5;
};

/// Reproducible stochastic network: uniform centres, log-normal lengths,
/// orientation drawn from the weighted sets, traces clipped to the domain.
FractureNetwork generate_fracture_network(const NetworkGeneratorParams& params);

/// Nudges traces by small offsets so that no fracture patch is shorter than
/// `min_fraction` of the cell size. Returns the number of traces that could
/// not be fixed.
int remove_slivers(FractureNetwork& network, const StructuredGrid& grid, double min_fraction);

/// Scales trace lengths about their centres until the network embeds into
/// `grid` with exactly `target_cells` fracture cells per layer, if reachable,
/// keeping patches above `min_fraction` of the cell size when positive.
/// Returns the embedded per-layer count actually achieved.
int fit_network_to_cell_count(FractureNetwork& network, const StructuredGrid& grid, int target_cells,
                              double min_fraction = 0.05);

} // namespace fracflow
