#pragma once

#include "fracflow/edfm.hpp"
#include "fracflow/mesh.hpp"
#include "fracflow/physics.hpp"

#include <cstdint>
#include <vector>

namespace fracflow {

enum class ConnectionKind : std::uint8_t { matrix_matrix, matrix_fracture, fracture_fracture };

/// Two-point connection between unknowns a and b; positive flux runs a -> b.
struct Connection {
    int a;
    int b;
    double trans;
    ConnectionKind kind;
};

/// Everything the flow and transport residuals need: unknown layout, pore
/// volumes, the connection list (matrix faces, then matrix-fracture, then
/// fracture-fracture) and wells.
struct ReservoirModel {
    StructuredGrid grid;
    RockModel rock;
    EDFMTopology topology;
    FluidModel fluid;
    std::vector<WellSpec> wells;

    std::vector<double> pore_volume;
    std::vector<Connection> connections;

    int num_cells() const noexcept { return static_cast<int>(pore_volume.size()); }
    int num_matrix() const noexcept { return topology.num_matrix; }
    double total_pore_volume() const noexcept;
};

ReservoirModel build_model(StructuredGrid grid, RockModel rock, EDFMTopology topology,
                           FluidModel fluid, std::vector<WellSpec> wells);

} // namespace fracflow
