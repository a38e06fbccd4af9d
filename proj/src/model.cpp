#include "fracflow/model.hpp"

#include "fracflow/errors.hpp"

#include <numeric>

namespace fracflow {

double ReservoirModel::total_pore_volume() const noexcept
{
    return std::accumulate(pore_volume.begin(), pore_volume.end(), 0.0);
}

ReservoirModel build_model(StructuredGrid grid, RockModel rock, EDFMTopology topology,
                           FluidModel fluid, std::vector<WellSpec> wells)
{
    rock.validate(grid);
    fluid.validate();
    if (topology.num_matrix != grid.num_cells())
        throw InvalidGeometry("fracture topology was embedded in a different grid");

    ReservoirModel model{std::move(grid), std::move(rock), std::move(topology), fluid,
                         std::move(wells), {}, {}};
    const int nm = model.grid.num_cells();
    model.pore_volume.resize(static_cast<std::size_t>(model.topology.num_unknowns()));
    for (int c = 0; c < nm; ++c)
        model.pore_volume[c] = model.grid.cell_volume(c) * model.rock.porosity[c];
    for (int f = 0; f < model.topology.num_fracture(); ++f)
        model.pore_volume[nm + f] = model.topology.fracture_cells[f].pore_volume;

    const auto faces = model.grid.internal_faces();
    model.connections.reserve(faces.size() + model.topology.matrix_fracture.size() +
                              model.topology.fracture_fracture.size());
    for (const auto& face : faces)
        model.connections.push_back({face.cell_a, face.cell_b,
                                     tpfa_face_transmissibility(model.grid, model.rock, face),
                                     ConnectionKind::matrix_matrix});
    for (const auto& c : model.topology.matrix_fracture)
        model.connections.push_back({c.a, c.b, c.trans, ConnectionKind::matrix_fracture});
    for (const auto& c : model.topology.fracture_fracture)
        model.connections.push_back({c.a, c.b, c.trans, ConnectionKind::fracture_fracture});

    for (const auto& w : model.wells)
        w.validate(model.num_cells());
    return model;
}

} // namespace fracflow
