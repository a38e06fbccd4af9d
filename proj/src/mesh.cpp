#include "fracflow/mesh.hpp"

#include "fracflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fracflow {

StructuredGrid::StructuredGrid(Dims dims, Vec3 extent)
    : dims_(dims), extent_(extent)
{
    for (int d = 0; d < 3; ++d) {
        if (dims[d] < 1)
            throw InvalidGeometry("grid dimension " + std::to_string(d) + " must be >= 1, got " +
                                  std::to_string(dims[d]));
        if (!(extent[d] > 0.0) || !std::isfinite(extent[d]))
            throw InvalidGeometry("grid extent along axis " + std::to_string(d) +
                                  " must be positive");
        cell_size_[d] = extent[d] / dims[d];
    }

    const auto [nx, ny, nz] = dims_;
    const double area_x = cell_size_[1] * cell_size_[2];
    const double area_y = cell_size_[0] * cell_size_[2];
    const double area_z = cell_size_[0] * cell_size_[1];
    faces_.reserve(static_cast<std::size_t>((nx - 1) * ny * nz + nx * (ny - 1) * nz +
                                            nx * ny * (nz - 1)));
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const int c = index(i, j, k);
                if (i + 1 < nx)
                    faces_.push_back({c, index(i + 1, j, k), area_x, Axis::x});
                if (j + 1 < ny)
                    faces_.push_back({c, index(i, j + 1, k), area_y, Axis::y});
                if (k + 1 < nz)
                    faces_.push_back({c, index(i, j, k + 1), area_z, Axis::z});
            }
}

Vec3 StructuredGrid::cell_centroid(int cell) const noexcept
{
    const auto [i, j, k] = ijk(cell);
    return {(i + 0.5) * cell_size_[0], (j + 0.5) * cell_size_[1], (k + 0.5) * cell_size_[2]};
}

std::array<int, 3> StructuredGrid::ijk(int cell) const noexcept
{
    const int i = cell % dims_[0];
    const int j = (cell / dims_[0]) % dims_[1];
    const int k = cell / (dims_[0] * dims_[1]);
    return {i, j, k};
}

int StructuredGrid::locate(const Vec3& point) const noexcept
{
    std::array<int, 3> idx{};
    for (int d = 0; d < 3; ++d)
        idx[d] = std::clamp(static_cast<int>(std::floor(point[d] / cell_size_[d])), 0, dims_[d] - 1);
    return index(idx[0], idx[1], idx[2]);
}

RockModel RockModel::uniform(const StructuredGrid& grid, double perm, double poro)
{
    const auto n = static_cast<std::size_t>(grid.num_cells());
    return {std::vector<Vec3>(n, Vec3{perm, perm, perm}), std::vector<double>(n, poro)};
}

void RockModel::validate(const StructuredGrid& grid) const
{
    const auto n = static_cast<std::size_t>(grid.num_cells());
    if (permeability.size() != n || porosity.size() != n)
        throw InvalidGeometry("rock model size does not match grid cell count");
    for (std::size_t c = 0; c < n; ++c) {
        for (double k : permeability[c])
            if (!(k > 0.0) || !std::isfinite(k))
                throw InvalidGeometry("non-positive permeability in cell " + std::to_string(c));
        if (!(porosity[c] > 0.0 && porosity[c] <= 1.0))
            throw InvalidGeometry("porosity outside (0, 1] in cell " + std::to_string(c));
    }
}

StructuredGrid build_cartesian_grid(Dims dims, Vec3 extent)
{
    return StructuredGrid(dims, extent);
}

double half_transmissibility(double perm, double area, double distance)
{
    return perm * area / distance;
}

double tpfa_face_transmissibility(const StructuredGrid& grid, const RockModel& rock,
                                  const InternalFace& face)
{
    const auto axis = static_cast<std::size_t>(face.normal);
    const double d = 0.5 * grid.cell_size()[axis];
    const double ta = half_transmissibility(rock.permeability[face.cell_a][axis], face.area, d);
    const double tb = half_transmissibility(rock.permeability[face.cell_b][axis], face.area, d);
    return 1.0 / (1.0 / ta + 1.0 / tb);
}

} // namespace fracflow
