#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace fracflow {

using Vec3 = std::array<double, 3>;
using Dims = std::array<int, 3>;

enum class Axis : std::uint8_t { x = 0, y = 1, z = 2 };

struct InternalFace {
    int cell_a;
    int cell_b;
    double area;
    Axis normal;
};

/// Uniform Cartesian grid. Cells are numbered x-fastest:
/// c = i + nx * (j + ny * k).
class StructuredGrid {
public:
    StructuredGrid(Dims dims, Vec3 extent);

    const Dims& dims() const noexcept { return dims_; }
    const Vec3& extent() const noexcept { return extent_; }
    const Vec3& cell_size() const noexcept { return cell_size_; }
    int num_cells() const noexcept { return dims_[0] * dims_[1] * dims_[2]; }

    double cell_volume(int) const noexcept { return cell_size_[0] * cell_size_[1] * cell_size_[2]; }
    Vec3 cell_centroid(int cell) const noexcept;
    std::array<int, 3> ijk(int cell) const noexcept;
    int index(int i, int j, int k) const noexcept { return i + dims_[0] * (j + dims_[1] * k); }

    /// Cell containing the point, clamped to the grid (points on the upper
    /// boundary belong to the last cell).
    int locate(const Vec3& point) const noexcept;

    std::span<const InternalFace> internal_faces() const noexcept { return faces_; }

private:
    Dims dims_;
    Vec3 extent_;
    Vec3 cell_size_;
    std::vector<InternalFace> faces_;
};

/// Per-cell diagonal permeability (m^2) and porosity.
struct RockModel {
    std::vector<Vec3> permeability;
    std::vector<double> porosity;

    static RockModel uniform(const StructuredGrid& grid, double perm, double poro);

    /// Throws InvalidGeometry if sizes mismatch the grid or values are out of range.
    void validate(const StructuredGrid& grid) const;
};

StructuredGrid build_cartesian_grid(Dims dims, Vec3 extent);

/// Two-point transmissibility of an internal face: harmonic combination of
/// the half transmissibilities k_i A / d_i, d_i the centroid-to-face distance.
double tpfa_face_transmissibility(const StructuredGrid& grid, const RockModel& rock,
                                  const InternalFace& face);

double half_transmissibility(double perm, double area, double distance);

} // namespace fracflow
