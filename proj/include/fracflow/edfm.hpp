#pragma once

#include "fracflow/mesh.hpp"

#include <array>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace fracflow {

using Point2 = std::array<double, 2>;

/// Vertical planar fracture given by its trace in the xy-plane and a vertical
/// extent. The default extent spans the full grid height.
struct Fracture {
    Point2 start{};
    Point2 end{};
    double aperture = 0.04;
    double permeability = 0.0;
    double porosity = 0.5;
    double z_bottom = -std::numeric_limits<double>::infinity();
    double z_top = std::numeric_limits<double>::infinity();
};

struct FractureNetwork {
    std::vector<Fracture> fractures;

    bool empty() const noexcept { return fractures.empty(); }
    std::size_t size() const noexcept { return fractures.size(); }
};

/// One fracture patch: the part of one fracture inside one matrix cell.
struct FractureCell {
    int fracture = 0;
    int segment = 0; ///< ordinal of the patch along its fracture trace
    int layer = 0;
    int host = 0;    ///< matrix cell index
    Point2 start{};
    Point2 end{};
    double length = 0.0;
    double height = 0.0;
    double area = 0.0;
    double aperture = 0.0;
    double permeability = 0.0;
    double porosity = 0.0;
    double pore_volume = 0.0;
};

struct CellPair {
    int a;
    int b;
    double trans;
};

/// Fracture unknowns appended after the matrix unknowns.
/// Global index of fracture_cells[i] is num_matrix + i.
struct EDFMTopology {
    int num_matrix = 0;
    std::vector<FractureCell> fracture_cells;
    std::vector<CellPair> matrix_fracture;   ///< a: matrix cell, b: fracture cell (global)
    std::vector<CellPair> fracture_fracture; ///< global indices, in-plane, vertical and intersections
    std::vector<int> matrix_index_set;
    std::vector<int> fracture_index_set;
    std::vector<std::string> warnings;

    int num_fracture() const noexcept { return static_cast<int>(fracture_cells.size()); }
    int num_unknowns() const noexcept { return num_matrix + num_fracture(); }
    double fracture_pore_volume() const noexcept;
};

/// Axis-aligned rectangle (cell footprint in the xy-plane).
struct Rect {
    double x0, y0, x1, y1;
};

/// Average over the rectangle of the distance to the line through `point`
/// with unit normal `normal`. Exact (polygon split by the line).
double average_normal_distance(const Rect& cell, const Point2& point, const Point2& normal);

/// CI = A / d_avg for a vertical fracture plane through `point` with
/// horizontal unit normal `normal`. Zero for a zero-area patch.
double connectivity_index(const Rect& cell, const Point2& point, const Point2& normal,
                          double patch_area);

/// Matrix-fracture transmissibility: CI * k_n harmonically combined with the
/// fracture half transmissibility 2 k_f A / a.
double matrix_fracture_transmissibility(double ci, double matrix_perm_normal,
                                        const FractureCell& frac);

/// TPFA between two patches of the same fracture that share an edge, either
/// along the trace (same layer) or stacked vertically (same segment).
/// Throws InvalidGeometry for non-adjacent patches.
double fracture_internal_transmissibility(const FractureCell& a, const FractureCell& b);

/// Connection at the intersection line of two different fractures crossing at
/// `point`: harmonic combination of k a h / d for both patches, d the average
/// distance of each patch (split into two pieces by the line) to the line.
double fracture_intersection_transmissibility(const FractureCell& a, const FractureCell& b,
                                              const Point2& point);

/// Lowest-order EDFM: one fracture cell per (fracture, matrix cell) pair.
/// Patches shorter than 1e-6 of the cell size are dropped. Fractures outside
/// the grid contribute nothing and leave a warning.
EDFMTopology embed_fracture_network(const StructuredGrid& grid, const RockModel& rock,
                                    const FractureNetwork& network);

/// Text format, one fracture per line:
///   x1 y1 x2 y2 aperture perm_darcy [z1 z2]
/// '#' starts a comment. Records outside the domain are rejected.
FractureNetwork read_fracture_network(std::istream& in, const std::string& source,
                                      const Vec3& domain, double porosity);
FractureNetwork load_fracture_network(const std::string& path, const Vec3& domain,
                                      double porosity);
void write_fracture_network(std::ostream& out, const FractureNetwork& network);

} // namespace fracflow
