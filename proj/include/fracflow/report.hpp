#pragma once

#include "fracflow/sim.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace fracflow {

inline constexpr std::string_view steps_csv_header =
    "step,dt_days,flow_iters,transport_iters,wasted,cuts,activated,wall_s";

/// Per-step CSV. With `include_timing` false the wall_s column is written as
/// 0 so reruns compare byte for byte.
void write_steps_csv(std::ostream& out, const std::vector<StepReport>& steps,
                     bool include_timing = true);

/// Cumulative series: time, total iterations (incl. wasted), wasted, wall.
void write_cumulative_csv(std::ostream& out, const std::vector<StepReport>& steps,
                          bool include_timing = true);

struct ChartSeries {
    std::string name;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;
    /// Optional per-point markers (e.g. steps where NE was active).
    std::vector<bool> flags;
};

struct ChartSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<ChartSeries> series;
    int width = 720;
    int height = 420;
};

std::string render_svg_chart(const ChartSpec& spec);

/// Legacy VTK structured points with Sw and p cell data for the matrix.
void write_vtk_snapshot(const SimState& state, const ReservoirModel& model,
                        const std::filesystem::path& path);
/// Fracture cells as polydata quads (one per fracture cell) with Sw and p.
void write_vtk_fractures(const SimState& state, const ReservoirModel& model,
                         const std::filesystem::path& path);

struct VtkInfo {
    Dims dimensions{};
    int cells = 0;
    std::vector<std::string> fields;
};

/// Reads back the header and data sections of either VTK file written above.
VtkInfo read_vtk_info(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, std::string_view contents);

} // namespace fracflow
