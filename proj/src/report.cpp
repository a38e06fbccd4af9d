#include "fracflow/report.hpp"

#include "fracflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace fracflow {

namespace {

std::string fmt(const char* pattern, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

std::ofstream open_output(const std::filesystem::path& path)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path.string());
    return out;
}

void close_checked(std::ofstream& out, const std::filesystem::path& path)
{
    out.close();
    if (!out)
        throw Error("write failed: " + path.string());
}

double nice_step(double span, int target_ticks)
{
    if (!(span > 0.0))
        return 1.0;
    const double raw = span / target_ticks;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    const double m = r < 1.5 ? 1.0 : r < 3.0 ? 2.0 : r < 7.0 ? 5.0 : 10.0;
    return m * mag;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string tick_label(double v, double step)
{
    if (step >= 1.0 || v == 0.0)
        return fmt("%.0f", v);
    const int digits = std::min(6, static_cast<int>(std::ceil(-std::log10(step))));
    char pattern[16];
    std::snprintf(pattern, sizeof pattern, "%%.%df", digits);
    return fmt(pattern, v);
}

} // namespace

void write_steps_csv(std::ostream& out, const std::vector<StepReport>& steps, bool include_timing)
{
    out << steps_csv_header << '\n';
    for (const auto& s : steps) {
        out << s.step << ',' << fmt("%.6f", s.dt / units::day) << ',' << s.flow_iterations << ','
            << s.transport_iterations << ',' << s.wasted_iterations << ',' << s.cuts << ','
            << (s.activated ? 1 : 0) << ',' << fmt("%.6f", include_timing ? s.wall_seconds : 0.0)
            << '\n';
    }
}

void write_cumulative_csv(std::ostream& out, const std::vector<StepReport>& steps, bool include_timing)
{
    out << "step,time_days,cum_iters,cum_wasted,cum_activations,cum_wall_s\n";
    long iters = 0;
    long wasted = 0;
    long activations = 0;
    double wall = 0.0;
    for (const auto& s : steps) {
        iters += s.transport_iterations + s.wasted_iterations;
        wasted += s.wasted_iterations;
        activations += s.activated ? 1 : 0;
        wall += include_timing ? s.wall_seconds : 0.0;
        out << s.step << ',' << fmt("%.6f", s.time / units::day) << ',' << iters << ',' << wasted
            << ',' << activations << ',' << fmt("%.6f", wall) << '\n';
    }
}

std::string render_svg_chart(const ChartSpec& spec)
{
    const double left = 70.0, right = 20.0, top = 40.0, bottom = 55.0;
    const double pw = spec.width - left - right;
    const double ph = spec.height - top - bottom;

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
    double y0 = 0.0, y1 = -std::numeric_limits<double>::infinity();
    for (const auto& s : spec.series)
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    if (!std::isfinite(x0)) {
        x0 = 0.0;
        x1 = 1.0;
    }
    if (!(x1 > x0))
        x1 = x0 + 1.0;
    if (!(y1 > y0))
        y1 = y0 + 1.0;
    const double ystep = nice_step(y1 - y0, 6);
    y1 = std::ceil(y1 / ystep) * ystep;
    const double xstep = nice_step(x1 - x0, 8);

    const auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    const auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
      << spec.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << spec.width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(spec.title) << "</text>\n";

    for (double y = std::ceil(y0 / ystep) * ystep; y <= y1 + 1e-9 * ystep; y += ystep) {
        o << "<line x1=\"" << fmt("%.2f", left) << "\" y1=\"" << fmt("%.2f", py(y)) << "\" x2=\""
          << fmt("%.2f", left + pw) << "\" y2=\"" << fmt("%.2f", py(y))
          << "\" stroke=\"#ddd\"/>\n";
        o << "<text x=\"" << fmt("%.2f", left - 6) << "\" y=\"" << fmt("%.2f", py(y) + 4)
          << "\" text-anchor=\"end\">" << tick_label(y, ystep) << "</text>\n";
    }
    for (double x = std::ceil(x0 / xstep) * xstep; x <= x1 + 1e-9 * xstep; x += xstep)
        o << "<text x=\"" << fmt("%.2f", px(x)) << "\" y=\"" << fmt("%.2f", top + ph + 18)
          << "\" text-anchor=\"middle\">" << tick_label(x, xstep) << "</text>\n";
    o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    o << "<text x=\"" << fmt("%.2f", left + pw / 2) << "\" y=\"" << spec.height - 12
      << "\" text-anchor=\"middle\">" << escape(spec.x_label) << "</text>\n";
    o << "<text transform=\"translate(16," << fmt("%.2f", top + ph / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(spec.y_label) << "</text>\n";

    for (std::size_t k = 0; k < spec.series.size(); ++k) {
        const auto& s = spec.series[k];
        o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
            o << (i ? " " : "") << fmt("%.2f", px(s.x[i])) << ',' << fmt("%.2f", py(s.y[i]));
        o << "\"/>\n";
        for (std::size_t i = 0; i < s.flags.size() && i < s.x.size(); ++i) {
            if (!s.flags[i])
                continue;
            const double fx = px(s.x[i]);
            const double fy = py(s.y[i]);
            o << "<polygon fill=\"#2ca02c\" points=\"" << fmt("%.2f", fx) << ',' << fmt("%.2f", fy - 4)
              << ' ' << fmt("%.2f", fx + 8) << ',' << fmt("%.2f", fy - 8) << ' ' << fmt("%.2f", fx)
              << ',' << fmt("%.2f", fy - 12) << "\"/>\n";
        }
        const double ly = top + 14 + 16.0 * static_cast<double>(k);
        o << "<line x1=\"" << fmt("%.2f", left + 10) << "\" y1=\"" << fmt("%.2f", ly) << "\" x2=\""
          << fmt("%.2f", left + 34) << "\" y2=\"" << fmt("%.2f", ly) << "\" stroke=\"" << s.color
          << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << fmt("%.2f", left + 40) << "\" y=\"" << fmt("%.2f", ly + 4) << "\">"
          << escape(s.name) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

void write_vtk_snapshot(const SimState& state, const ReservoirModel& model,
                        const std::filesystem::path& path)
{
    const auto& g = model.grid;
    const int n = g.num_cells();
    if (static_cast<int>(state.saturation.size()) < n || static_cast<int>(state.pressure.size()) < n)
        throw Error("state does not match the grid for " + path.string());
    auto out = open_output(path);
    out << std::setprecision(12);
    out << "# vtk DataFile Version 3.0\n"
        << "fracflow matrix t=" << state.time / units::day << " days\n"
        << "ASCII\nDATASET STRUCTURED_POINTS\n";
    const auto& d = g.dims();
    const auto& h = g.cell_size();
    out << "DIMENSIONS " << d[0] + 1 << ' ' << d[1] + 1 << ' ' << d[2] + 1 << '\n'
        << "ORIGIN 0 0 0\n"
        << "SPACING " << h[0] << ' ' << h[1] << ' ' << h[2] << '\n'
        << "CELL_DATA " << n << '\n';
    out << "SCALARS Sw double 1\nLOOKUP_TABLE default\n";
    for (int c = 0; c < n; ++c)
        out << state.saturation[c] << '\n';
    out << "SCALARS p double 1\nLOOKUP_TABLE default\n";
    for (int c = 0; c < n; ++c)
        out << state.pressure[c] << '\n';
    close_checked(out, path);
}

void write_vtk_fractures(const SimState& state, const ReservoirModel& model,
                         const std::filesystem::path& path)
{
    const auto& cells = model.topology.fracture_cells;
    const int nm = model.num_matrix();
    const int nf = static_cast<int>(cells.size());
    auto out = open_output(path);
    out << std::setprecision(12);
    out << "# vtk DataFile Version 3.0\n"
        << "fracflow fractures t=" << state.time / units::day << " days\n"
        << "ASCII\nDATASET POLYDATA\n"
        << "POINTS " << 4 * nf << " double\n";
    const double dz = model.grid.cell_size()[2];
    for (const auto& c : cells) {
        const double z0 = c.layer * dz;
        const double z1 = z0 + c.height;
        out << c.start[0] << ' ' << c.start[1] << ' ' << z0 << '\n'
            << c.end[0] << ' ' << c.end[1] << ' ' << z0 << '\n'
            << c.end[0] << ' ' << c.end[1] << ' ' << z1 << '\n'
            << c.start[0] << ' ' << c.start[1] << ' ' << z1 << '\n';
    }
    out << "POLYGONS " << nf << ' ' << 5 * nf << '\n';
    for (int f = 0; f < nf; ++f)
        out << "4 " << 4 * f << ' ' << 4 * f + 1 << ' ' << 4 * f + 2 << ' ' << 4 * f + 3 << '\n';
    out << "CELL_DATA " << nf << '\n';
    out << "SCALARS Sw double 1\nLOOKUP_TABLE default\n";
    for (int f = 0; f < nf; ++f)
        out << state.saturation.at(static_cast<std::size_t>(nm + f)) << '\n';
    out << "SCALARS p double 1\nLOOKUP_TABLE default\n";
    for (int f = 0; f < nf; ++f)
        out << state.pressure.at(static_cast<std::size_t>(nm + f)) << '\n';
    close_checked(out, path);
}

VtkInfo read_vtk_info(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot read " + path.string());
    VtkInfo info;
    std::string line;
    std::getline(in, line);
    if (line.rfind("# vtk DataFile", 0) != 0)
        throw Error(path.string() + ": not a legacy VTK file");
    std::getline(in, line); // title
    std::string word;
    while (in >> word) {
        if (word == "DIMENSIONS") {
            in >> info.dimensions[0] >> info.dimensions[1] >> info.dimensions[2];
        } else if (word == "POINTS") {
            long n = 0;
            std::string type;
            in >> n >> type;
            double v = 0.0;
            for (long i = 0; i < 3 * n; ++i)
                in >> v;
        } else if (word == "POLYGONS") {
            long n = 0, size = 0;
            in >> n >> size;
            long v = 0;
            for (long i = 0; i < size; ++i)
                in >> v;
        } else if (word == "CELL_DATA") {
            in >> info.cells;
        } else if (word == "SCALARS") {
            std::string name, type;
            int components = 1;
            in >> name >> type >> components;
            std::string lut, lut_name;
            in >> lut >> lut_name;
            double v = 0.0;
            int read = 0;
            for (int i = 0; i < info.cells * components && (in >> v); ++i)
                ++read;
            if (read != info.cells * components)
                throw Error(path.string() + ": field " + name + " is truncated");
            info.fields.push_back(name);
        }
        if (!in && !in.eof())
            throw Error(path.string() + ": malformed content near '" + word + "'");
    }
    if (info.dimensions[0] > 0) {
        const int expected = (info.dimensions[0] - 1) * (info.dimensions[1] - 1) * (info.dimensions[2] - 1);
        if (expected != info.cells)
            throw Error(path.string() + ": CELL_DATA does not match DIMENSIONS");
    }
    return info;
}

void write_text_file(const std::filesystem::path& path, std::string_view contents)
{
    auto out = open_output(path);
    out << contents;
    close_checked(out, path);
}

} // namespace fracflow
