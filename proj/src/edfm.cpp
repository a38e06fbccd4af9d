#include "fracflow/edfm.hpp"

#include "fracflow/errors.hpp"
#include "fracflow/units.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace fracflow {

namespace {

using Polygon = std::vector<Point2>;

double dot(const Point2& a, const Point2& b) { return a[0] * b[0] + a[1] * b[1]; }

double harmonic(double ta, double tb)
{
    if (ta <= 0.0 || tb <= 0.0)
        return 0.0;
    return 1.0 / (1.0 / ta + 1.0 / tb);
}

// Keeps the part of a convex polygon where dot(normal, x - point) >= 0.
Polygon clip_half_plane(const Polygon& poly, const Point2& point, const Point2& normal)
{
    Polygon out;
    const auto side = [&](const Point2& p) {
        return normal[0] * (p[0] - point[0]) + normal[1] * (p[1] - point[1]);
    };
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point2& a = poly[i];
        const Point2& b = poly[(i + 1) % poly.size()];
        const double sa = side(a);
        const double sb = side(b);
        if (sa >= 0.0)
            out.push_back(a);
        if ((sa >= 0.0) != (sb >= 0.0)) {
            const double t = sa / (sa - sb);
            out.push_back({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])});
        }
    }
    return out;
}

// Area and centroid by the shoelace formula.
std::pair<double, Point2> area_centroid(const Polygon& poly)
{
    double a = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point2& p = poly[i];
        const Point2& q = poly[(i + 1) % poly.size()];
        const double cross = p[0] * q[1] - q[0] * p[1];
        a += cross;
        cx += (p[0] + q[0]) * cross;
        cy += (p[1] + q[1]) * cross;
    }
    a *= 0.5;
    if (std::abs(a) < 1e-300)
        return {0.0, {0.0, 0.0}};
    return {std::abs(a), {cx / (6.0 * a), cy / (6.0 * a)}};
}

// Liang-Barsky clip of the segment to the rectangle; returns false if empty.
bool clip_segment(const Rect& box, Point2& p0, Point2& p1)
{
    double t0 = 0.0;
    double t1 = 1.0;
    const double dx = p1[0] - p0[0];
    const double dy = p1[1] - p0[1];
    const double p[4] = {-dx, dx, -dy, dy};
    const double q[4] = {p0[0] - box.x0, box.x1 - p0[0], p0[1] - box.y0, box.y1 - p0[1]};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] < 0.0)
                return false;
            continue;
        }
        const double t = q[i] / p[i];
        if (p[i] < 0.0)
            t0 = std::max(t0, t);
        else
            t1 = std::min(t1, t);
    }
    if (t0 >= t1)
        return false;
    const Point2 a = p0;
    p0 = {a[0] + t0 * dx, a[1] + t0 * dy};
    p1 = {a[0] + t1 * dx, a[1] + t1 * dy};
    return true;
}

struct Piece {
    double t0;
    double t1;
    int host2d;
    Point2 start;
    Point2 end;
    double length;
};

// Splits a clipped trace at grid lines; one piece per crossed cell column.
std::vector<Piece> split_trace(const StructuredGrid& grid, const Point2& a, const Point2& b)
{
    const auto& h = grid.cell_size();
    const auto& dims = grid.dims();
    const double dx = b[0] - a[0];
    const double dy = b[1] - a[1];
    const double len = std::hypot(dx, dy);

    std::vector<double> ts{0.0, 1.0};
    if (dx != 0.0)
        for (int i = 1; i < dims[0]; ++i) {
            const double t = (i * h[0] - a[0]) / dx;
            if (t > 0.0 && t < 1.0)
                ts.push_back(t);
        }
    if (dy != 0.0)
        for (int j = 1; j < dims[1]; ++j) {
            const double t = (j * h[1] - a[1]) / dy;
            if (t > 0.0 && t < 1.0)
                ts.push_back(t);
        }
    std::sort(ts.begin(), ts.end());

    std::vector<Piece> pieces;
    for (std::size_t n = 0; n + 1 < ts.size(); ++n) {
        const double t0 = ts[n];
        const double t1 = ts[n + 1];
        if (t1 - t0 <= 1e-14)
            continue;
        const double tm = 0.5 * (t0 + t1);
        const int i = std::clamp(static_cast<int>(std::floor((a[0] + tm * dx) / h[0])), 0, dims[0] - 1);
        const int j = std::clamp(static_cast<int>(std::floor((a[1] + tm * dy) / h[1])), 0, dims[1] - 1);
        const int host = i + dims[0] * j;
        if (!pieces.empty() && pieces.back().host2d == host) {
            pieces.back().t1 = t1;
            continue;
        }
        pieces.push_back({t0, t1, host, {}, {}, 0.0});
    }
    for (auto& p : pieces) {
        p.start = {a[0] + p.t0 * dx, a[1] + p.t0 * dy};
        p.end = {a[0] + p.t1 * dx, a[1] + p.t1 * dy};
        p.length = (p.t1 - p.t0) * len;
    }
    return pieces;
}

double distance(const Point2& a, const Point2& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

// Average distance of the points of a patch to a point on it.
double average_distance_to(const FractureCell& cell, const Point2& point)
{
    const double l1 = distance(cell.start, point);
    const double l2 = distance(cell.end, point);
    const double total = l1 + l2;
    if (total <= 0.0)
        return 0.0;
    return (l1 * l1 + l2 * l2) / (2.0 * total);
}

} // namespace

double EDFMTopology::fracture_pore_volume() const noexcept
{
    double sum = 0.0;
    for (const auto& f : fracture_cells)
        sum += f.pore_volume;
    return sum;
}

double average_normal_distance(const Rect& cell, const Point2& point, const Point2& normal)
{
    const Polygon box{{cell.x0, cell.y0}, {cell.x1, cell.y0}, {cell.x1, cell.y1}, {cell.x0, cell.y1}};
    const Point2 flipped{-normal[0], -normal[1]};
    const double total_area = (cell.x1 - cell.x0) * (cell.y1 - cell.y0);
    double integral = 0.0;
    for (const auto& n : {normal, flipped}) {
        const auto [area, centroid] = area_centroid(clip_half_plane(box, point, n));
        if (area > 0.0)
            integral += area * std::abs(dot(n, {centroid[0] - point[0], centroid[1] - point[1]}));
    }
    return integral / total_area;
}

double connectivity_index(const Rect& cell, const Point2& point, const Point2& normal,
                          double patch_area)
{
    if (!(patch_area > 0.0))
        return 0.0;
    const double d = average_normal_distance(cell, point, normal);
    if (!(d > 0.0))
        return 0.0;
    return patch_area / d;
}

double matrix_fracture_transmissibility(double ci, double matrix_perm_normal,
                                        const FractureCell& frac)
{
    const double t_matrix = ci * matrix_perm_normal;
    const double t_frac = 2.0 * frac.permeability * frac.area / frac.aperture;
    return harmonic(t_matrix, t_frac);
}

double fracture_internal_transmissibility(const FractureCell& a, const FractureCell& b)
{
    if (a.fracture != b.fracture)
        throw InvalidGeometry("fracture cells belong to different fractures; use the "
                              "intersection transmissibility");
    if (a.layer == b.layer && std::abs(a.segment - b.segment) == 1) {
        const double ta = half_transmissibility(a.permeability, a.aperture * a.height, 0.5 * a.length);
        const double tb = half_transmissibility(b.permeability, b.aperture * b.height, 0.5 * b.length);
        return harmonic(ta, tb);
    }
    if (a.segment == b.segment && std::abs(a.layer - b.layer) == 1) {
        const double ta = half_transmissibility(a.permeability, a.aperture * a.length, 0.5 * a.height);
        const double tb = half_transmissibility(b.permeability, b.aperture * b.length, 0.5 * b.height);
        return harmonic(ta, tb);
    }
    throw InvalidGeometry("fracture cells are not adjacent");
}

double fracture_intersection_transmissibility(const FractureCell& a, const FractureCell& b,
                                              const Point2& point)
{
    if (a.fracture == b.fracture)
        throw InvalidGeometry("intersection requires two different fractures");
    const double h = std::min(a.height, b.height);
    const double da = std::max(average_distance_to(a, point), 1e-9);
    const double db = std::max(average_distance_to(b, point), 1e-9);
    return harmonic(half_transmissibility(a.permeability, a.aperture * h, da),
                    half_transmissibility(b.permeability, b.aperture * h, db));
}

EDFMTopology embed_fracture_network(const StructuredGrid& grid, const RockModel& rock,
                                    const FractureNetwork& network)
{
    const auto& dims = grid.dims();
    const auto& h = grid.cell_size();
    const auto& ext = grid.extent();
    const Rect domain{0.0, 0.0, ext[0], ext[1]};
    const double min_length = 1e-6 * std::min(h[0], h[1]);
    const double min_height = 1e-6 * h[2];

    EDFMTopology topo;
    topo.num_matrix = grid.num_cells();

    struct Trace {
        Point2 start;
        Point2 end;
        std::vector<Piece> pieces;
        // fracture cell (local position) per (piece, layer), -1 if absent
        std::vector<std::vector<int>> cell_of;
    };
    std::vector<Trace> traces(network.size());

    for (std::size_t f = 0; f < network.size(); ++f) {
        const Fracture& frac = network.fractures[f];
        if (!(frac.aperture > 0.0))
            throw InvalidGeometry("fracture " + std::to_string(f) + " has non-positive aperture");
        Trace& trace = traces[f];
        Point2 a = frac.start;
        Point2 b = frac.end;
        if (!clip_segment(domain, a, b)) {
            topo.warnings.push_back("fracture " + std::to_string(f) + " lies outside the grid");
            continue;
        }
        trace.start = a;
        trace.end = b;
        for (auto& piece : split_trace(grid, a, b))
            if (piece.length > min_length)
                trace.pieces.push_back(piece);
        if (trace.pieces.empty()) {
            topo.warnings.push_back("fracture " + std::to_string(f) + " is shorter than the patch cutoff");
            continue;
        }

        const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
        const Point2 normal{-(b[1] - a[1]) / len, (b[0] - a[0]) / len};

        trace.cell_of.assign(trace.pieces.size(), std::vector<int>(dims[2], -1));
        for (int k = 0; k < dims[2]; ++k) {
            const double z0 = std::max(frac.z_bottom, k * h[2]);
            const double z1 = std::min(frac.z_top, (k + 1) * h[2]);
            const double height = z1 - z0;
            if (height <= min_height)
                continue;
            for (std::size_t s = 0; s < trace.pieces.size(); ++s) {
                const Piece& piece = trace.pieces[s];
                FractureCell cell;
                cell.fracture = static_cast<int>(f);
                cell.segment = static_cast<int>(s);
                cell.layer = k;
                cell.host = piece.host2d + dims[0] * dims[1] * k;
                cell.start = piece.start;
                cell.end = piece.end;
                cell.length = piece.length;
                cell.height = height;
                cell.area = piece.length * height;
                cell.aperture = frac.aperture;
                cell.permeability = frac.permeability;
                cell.porosity = frac.porosity;
                cell.pore_volume = cell.area * frac.aperture * frac.porosity;

                const int global = topo.num_unknowns();
                trace.cell_of[s][k] = topo.num_fracture();
                topo.fracture_cells.push_back(cell);

                const auto [ci, cj, ck] = grid.ijk(cell.host);
                const Rect footprint{ci * h[0], cj * h[1], (ci + 1) * h[0], (cj + 1) * h[1]};
                const double index = connectivity_index(footprint, piece.start, normal, cell.area);
                const auto& kc = rock.permeability[cell.host];
                const double kn = kc[0] * normal[0] * normal[0] + kc[1] * normal[1] * normal[1];
                topo.matrix_fracture.push_back(
                    {cell.host, global, matrix_fracture_transmissibility(index, kn, cell)});
            }
        }
    }

    const auto global_of = [&](int local) { return topo.num_matrix + local; };

    // Connections within each fracture.
    for (auto& trace : traces) {
        for (std::size_t s = 0; s < trace.cell_of.size(); ++s)
            for (int k = 0; k < dims[2]; ++k) {
                const int here = trace.cell_of[s][k];
                if (here < 0)
                    continue;
                const auto& fc = topo.fracture_cells[here];
                if (s + 1 < trace.cell_of.size()) {
                    const int next = trace.cell_of[s + 1][k];
                    if (next >= 0)
                        topo.fracture_fracture.push_back(
                            {global_of(here), global_of(next),
                             fracture_internal_transmissibility(fc, topo.fracture_cells[next])});
                }
                if (k + 1 < dims[2]) {
                    const int above = trace.cell_of[s][k + 1];
                    if (above >= 0)
                        topo.fracture_fracture.push_back(
                            {global_of(here), global_of(above),
                             fracture_internal_transmissibility(fc, topo.fracture_cells[above])});
                }
            }
    }

    // Fracture-fracture intersections.
    const auto piece_at = [](const Trace& trace, double t_full) -> int {
        // t_full is the parameter along the clipped trace
        for (std::size_t s = 0; s < trace.pieces.size(); ++s)
            if (t_full >= trace.pieces[s].t0 - 1e-12 && t_full <= trace.pieces[s].t1 + 1e-12)
                return static_cast<int>(s);
        return -1;
    };
    for (std::size_t f = 0; f < traces.size(); ++f) {
        if (traces[f].pieces.empty())
            continue;
        for (std::size_t g = f + 1; g < traces.size(); ++g) {
            if (traces[g].pieces.empty())
                continue;
            const Point2& p = traces[f].start;
            const Point2 r{traces[f].end[0] - p[0], traces[f].end[1] - p[1]};
            const Point2& q = traces[g].start;
            const Point2 s{traces[g].end[0] - q[0], traces[g].end[1] - q[1]};
            const double denom = r[0] * s[1] - r[1] * s[0];
            const double scale = std::hypot(r[0], r[1]) * std::hypot(s[0], s[1]);
            if (std::abs(denom) <= 1e-12 * scale)
                continue; // parallel or collinear: no intersection line
            const Point2 qp{q[0] - p[0], q[1] - p[1]};
            const double t = (qp[0] * s[1] - qp[1] * s[0]) / denom;
            const double u = (qp[0] * r[1] - qp[1] * r[0]) / denom;
            if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0)
                continue;
            const int sf = piece_at(traces[f], t);
            const int sg = piece_at(traces[g], u);
            if (sf < 0 || sg < 0)
                continue;
            const Point2 point{p[0] + t * r[0], p[1] + t * r[1]};
            for (int k = 0; k < dims[2]; ++k) {
                const int cf = traces[f].cell_of[sf][k];
                const int cg = traces[g].cell_of[sg][k];
                if (cf < 0 || cg < 0)
                    continue;
                topo.fracture_fracture.push_back(
                    {global_of(cf), global_of(cg),
                     fracture_intersection_transmissibility(topo.fracture_cells[cf],
                                                            topo.fracture_cells[cg], point)});
            }
        }
    }

    topo.matrix_index_set.resize(topo.num_matrix);
    for (int c = 0; c < topo.num_matrix; ++c)
        topo.matrix_index_set[c] = c;
    topo.fracture_index_set.resize(topo.num_fracture());
    for (int c = 0; c < topo.num_fracture(); ++c)
        topo.fracture_index_set[c] = topo.num_matrix + c;
    return topo;
}

FractureNetwork read_fracture_network(std::istream& in, const std::string& source,
                                      const Vec3& domain, double porosity)
{
    FractureNetwork network;
    std::string line;
    int line_no = 0;
    const double tol_x = 1e-9 * domain[0];
    const double tol_y = 1e-9 * domain[1];
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream fields(line);
        std::vector<double> values;
        std::string token;
        const std::string where = source + ":" + std::to_string(line_no);
        while (fields >> token) {
            try {
                std::size_t used = 0;
                values.push_back(std::stod(token, &used));
                if (used != token.size())
                    throw std::invalid_argument(token);
            } catch (const std::exception&) {
                throw ConfigError(where, "malformed number '" + token + "'");
            }
        }
        if (values.empty())
            continue;
        if (values.size() != 6 && values.size() != 8)
            throw ConfigError(where, "expected 'x1 y1 x2 y2 aperture perm_darcy [z1 z2]', got " +
                                         std::to_string(values.size()) + " fields");
        Fracture f;
        f.start = {values[0], values[1]};
        f.end = {values[2], values[3]};
        f.aperture = values[4];
        f.permeability = values[5] * units::darcy;
        f.porosity = porosity;
        if (values.size() == 8) {
            f.z_bottom = values[6];
            f.z_top = values[7];
            if (!(f.z_top > f.z_bottom))
                throw ConfigError(where, "z-extent must satisfy z1 < z2");
        }
        for (const auto& p : {f.start, f.end})
            if (!(p[0] >= -tol_x && p[0] <= domain[0] + tol_x && p[1] >= -tol_y &&
                  p[1] <= domain[1] + tol_y))
                throw ConfigError(where, "fracture endpoint outside the domain");
        if (!(f.aperture > 0.0))
            throw ConfigError(where, "aperture must be positive");
        if (!(f.permeability > 0.0))
            throw ConfigError(where, "permeability must be positive");
        if (f.start == f.end)
            throw ConfigError(where, "fracture has zero length");
        network.fractures.push_back(f);
    }
    return network;
}

FractureNetwork load_fracture_network(const std::string& path, const Vec3& domain, double porosity)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path, "cannot open fracture network file");
    return read_fracture_network(in, path, domain, porosity);
}

void write_fracture_network(std::ostream& out, const FractureNetwork& network)
{
    // Shortest representation that reads back to the same double.
    const auto num = [](double v) {
        char buf[32];
        const auto r = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, r.ptr);
    };
    out << "# x1 y1 x2 y2 aperture perm_darcy [z1 z2]\n";
    for (const auto& f : network.fractures) {
        out << num(f.start[0]) << ' ' << num(f.start[1]) << ' ' << num(f.end[0]) << ' '
            << num(f.end[1]) << ' ' << num(f.aperture) << ' '
            << num(std::round(f.permeability / units::darcy * 1e9) / 1e9);
        if (std::isfinite(f.z_bottom) || std::isfinite(f.z_top))
            out << ' ' << num(f.z_bottom) << ' ' << num(f.z_top);
        out << '\n';
    }
}

} // namespace fracflow
