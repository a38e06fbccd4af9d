#include "fracflow/netgen.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <random>

namespace fracflow {

namespace {

Fracture scaled(const Fracture& f, double factor, const Point2& domain)
{
    const Point2 c{0.5 * (f.start[0] + f.end[0]), 0.5 * (f.start[1] + f.end[1])};
    Fracture out = f;
    out.start = {c[0] + factor * (f.start[0] - c[0]), c[1] + factor * (f.start[1] - c[1])};
    out.end = {c[0] + factor * (f.end[0] - c[0]), c[1] + factor * (f.end[1] - c[1])};
    for (auto* p : {&out.start, &out.end}) {
        (*p)[0] = std::clamp((*p)[0], 0.0, domain[0]);
        (*p)[1] = std::clamp((*p)[1], 0.0, domain[1]);
    }
    return out;
}

// Direction-preserving clip of a trace through an interior centre.
void clip_to_domain(Fracture& f, const Point2& domain)
{
    const Point2 c{0.5 * (f.start[0] + f.end[0]), 0.5 * (f.start[1] + f.end[1])};
    for (auto* p : {&f.start, &f.end}) {
        double t = 1.0;
        for (int d = 0; d < 2; ++d) {
            const double delta = (*p)[d] - c[d];
            if ((*p)[d] < 0.0)
                t = std::min(t, -c[d] / delta);
            else if ((*p)[d] > domain[d])
                t = std::min(t, (domain[d] - c[d]) / delta);
        }
        *p = {c[0] + t * ((*p)[0] - c[0]), c[1] + t * ((*p)[1] - c[1])};
    }
}

struct TraceStats {
    int cells = 0;
    double shortest = 0.0;
};

TraceStats trace_stats(const Fracture& f, const StructuredGrid& layer_grid)
{
    static thread_local std::vector<RockModel> rock_cache;
    if (rock_cache.empty() || rock_cache.front().porosity.size() != static_cast<std::size_t>(layer_grid.num_cells())) {
        rock_cache.clear();
        rock_cache.push_back(RockModel::uniform(layer_grid, 1e-14, 0.2));
    }
    FractureNetwork single;
    single.fractures.push_back(f);
    const auto topo = embed_fracture_network(layer_grid, rock_cache.front(), single);
    TraceStats st;
    st.cells = topo.num_fracture();
    st.shortest = std::numeric_limits<double>::infinity();
    for (const auto& c : topo.fracture_cells)
        st.shortest = std::min(st.shortest, c.length);
    return st;
}

double sliver_cutoff(const StructuredGrid& g, double fraction)
{
    return fraction * std::min(g.cell_size()[0], g.cell_size()[1]);
}

bool sliver_free(const Fracture& f, const StructuredGrid& g, double fraction)
{
    const auto st = trace_stats(f, g);
    return st.cells == 0 || st.shortest >= sliver_cutoff(g, fraction);
}

// Shifts a trace by small deterministic offsets until no patch is a sliver.
bool desliver(Fracture& f, const StructuredGrid& g, double fraction, const Point2& domain)
{
    if (sliver_free(f, g, fraction))
        return true;
    const auto& h = g.cell_size();
    const Fracture original = f;
    for (int n = 1; n <= 40; ++n) {
        const double r = 0.025 * n;
        const double angle = 2.399963229728653 * n; // golden angle spiral
        const double ox = r * h[0] * std::cos(angle);
        const double oy = r * h[1] * std::sin(angle);
        Fracture cand = original;
        cand.start = {original.start[0] + ox, original.start[1] + oy};
        cand.end = {original.end[0] + ox, original.end[1] + oy};
        clip_to_domain(cand, domain);
        if (sliver_free(cand, g, fraction)) {
            f = cand;
            return true;
        }
    }
    f = original;
    return false;
}

StructuredGrid layer_of(const StructuredGrid& grid)
{
    const auto& dims = grid.dims();
    const auto& ext = grid.extent();
    return StructuredGrid({dims[0], dims[1], 1}, {ext[0], ext[1], ext[2] / dims[2]});
}

} // namespace

FractureNetwork generate_fracture_network(const NetworkGeneratorParams& params)
{
    FractureNetwork network;
    if (params.count <= 0)
        return network;

    std::mt19937_64 rng(params.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    double weight_sum = 0.0;
    for (const auto& s : params.sets)
        weight_sum += s.weight;

    for (int n = 0; n < params.count; ++n) {
        const Point2 centre{unit(rng) * params.domain[0], unit(rng) * params.domain[1]};
        double angle = 0.0;
        if (!params.sets.empty()) {
            double pick = unit(rng) * weight_sum;
            const FractureSet* set = &params.sets.back();
            for (const auto& s : params.sets) {
                if (pick < s.weight) {
                    set = &s;
                    break;
                }
                pick -= s.weight;
            }
            angle = set->mean_angle_deg + set->spread_deg * normal(rng);
        } else {
            angle = 180.0 * unit(rng);
        }
        const double length =
            std::clamp(params.length_median * std::exp(params.length_log_sigma * normal(rng)),
                       params.length_min, params.length_max);
        const double rad = angle * std::numbers::pi / 180.0;
        const Point2 half{0.5 * length * std::cos(rad), 0.5 * length * std::sin(rad)};

        Fracture f;
        f.start = {centre[0] - half[0], centre[1] - half[1]};
        f.end = {centre[0] + half[0], centre[1] + half[1]};
        f.aperture = params.aperture;
        f.permeability = params.permeability;
        f.porosity = params.porosity;
        clip_to_domain(f, params.domain);
        network.fractures.push_back(f);
    }
    return network;
}

int remove_slivers(FractureNetwork& network, const StructuredGrid& grid, double min_fraction)
{
    const StructuredGrid layer = layer_of(grid);
    const Point2 domain{grid.extent()[0], grid.extent()[1]};
    int left = 0;
    for (auto& f : network.fractures)
        if (!desliver(f, layer, min_fraction, domain))
            ++left;
    return left;
}

int fit_network_to_cell_count(FractureNetwork& network, const StructuredGrid& grid, int target_cells,
                              double min_fraction)
{
    const StructuredGrid layer = layer_of(grid);
    const Point2 domain{grid.extent()[0], grid.extent()[1]};
    if (network.empty())
        return 0;

    const auto count_of = [&](const FractureNetwork& net) {
        int c = 0;
        for (const auto& f : net.fractures)
            c += trace_stats(f, layer).cells;
        return c;
    };
    const auto scaled_all = [&](double factor) {
        FractureNetwork out = network;
        for (auto& f : out.fractures)
            f = scaled(f, factor, domain);
        return out;
    };

    // Largest global factor whose count does not exceed the target.
    double lo = 0.05;
    double hi = 1.0;
    while (count_of(scaled_all(hi)) < target_cells && hi < 64.0)
        hi *= 2.0;
    for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (count_of(scaled_all(mid)) <= target_cells)
            lo = mid;
        else
            hi = mid;
    }
    network = scaled_all(lo);
    if (min_fraction > 0.0)
        remove_slivers(network, grid, min_fraction);

    std::vector<int> cells;
    int count = 0;
    for (const auto& f : network.fractures) {
        cells.push_back(trace_stats(f, layer).cells);
        count += cells.back();
    }

    // Close the remaining gap one trace at a time, longest first.
    std::vector<std::size_t> order(network.size());
    for (std::size_t k = 0; k < order.size(); ++k)
        order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cells[a] > cells[b]; });
    for (std::size_t k : order) {
        if (count == target_cells)
            break;
        const Fracture original = network.fractures[k];
        const int need = target_cells - count;
        for (int step = 1; step <= 200; ++step) {
            const double factor = need > 0 ? 1.0 + 0.01 * step : 1.0 - 0.004 * step;
            if (factor <= 0.05)
                break;
            Fracture cand = scaled(original, factor, domain);
            const auto st = trace_stats(cand, layer);
            const int delta = st.cells - cells[k];
            if ((need > 0 && delta > need) || (need < 0 && delta < need))
                break;
            if (delta == 0 || (min_fraction > 0.0 && st.cells > 0 && st.shortest < sliver_cutoff(layer, min_fraction)))
                continue;
            network.fractures[k] = cand;
            cells[k] = st.cells;
            count += delta;
            if (count == target_cells)
                break;
            if ((target_cells - count > 0) != (need > 0))
                break;
        }
    }
    return count;
}

} // namespace fracflow
