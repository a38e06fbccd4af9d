#pragma once

#include "fracflow/edfm.hpp"
#include "fracflow/model.hpp"
#include "fracflow/sim.hpp"
#include "fracflow/transport.hpp"
#include "fracflow/units.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace fixtures {

using namespace fracflow;

inline FluidModel incompressible()
{
    FluidModel f;
    f.c_w = 0.0;
    f.c_o = 0.0;
    return f;
}

inline WellSpec rate_well(std::string name, WellKind kind, int cell, double rate, double wi = 1e-13)
{
    WellSpec w;
    w.name = std::move(name);
    w.kind = kind;
    w.control = WellControl::rate;
    w.target = rate;
    w.cells = {cell};
    w.well_index = {wi};
    return w;
}

inline WellSpec bhp_well(std::string name, WellKind kind, int cell, double bhp, double wi = 1e-13)
{
    WellSpec w = rate_well(std::move(name), kind, cell, bhp, wi);
    w.control = WellControl::bhp;
    return w;
}

inline Fracture trace(Point2 a, Point2 b)
{
    Fracture f;
    f.start = a;
    f.end = b;
    f.aperture = 0.04;
    f.permeability = 1000.0 * units::darcy;
    f.porosity = 0.5;
    return f;
}

inline ReservoirModel make_model(Dims dims, Vec3 extent, const FractureNetwork& network,
                                 FluidModel fluid, std::vector<WellSpec> wells,
                                 double perm = 10.0 * units::milli_darcy)
{
    auto grid = build_cartesian_grid(dims, extent);
    auto rock = RockModel::uniform(grid, perm, 0.2);
    auto topo = embed_fracture_network(grid, rock, network);
    return build_model(std::move(grid), std::move(rock), std::move(topo), fluid, std::move(wells));
}

/// 10x10 areal block with three crossing fractures, injector and producer
/// at opposite corners.
inline FractureNetwork small_network()
{
    FractureNetwork net;
    net.fractures.push_back(trace({12, 18}, {87, 71}));
    net.fractures.push_back(trace({20, 83}, {76, 9}));
    net.fractures.push_back(trace({44, 95}, {61, 33}));
    return net;
}

inline SimulationCase small_case(FluidModel fluid = {}, double pv_per_year = 0.5)
{
    auto model = make_model({10, 10, 1}, {100, 100, 10}, small_network(), fluid, {});
    const double rate = pv_per_year * model.total_pore_volume() / units::year;
    model.wells.push_back(rate_well("INJ", WellKind::injector, 99, rate));
    model.wells.push_back(bhp_well("PROD", WellKind::producer, 0, 100.0 * units::bar));
    Schedule schedule;
    schedule.total_time = 1.0 * units::year;
    SimState initial = initial_state(model, 100.0 * units::bar, 0.0);
    return SimulationCase{"small", std::move(model), schedule, std::move(initial)};
}

// 1D chain 0 -> 1 -> ... -> n-1 driven by an injector in cell 0 and a
// producer in the last cell, all with the same total rate.
inline TransportSystem chain(int n, double flux, double dt, std::uint64_t seed)
{
    TransportSystem sys;
    sys.fluid = incompressible();
    sys.dt = dt;
    sys.num_matrix = n;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> upv(50.0, 200.0), us(0.0, 0.3);
    for (int i = 0; i < n; ++i) {
        sys.pore_volume.push_back(upv(rng));
        sys.s_prev.push_back(us(rng));
        sys.shrinkage.push_back(1.0);
    }
    for (int i = 0; i + 1 < n; ++i)
        sys.connections.push_back({i, i + 1, flux, ConnectionKind::matrix_matrix});
    sys.sources.push_back({0, flux, 1.0});
    sys.sources.push_back({n - 1, -flux, 1.0});
    return sys;
}

// Cell-by-cell solve in flow order: each residual depends only on the cell
// and its upstream neighbour, and is increasing in the cell's saturation.
inline std::vector<double> bisection_oracle(const TransportSystem& sys, double flux)
{
    const int n = sys.size();
    std::vector<double> s(n);
    double inflow = flux;
    for (int i = 0; i < n; ++i) {
        const double c = sys.pore_volume[i] / sys.dt;
        const auto g = [&](double x) {
            return c * (x - sys.s_prev[i]) + flux * sys.fluid.fractional_flow(x).fw - inflow;
        };
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (g(mid) > 0.0 ? hi : lo) = mid;
        }
        s[i] = 0.5 * (lo + hi);
        inflow = flux * sys.fluid.fractional_flow(s[i]).fw;
    }
    return s;
}

} // namespace fixtures
