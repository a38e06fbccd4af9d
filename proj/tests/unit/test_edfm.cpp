#include <doctest.h>

#include "fracflow/edfm.hpp"
#include "fracflow/errors.hpp"
#include "fracflow/model.hpp"
#include "fracflow/units.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

using namespace fracflow;

namespace {

// Mean |(x - p) . n| over the rectangle by plain sampling.
double monte_carlo_distance(const Rect& r, const Point2& p, const Point2& n, int samples)
{
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> ux(r.x0, r.x1), uy(r.y0, r.y1);
    double sum = 0.0;
    for (int s = 0; s < samples; ++s) {
        const double x = ux(rng), y = uy(rng);
        sum += std::abs((x - p[0]) * n[0] + (y - p[1]) * n[1]);
    }
    return sum / samples;
}

Fracture trace(Point2 a, Point2 b)
{
    Fracture f;
    f.start = a;
    f.end = b;
    f.aperture = 0.04;
    f.permeability = 1000.0 * units::darcy;
    f.porosity = 0.5;
    return f;
}

} // namespace

TEST_CASE("average normal distance against Monte-Carlo")
{
    const Rect cube{0, 0, 10, 10};
    constexpr int samples = 1'000'000;

    const double center = average_normal_distance(cube, {5, 5}, {1, 0});
    CHECK(center == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(center == doctest::Approx(monte_carlo_distance(cube, {5, 5}, {1, 0}, samples)).epsilon(0.005));
    CHECK(connectivity_index(cube, {5, 5}, {1, 0}, 100.0) == doctest::Approx(40.0).epsilon(1e-12));

    // Offset plane, d1 = 3 and d2 = 7.
    const double offset = average_normal_distance(cube, {3, 5}, {1, 0});
    CHECK(offset == doctest::Approx((9.0 + 49.0) / (2.0 * 10.0)).epsilon(1e-12));
    CHECK(offset == doctest::Approx(monte_carlo_distance(cube, {3, 5}, {1, 0}, samples)).epsilon(0.005));

    const double a = 35.0 * std::numbers::pi / 180.0;
    const Point2 n{std::cos(a), std::sin(a)};
    const double oblique = average_normal_distance(cube, {3, 4}, n);
    CHECK(oblique == doctest::Approx(monte_carlo_distance(cube, {3, 4}, n, samples)).epsilon(0.005));

    const Rect slab{2, 1, 7, 4};
    const Point2 m{std::cos(1.1), std::sin(1.1)};
    CHECK(average_normal_distance(slab, {4, 3}, m) ==
          doctest::Approx(monte_carlo_distance(slab, {4, 3}, m, samples)).epsilon(0.005));

    CHECK(connectivity_index(cube, {5, 5}, {1, 0}, 0.0) == 0.0);
}

TEST_CASE("fracture internal transmissibility")
{
    FractureCell a;
    a.fracture = 0;
    a.segment = 0;
    a.length = 10.0;
    a.height = 1.0;
    a.aperture = 0.04;
    a.permeability = 1000.0 * units::darcy;
    FractureCell b = a;
    b.segment = 1;

    const double half = a.permeability * 0.04 * 1.0 / 5.0;
    CHECK(fracture_internal_transmissibility(a, b) == doctest::Approx(0.5 * half).epsilon(1e-14));
    CHECK(fracture_internal_transmissibility(a, b) == doctest::Approx(3.948e-12).epsilon(1e-3));
    CHECK(fracture_internal_transmissibility(a, b) == fracture_internal_transmissibility(b, a));

    FractureCell far = a;
    far.segment = 3;
    CHECK_THROWS_AS(fracture_internal_transmissibility(a, far), InvalidGeometry);
    FractureCell other = b;
    other.fracture = 1;
    CHECK_THROWS_AS(fracture_internal_transmissibility(a, other), InvalidGeometry);
}

TEST_CASE("axis aligned fracture across five cells")
{
    const auto grid = build_cartesian_grid({5, 3, 1}, {50, 30, 1});
    const auto rock = RockModel::uniform(grid, 1e-14, 0.2);
    FractureNetwork net;
    net.fractures.push_back(trace({0, 15}, {50, 15}));
    const auto topo = embed_fracture_network(grid, rock, net);

    CHECK(topo.num_fracture() == 5);
    CHECK(topo.matrix_fracture.size() == 5);
    CHECK(topo.fracture_fracture.size() == 4);
    for (int i = 0; i < 5; ++i) {
        const auto& fc = topo.fracture_cells[i];
        CHECK(fc.host == grid.index(i, 1, 0));
        CHECK(fc.length == doctest::Approx(10.0));
        CHECK(fc.area == doctest::Approx(10.0));
        CHECK(fc.pore_volume == doctest::Approx(10.0 * 0.04 * 0.5));
    }
    // Full cut through the centre: d = 2.5 m, CI = 4.
    const double ci = 10.0 / 2.5;
    const double expected = 1.0 / (1.0 / (ci * 1e-14) + 0.04 / (2.0 * 1000.0 * units::darcy * 10.0));
    for (const auto& c : topo.matrix_fracture)
        CHECK(c.trans == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("orthogonal cross connects at the intersection")
{
    const auto grid = build_cartesian_grid({3, 3, 1}, {30, 30, 1});
    const auto rock = RockModel::uniform(grid, 1e-14, 0.2);
    FractureNetwork net;
    net.fractures.push_back(trace({0, 15}, {30, 15}));
    net.fractures.push_back(trace({15, 0}, {15, 30}));
    const auto topo = embed_fracture_network(grid, rock, net);
    REQUIRE(topo.num_fracture() == 6);

    std::vector<CellPair> crossing;
    for (const auto& c : topo.fracture_fracture) {
        const auto& fa = topo.fracture_cells[c.a - topo.num_matrix];
        const auto& fb = topo.fracture_cells[c.b - topo.num_matrix];
        if (fa.fracture != fb.fracture)
            crossing.push_back(c);
    }
    REQUIRE(crossing.size() == 1);
    const int centre = grid.index(1, 1, 0);
    CHECK(topo.fracture_cells[crossing[0].a - topo.num_matrix].host == centre);
    CHECK(topo.fracture_cells[crossing[0].b - topo.num_matrix].host == centre);

    // Each centre patch is split 5 + 5 by the other trace: d = (25 + 25) / 20.
    const double half = 1000.0 * units::darcy * 0.04 * 1.0 / 2.5;
    CHECK(crossing[0].trans == doctest::Approx(0.5 * half).epsilon(1e-12));
    // Plus two in-plane connections per fracture.
    CHECK(topo.fracture_fracture.size() == 5);
}

TEST_CASE("empty and outside networks")
{
    const auto grid = build_cartesian_grid({4, 4, 1}, {40, 40, 1});
    const auto rock = RockModel::uniform(grid, 1e-14, 0.2);
    const auto empty = embed_fracture_network(grid, rock, {});
    CHECK(empty.num_fracture() == 0);
    CHECK(empty.fracture_index_set.empty());
    CHECK(empty.matrix_index_set.size() == 16);
    CHECK(empty.matrix_fracture.empty());

    FractureNetwork outside;
    outside.fractures.push_back(trace({100, 100}, {120, 130}));
    const auto topo = embed_fracture_network(grid, rock, outside);
    CHECK(topo.num_fracture() == 0);
    CHECK(topo.warnings.size() == 1);
}

TEST_CASE("topology invariants on a random network")
{
    const auto grid = build_cartesian_grid({20, 15, 3}, {200, 150, 30});
    const auto rock = RockModel::uniform(grid, 1e-14, 0.2);
    FractureNetwork net;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(0, 200), uy(0, 150);
    for (int f = 0; f < 12; ++f)
        net.fractures.push_back(trace({ux(rng), uy(rng)}, {ux(rng), uy(rng)}));
    const auto topo = embed_fracture_network(grid, rock, net);
    REQUIRE(topo.num_fracture() > 0);

    std::set<int> all(topo.matrix_index_set.begin(), topo.matrix_index_set.end());
    for (int g : topo.fracture_index_set)
        CHECK(all.insert(g).second);
    CHECK(static_cast<int>(all.size()) == topo.num_unknowns());
    CHECK(*all.begin() == 0);
    CHECK(*all.rbegin() == topo.num_unknowns() - 1);

    std::vector<int> mf_count(static_cast<std::size_t>(topo.num_fracture()), 0);
    for (const auto& c : topo.matrix_fracture) {
        const int f = c.b - topo.num_matrix;
        ++mf_count[f];
        CHECK(c.a == topo.fracture_cells[f].host);
        CHECK(c.trans >= 0.0);
    }
    for (int n : mf_count)
        CHECK(n == 1);
    for (const auto& c : topo.fracture_fracture)
        CHECK(c.trans >= 0.0);

    double pv = 0.0;
    for (const auto& fc : topo.fracture_cells)
        pv += fc.area * fc.aperture * fc.porosity;
    CHECK(topo.fracture_pore_volume() == doctest::Approx(pv).epsilon(1e-14));
}

TEST_CASE("no fractures leaves the matrix-only connection set")
{
    const auto grid = build_cartesian_grid({6, 5, 2}, {60, 50, 20});
    const auto rock = RockModel::uniform(grid, 1e-14, 0.2);
    const auto model = build_model(grid, rock, embed_fracture_network(grid, rock, {}), {}, {});
    CHECK(model.num_cells() == grid.num_cells());
    REQUIRE(model.connections.size() == grid.internal_faces().size());
    for (std::size_t i = 0; i < model.connections.size(); ++i) {
        CHECK(model.connections[i].a == grid.internal_faces()[i].cell_a);
        CHECK(model.connections[i].b == grid.internal_faces()[i].cell_b);
        CHECK(model.connections[i].kind == ConnectionKind::matrix_matrix);
    }
}

TEST_CASE("fracture file round trip")
{
    FractureNetwork net;
    net.fractures.push_back(trace({1.25, 2.5}, {30.125, 40}));
    net.fractures.push_back(trace({0.1, 0.2}, {0.3, 0.4}));
    std::ostringstream out;
    write_fracture_network(out, net);
    std::istringstream in(out.str());
    const auto back = read_fracture_network(in, "mem", {50, 50, 1}, 0.5);
    REQUIRE(back.size() == 2);
    CHECK(back.fractures[0].start == net.fractures[0].start);
    CHECK(back.fractures[0].end == net.fractures[0].end);
    CHECK(back.fractures[1].permeability == doctest::Approx(net.fractures[1].permeability).epsilon(1e-12));

    std::istringstream bad("1 2 3\n");
    CHECK_THROWS_AS(read_fracture_network(bad, "bad.frac", {50, 50, 1}, 0.5), ConfigError);
    std::istringstream outside("0 0 80 10 0.04 1000\n");
    CHECK_THROWS_AS(read_fracture_network(outside, "out.frac", {50, 50, 1}, 0.5), ConfigError);
}
