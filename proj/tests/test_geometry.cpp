#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cwlab/geometry.hpp"
#include "cwlab/oracle.hpp"

using namespace cwlab;

namespace {

CellSet random_set(const GridSpace& sp, double density, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(density);
    std::vector<CellIndex> cells;
    for (CellIndex c = 0; c < sp.cell_count(); ++c)
        if (coin(rng)) cells.push_back(c);
    if (cells.empty()) cells.push_back(static_cast<CellIndex>(rng() % static_cast<std::uint64_t>(sp.cell_count())));
    return CellSet(sp, std::move(cells));
}

std::vector<GridSpace> small_spaces(int res) {
    return {GridSpace::rectangle({0, 1, 0, 1}, res), GridSpace::torus(res), GridSpace::sphere_quotient(res)};
}

// Minimum over the two sheets and nearby integer translates.
double brute_metric(SpaceKind kind, Point a, Point b) {
    if (kind == SpaceKind::Rectangle) return std::hypot(a.x - b.x, a.y - b.y);
    double best = INFINITY;
    for (int sign : {1, -1}) {
        if (sign < 0 && kind == SpaceKind::Torus) continue;
        for (int i = -2; i <= 2; ++i)
            for (int j = -2; j <= 2; ++j)
                best = std::min(best, std::hypot(a.x - (sign * b.x + i), a.y - (sign * b.y + j)));
    }
    return best;
}

}  // namespace

TEST_CASE("cell centers round-trip through locate") {
    for (const auto& sp : small_spaces(16))
        for (CellIndex c = 0; c < sp.cell_count(); ++c) {
            auto back = sp.locate(sp.center(c));
            REQUIRE(back.has_value());
            CHECK(*back == c);
        }
}

TEST_CASE("grid shapes follow the chart") {
    CHECK(GridSpace::torus(32).height() == 32);
    CHECK(GridSpace::sphere_quotient(32).height() == 16);
    CHECK_THROWS_AS(GridSpace::sphere_quotient(33), Error);
    CHECK_THROWS_AS(GridSpace::torus(4), Error);
    auto nr = GridSpace::node_rectangle({0, 1, 0, 1}, 16);
    CHECK(nr.center(0).x == doctest::Approx(0.0));
    CHECK(nr.center(nr.index(nr.width() - 1, 0)).x == doctest::Approx(1.0));
}

TEST_CASE("surface metrics agree with the brute-force minimum over identifications") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const auto& sp : small_spaces(16))
        for (int t = 0; t < 300; ++t) {
            Point a{u(rng), u(rng) * (sp.bounds().y1 - sp.bounds().y0)}, b{u(rng), u(rng) * (sp.bounds().y1 - sp.bounds().y0)};
            CHECK(sp.metric(a, b) == doctest::Approx(brute_metric(sp.kind(), a, b)).epsilon(1e-12));
        }
    auto t = GridSpace::torus(64);
    CHECK(t.metric({0.01, 0.5}, {0.99, 0.5}) == doctest::Approx(0.02));
}

TEST_CASE("offsets wrap on closed surfaces and stop at rectangle edges") {
    auto r = GridSpace::rectangle({0, 1, 0, 1}, 8);
    CHECK_FALSE(r.offset(0, -1, 0).has_value());
    auto t = GridSpace::torus(8);
    CHECK(t.offset(0, -1, 0) == std::optional<CellIndex>(t.index(7, 0)));
    // Stepping off the sphere chart's top edge lands on the antipodal column.
    auto s = GridSpace::sphere_quotient(8);
    auto up = s.offset(s.index(1, s.height() - 1), 0, 1);
    REQUIRE(up.has_value());
    CHECK(s.cell_metric(*up, s.index(1, s.height() - 1)) == doctest::Approx(s.cell_size()));
    int n = 0;
    s.for_each_neighbor8(s.index(2, 0), [&](CellIndex) { ++n; });
    CHECK(n == 8);
    // The corner cell sits on a cone point, where two neighbours coincide.
    n = 0;
    s.for_each_neighbor8(s.index(0, 0), [&](CellIndex) { ++n; });
    CHECK(n == 7);
}

TEST_CASE("set algebra matches std::set operations") {
    std::mt19937_64 rng(2);
    auto sp = GridSpace::torus(16);
    for (int t = 0; t < 20; ++t) {
        CellSet a = random_set(sp, 0.3, rng), b = random_set(sp, 0.3, rng);
        std::vector<CellIndex> want;
        std::set_union(a.cells().begin(), a.cells().end(), b.cells().begin(), b.cells().end(), std::back_inserter(want));
        CHECK(a.unite(b) == CellSet(sp, want));
        want.clear();
        std::set_intersection(a.cells().begin(), a.cells().end(), b.cells().begin(), b.cells().end(), std::back_inserter(want));
        CHECK(a.intersect(b) == CellSet(sp, want));
        want.clear();
        std::set_difference(a.cells().begin(), a.cells().end(), b.cells().begin(), b.cells().end(), std::back_inserter(want));
        CHECK(a.subtract(b) == CellSet(sp, want));
        CHECK(a.intersect(b).is_subset_of(a));
    }
}

TEST_CASE("components agree with the flood-fill oracle") {
    std::mt19937_64 rng(3);
    for (const auto& sp : small_spaces(14))
        for (int t = 0; t < 6; ++t) {
            CellSet s = random_set(sp, 0.4, rng);
            auto ids = oracle::component_ids(s);
            auto comps = components(s);
            CHECK(static_cast<int>(comps.size()) == *std::max_element(ids.begin(), ids.end()) + 1);
            // Two cells share a component exactly when the oracle says so.
            std::vector<int> mine(s.size());
            for (std::size_t k = 0; k < comps.size(); ++k)
                for (CellIndex c : comps[k].set().cells())
                    mine[static_cast<std::size_t>(std::lower_bound(s.cells().begin(), s.cells().end(), c) - s.cells().begin())] = static_cast<int>(k);
            for (std::size_t i = 0; i < ids.size(); ++i)
                for (std::size_t j = 0; j < ids.size(); ++j) CHECK((ids[i] == ids[j]) == (mine[i] == mine[j]));
        }
}

TEST_CASE("continuum rejects disconnected sets") {
    auto sp = GridSpace::rectangle({0, 1, 0, 1}, 8);
    CHECK_THROWS_AS(Continuum(CellSet(sp, {0, 5})), Error);
    CHECK_NOTHROW(Continuum(CellSet(sp, {0, 9})));  // diagonal neighbours
    CHECK_THROWS_AS(Continuum(CellSet(sp, {})), Error);
}

TEST_CASE("distance transform, Hausdorff distance and diameter match brute force") {
    std::mt19937_64 rng(4);
    for (const auto& sp : small_spaces(16)) {
        for (int t = 0; t < 4; ++t) {
            CellSet s = random_set(sp, 0.05, rng);
            auto df = distance_transform(s);
            for (CellIndex c = 0; c < sp.cell_count(); ++c) CHECK(df.at(c) == oracle::distance_to_set(s, sp.center(c)));
            CellSet b = random_set(sp, 0.1, rng);
            CHECK(hausdorff_distance(s, b) == oracle::hausdorff(s, b));
            CHECK(diameter(b) == doctest::Approx(oracle::diameter(b)).epsilon(1e-12));
        }
    }
}

TEST_CASE("Hausdorff distance is a metric on random triples") {
    std::mt19937_64 rng(6);
    auto sp = GridSpace::torus(24);
    for (int t = 0; t < 30; ++t) {
        CellSet a = random_set(sp, 0.05, rng), b = random_set(sp, 0.05, rng), c = random_set(sp, 0.05, rng);
        CHECK(hausdorff_distance(a, a) == 0.0);
        CHECK(hausdorff_distance(a, b) == hausdorff_distance(b, a));
        CHECK(hausdorff_distance(a, c) <= hausdorff_distance(a, b) + hausdorff_distance(b, c) + 1e-12);
        if (!(a == b)) CHECK(hausdorff_distance(a, b) > 0.0);
        CHECK(hausdorff_excess(a, a.unite(b)) == 0.0);
    }
}

TEST_CASE("Whitney size vanishes on singletons and grows strictly with the set") {
    std::mt19937_64 rng(7);
    auto sp = GridSpace::rectangle({0, 1, 0, 1}, 16);
    for (CellIndex c : {0, 37, 255}) CHECK(whitney_size(CellSet(sp, {c})) == 0.0);
    for (int t = 0; t < 30; ++t) {
        CellSet a = random_set(sp, 0.1, rng);
        CellSet extra = random_set(sp, 0.02, rng);
        CellSet big = a.unite(extra);
        if (big == a) continue;
        CHECK(whitney_size(a) < whitney_size(big));
    }
}

TEST_CASE("balls and boundary cells") {
    auto sp = GridSpace::rectangle({0, 1, 0, 1}, 32);
    CellSet b = ball(sp, {0.5, 0.5}, 0.2);
    for (CellIndex c : b.cells()) CHECK(sp.metric(sp.center(c), {0.5, 0.5}) <= 0.2);
    CellSet rim = boundary_cells(CellSet::full(sp));
    CHECK(rim.size() == static_cast<std::size_t>(4 * 32 - 4));
    // A full torus has no rim.
    CHECK(boundary_cells(CellSet::full(GridSpace::torus(16))).empty());
}
