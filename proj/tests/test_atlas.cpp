#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cwlab/atlas.hpp"
#include "cwlab/oracle.hpp"

using namespace cwlab;

namespace {

Box full_region(const GridSpace& sp) { return Box::rectangle(sp, 0, 0, sp.width(), sp.height()); }

int chebyshev_ring(const GridSpace& sp, CellIndex c, int cx, int cy) {
    return std::max(std::abs(sp.col(c) - cx), std::abs(sp.row(c) - cy));
}

}  // namespace

TEST_CASE("rectangle boxes mark their rim") {
    auto sp = GridSpace::rectangle({0, 1, 0, 1}, 16);
    Box b = Box::rectangle(sp, 2, 3, 5, 4);
    CHECK(b.cells.size() == 20);
    CHECK(b.boundary.size() == 14);
    CHECK(b.diameter == doctest::Approx(std::hypot(4.0, 3.0) * sp.cell_size()));
    CHECK(Box::rectangle(sp, 2, 3, 5, 4, false).diameter == 0.0);
}

TEST_CASE("horizontal atlas: leaves are rows and charts agree") {
    auto sp = GridSpace::rectangle({0, 1, 0, 1}, 32);
    Atlas a = horizontal_atlas(full_region(sp), 0.25);
    CHECK(compatibility_check(a).ok);
    CHECK(oracle::compatible(a));
    CHECK(a.leaf_count() == 32);
    const CellIndex x = sp.index(3, 7);
    CellSet row;
    {
        std::vector<CellIndex> cells;
        for (int c = 0; c < 32; ++c) cells.push_back(sp.index(c, 7));
        row = CellSet(sp, cells);
    }
    CHECK(leaf(a, x) == row);
    for (int id : a.plaques_at(x)) CHECK(a.plaque(id).contains(x));
}

TEST_CASE("plaque metric: infinite across leaves, bounded by chains, matches the oracle") {
    auto sp = GridSpace::rectangle({0, 1, 0, 1}, 16);
    Atlas a = horizontal_atlas(full_region(sp), 0.25);
    CHECK(std::isinf(plaque_metric(a, sp.index(1, 1), sp.index(1, 2))));
    CHECK(shortest_chain(a, sp.index(1, 1), sp.index(1, 2)).plaques.empty());
    std::mt19937_64 rng(9);
    for (int t = 0; t < 10; ++t) {
        const int row = static_cast<int>(rng() % 16);
        const CellIndex x = sp.index(static_cast<int>(rng() % 16), row), y = sp.index(static_cast<int>(rng() % 16), row);
        const double d = plaque_metric(a, x, y);
        CHECK(d == doctest::Approx(oracle::plaque_metric(a, x, y)));
        CHECK(d >= sp.cell_metric(x, y) - 1e-12);
        const Chain ch = shortest_chain(a, x, y);
        CHECK(ch.valid(a));
        CHECK(ch.weight(a) == doctest::Approx(d));
        CHECK(a.plaque(ch.plaques.front()).contains(x));
        CHECK(a.plaque(ch.plaques.back()).contains(y));
    }
}

TEST_CASE("finer horizontal atlases approach the row distance") {
    auto sp = GridSpace::rectangle({0, 1, 0, 1}, 128);
    const CellIndex x = sp.index(10, 60), y = sp.index(110, 60);
    double previous = INFINITY;
    for (double scale : {0.2, 0.1, 0.05}) {
        const double d = plaque_metric(horizontal_atlas(full_region(sp), scale), x, y);
        CHECK(d < previous);
        previous = d;
    }
    CHECK(previous <= 1.1 * sp.cell_metric(x, y));
}

TEST_CASE("incompatible charts are reported with a witness") {
    auto sp = GridSpace::rectangle({0, 1, 0, 1}, 16);
    Box left = Box::rectangle(sp, 0, 0, 10, 16), right = Box::rectangle(sp, 6, 0, 10, 16);
    Atlas a(full_region(sp), {{left, horizontal_foliation(left.cells)}, {right, vertical_foliation(right.cells)}});
    auto rep = compatibility_check(a);
    CHECK_FALSE(rep.ok);
    REQUIRE(rep.witness.has_value());
    CHECK(left.cells.intersect(right.cells).contains(*rep.witness));
    CHECK_FALSE(oracle::compatible(a));
    // The overlap joins every row to columns 6..9; columns 10..15 stay separate leaves.
    CHECK(a.leaf_count() == 7);
}

TEST_CASE("a triod leaf is the only branched one") {
    auto sp = GridSpace::rectangle({0, 1, 0, 1}, 16);
    Box region = full_region(sp);
    std::vector<CellIndex> triod;
    for (int c = 2; c <= 13; ++c) triod.push_back(sp.index(c, 8));
    for (int r = 2; r < 8; ++r) triod.push_back(sp.index(8, r));
    std::sort(triod.begin(), triod.end());
    const CellSet t(sp, triod);
    std::vector<int> labels;
    int next = 1;
    for (CellIndex c : region.cells.cells()) labels.push_back(t.contains(c) ? 0 : next++);
    Atlas a(region, {{region, LabelField::from_labels(region.cells, labels)}});
    auto rep = leaf_genericity_report(a, 0, 1);
    CHECK(rep.samples == static_cast<int>(region.cells.size()));
    CHECK(rep.branched == static_cast<int>(triod.size()));
    CHECK(rep.branch_free_fraction == doctest::Approx(1.0 - static_cast<double>(triod.size()) / region.cells.size()));
    REQUIRE_FALSE(rep.branch_witnesses.empty());
    CHECK(t.contains(rep.branch_witnesses.front()));
}

TEST_CASE("closed rings stay inside the region, cut leaves escape") {
    auto sp = GridSpace::rectangle({0, 1, 0, 1}, 32);
    std::vector<CellIndex> annulus;
    for (CellIndex c = 0; c < sp.cell_count(); ++c) {
        const int k = chebyshev_ring(sp, c, 16, 16);
        if (k >= 4 && k <= 12) annulus.push_back(c);
    }
    Box region = Box::from_cells(CellSet(sp, annulus));
    auto field = LabelField::from_key(region.cells, [&](CellIndex c) { return chebyshev_ring(sp, c, 16, 16); });
    Atlas a(region, {{region, field}});
    auto probe = leaf_compactness_probe(a, sp.index(16 + 8, 16));
    CHECK(probe.finite_cover);
    CHECK(probe.leaf_cells == 8u * 8);
    CHECK(probe.plaque_count == 1);

    // Rows end at the rectangle's edge, a compact arc, but a cut region lets them escape.
    CHECK(leaf_compactness_probe(horizontal_atlas(full_region(sp), 0.25), sp.index(5, 5)).finite_cover);
    Atlas cut = horizontal_atlas(Box::rectangle(sp, 0, 0, 20, 32), 0.25);
    CHECK_FALSE(leaf_compactness_probe(cut, sp.index(5, 5)).finite_cover);
}

TEST_CASE("stable atlas of the cat map at desk scale") {
    auto m = SurfaceMap::torus_anosov();
    auto sp = m.make_space(96);
    Atlas a = stable_atlas(m, 0.15, 10, 0.1, sp);
    CHECK(compatibility_check(a).ok);
    for (const auto& ch : a.charts()) CHECK(is_cw_decomposition(ch.field, ch.box.disc()).ok);
    CHECK(leaf_genericity_report(a, 200, 4).branch_free_fraction >= 0.95);
    CHECK_THROWS_AS(stable_atlas(SurfaceMap::identity(), 0.15, 10, 0.1, sp), Error);
    CHECK_THROWS_AS(stable_atlas(m, 0.05, 10, 0.1, sp), Error);
}
