#include <doctest.h>

#include <random>
#include <set>

#include "cwlab/decomposition.hpp"
#include "cwlab/graphlike.hpp"
#include "cwlab/oracle.hpp"

using namespace cwlab;

namespace {

GridSpace unit_square(int res) { return GridSpace::rectangle({0, 1, 0, 1}, res); }
GridSpace centered_square(int res) { return GridSpace::rectangle({-0.5, 0.5, -0.5, 0.5}, res); }

// A random connected subset grown from a seed cell.
CellSet random_blob(const CellSet& within, std::size_t target, std::mt19937_64& rng) {
    const auto& sp = within.space();
    const auto mask = within.mask();
    std::vector<CellIndex> grown{within.cells()[rng() % within.size()]};
    std::set<CellIndex> in(grown.begin(), grown.end());
    while (grown.size() < target) {
        const CellIndex from = grown[rng() % grown.size()];
        std::vector<CellIndex> options;
        sp.for_each_neighbor8(from, [&](CellIndex n) {
            if (mask[static_cast<std::size_t>(n)] && !in.count(n)) options.push_back(n);
        });
        if (options.empty()) continue;
        const CellIndex pick = options[rng() % options.size()];
        in.insert(pick);
        grown.push_back(pick);
    }
    return CellSet(sp, std::vector<CellIndex>(in.begin(), in.end()));
}

}  // namespace

TEST_CASE("label fields reject plaques that are not connected") {
    auto sp = unit_square(8);
    CellSet dom = CellSet::full(sp);
    std::vector<int> labels(dom.size(), 0);
    labels[0] = 1;
    labels[63] = 1;
    CHECK_THROWS_AS(LabelField::from_labels(dom, labels), Error);
    labels[63] = 0;
    auto f = LabelField::from_labels(dom, labels);
    CHECK(f.plaque_count() == 2);
    CHECK(f.plaque_at(0).size() == 1);
}

TEST_CASE("restricting twice equals restricting once") {
    std::mt19937_64 rng(11);
    auto sp = centered_square(24);
    CellSet full = CellSet::full(sp);
    std::vector<LabelField> fields{horizontal_foliation(full), sheared_foliation(full, 0.3), quadratic_foliation(full)};
    for (const auto& q : fields)
        for (int t = 0; t < 20; ++t) {
            CellSet y = random_blob(full, 260, rng);
            CellSet z = random_blob(y, 90, rng);
            CHECK(monotone_restriction(monotone_restriction(q, y), z) == monotone_restriction(q, z));
        }
}

TEST_CASE("restriction keeps the component of each plaque through the cell") {
    auto sp = unit_square(8);
    CellSet full = CellSet::full(sp);
    auto q = horizontal_foliation(full);
    // Cut row 2 in the middle: its two halves become separate plaques.
    std::vector<CellIndex> keep;
    for (CellIndex c : full.cells())
        if (!(sp.row(c) == 2 && sp.col(c) == 4)) keep.push_back(c);
    auto r = monotone_restriction(q, CellSet(sp, keep));
    CHECK(r.plaque_count() == q.plaque_count() + 1);
    CHECK(r.label_of(sp.index(0, 2)) != r.label_of(sp.index(7, 2)));
    CHECK(r.label_of(sp.index(0, 3)) == r.label_of(sp.index(7, 3)));
}

TEST_CASE("quotient graphs of foliations are arcs") {
    CellSet full = CellSet::full(unit_square(16));
    auto g = quotient_graph(horizontal_foliation(full));
    CHECK(g.node_count == 16);
    CHECK(g.is_path());
    CHECK(g.path_order().size() == 16);
    CHECK(is_dendrite_quotient(singleton_field(CellSet::full(GridSpace::torus(8)))).is_dendrite == false);
    CHECK_FALSE(is_dendrite_quotient(singleton_field(CellSet::full(GridSpace::torus(8)))).cycle.empty());
    auto single = quotient_graph(single_plaque_field(full));
    CHECK(single.node_count == 1);
    CHECK(single.is_tree());
}

TEST_CASE("cubical Euler characteristic and the dendrite proxy") {
    auto sp = unit_square(12);
    CHECK(cubical_euler_characteristic(CellSet(sp, {0})) == 1);
    // A 3x3 ring of cells around a hole.
    std::vector<CellIndex> ring;
    for (int x = 2; x <= 4; ++x)
        for (int y = 2; y <= 4; ++y)
            if (!(x == 3 && y == 3)) ring.push_back(sp.index(x, y));
    CHECK(cubical_euler_characteristic(CellSet(sp, ring)) == 0);
    CHECK(dendrite_proxy_failure(CellSet(sp, ring)).has_value());
    std::vector<CellIndex> block;
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y) block.push_back(sp.index(x, y));
    CHECK(has_solid_block(CellSet(sp, block)));
    CHECK(dendrite_proxy_failure(CellSet(sp, block)).value().find("3x3") != std::string::npos);
    std::vector<CellIndex> tee;
    for (int x = 0; x < 7; ++x) tee.push_back(sp.index(x, 6));
    for (int y = 0; y < 6; ++y) tee.push_back(sp.index(3, y));
    CHECK_FALSE(dendrite_proxy_failure(CellSet(sp, tee)).has_value());
}

TEST_CASE("cw check on foliations of the square") {
    Disc d = Disc::from_cells(CellSet::full(unit_square(20)));
    CHECK(d.boundary.size() == 4u * 20 - 4);
    CHECK(is_cw_decomposition(horizontal_foliation(d.cells), d).ok);
    Disc c = Disc::from_cells(CellSet::full(centered_square(20)));
    CHECK(is_cw_decomposition(quadratic_foliation(c.cells), c).ok);
    auto whole = is_cw_decomposition(single_plaque_field(d.cells), d);
    CHECK_FALSE(whole.ok);
    REQUIRE(whole.failed_plaque.has_value());
    // Singletons in the interior miss the boundary.
    auto singles = is_cw_decomposition(singleton_field(d.cells), d);
    CHECK_FALSE(singles.ok);
    CHECK(singles.diagnostics.front().find("misses boundary") != std::string::npos);
}

TEST_CASE("quotient points and separation on a tree quotient") {
    Disc d = Disc::from_cells(CellSet::full(unit_square(12)));
    auto q = horizontal_foliation(d.cells);
    const int bottom = q.label_of(0), middle = q.label_of(d.cells.space().index(0, 6));
    const int top = q.label_of(d.cells.space().index(0, 11));
    CHECK(classify_quotient_point(q, bottom).kind == PointClass::Kind::End);
    CHECK(classify_quotient_point(q, middle).kind == PointClass::Kind::Regular);
    auto sep = separating_plaque(q, bottom, middle, top);
    CHECK_FALSE(sep.plaque.has_value());
    CHECK(sep.explanation.find(std::to_string(middle)) != std::string::npos);
    CHECK_THROWS_AS(separating_plaque(q, bottom, bottom, top), Error);
}

TEST_CASE("product structure on horizontal and sheared foliations") {
    Disc d = Disc::from_cells(CellSet::full(unit_square(48)));
    auto h = product_structure(horizontal_foliation(d.cells), d);
    CHECK_MESSAGE(h.ok, h.diagnostic);
    CHECK(h.horizontality_error_cells <= 2.0);
    CHECK(h.injective);

    Disc s = Disc::from_cells(sheared_square(48, 0.3));
    auto sh = product_structure(sheared_foliation(s.cells, 0.3), s);
    CHECK_MESSAGE(sh.ok, sh.diagnostic);
    CHECK(sh.horizontality_error_cells <= 2.0);
}

TEST_CASE("product structure fails on the sine-curve flow decomposition") {
    auto fd = flow_decomposition(make_sin_one_over_x(128));
    Disc d = Disc::from_cells(fd.field.domain());
    auto p = product_structure(fd.field, d);
    CHECK_FALSE(p.ok);
    CHECK(p.diagnostic.rfind("plaque not arc-connected", 0) == 0);
}

TEST_CASE("horizontal and vertical foliations form a generating pair") {
    Disc d = Disc::from_cells(CellSet::full(unit_square(24)));
    auto h = horizontal_foliation(d.cells), v = vertical_foliation(d.cells);
    auto pp = pair_product_structure(h, v, d);
    CHECK_MESSAGE(pp.ok, pp.diagnostic);
    const CellIndex x = d.cells.space().index(12, 12);
    auto g = generating_pair_test(h, v, x, 0.2);
    CHECK_FALSE(g.witness.has_value());
    // A foliation paired with itself never crosses.
    auto same = pair_product_structure(h, h, d);
    CHECK_FALSE(same.ok);
    CHECK(same.witness.has_value());
}

TEST_CASE("tangent and one-sided pairs do not generate") {
    Disc d = Disc::from_cells(CellSet::full(GridSpace::rectangle({-0.5, 0.5, -0.5, 0.5}, 40)));
    const CellIndex origin = *d.cells.space().locate({0.0, 0.0});
    auto tangent = generating_pair_test(horizontal_foliation(d.cells), quadratic_foliation(d.cells), origin, 0.2);
    CHECK(tangent.delta == 0.0);
    auto one_sided = generating_pair_test(vertical_foliation(d.cells), one_sided_field(d.cells), origin, 0.2);
    CHECK(one_sided.delta == 0.0);
    CHECK(one_sided.witness.has_value());
    CHECK_FALSE(one_sided.failing_side.empty());
}

TEST_CASE("plaque arcs stay inside the plaque") {
    Disc d = Disc::from_cells(CellSet::full(centered_square(16)));
    auto q = quadratic_foliation(d.cells);
    const CellIndex x = d.cells.space().index(2, 8);
    const CellSet plaque = q.plaque_at(x);
    const CellIndex y = plaque.cells().back();
    auto arc = plaque_arc(q, x, y);
    REQUIRE_FALSE(arc.empty());
    CHECK(arc.front() == x);
    CHECK(arc.back() == y);
    for (CellIndex c : arc) CHECK(plaque.contains(c));
}
