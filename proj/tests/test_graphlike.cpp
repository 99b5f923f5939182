#include <doctest.h>

#include <cmath>

#include "cwlab/graphlike.hpp"

using namespace cwlab;

TEST_CASE("generators produce valid graph-like continua") {
    for (int res : {64, 128}) {
        CHECK(validate_graphlike(make_flat_row(res).cells).ok);
        CHECK(validate_graphlike(make_cocarc(res).cells).ok);
        CHECK(validate_graphlike(make_sin_one_over_x(res).cells).ok);
        CHECK(validate_graphlike(make_cantor_square(res).cells).ok);
    }
}

TEST_CASE("graph-like validation names the offending column") {
    auto sp = GridSpace::rectangle({0, 1, 0, 1}, 16);
    // Two runs in column 5.
    std::vector<CellIndex> cells;
    for (int c = 0; c < 16; ++c) cells.push_back(sp.index(c, 8));
    cells.push_back(sp.index(5, 4));
    auto bad = validate_graphlike(CellSet(sp, cells));
    CHECK_FALSE(bad.ok);
    CHECK(bad.column == std::optional<int>(5));
    CHECK_THROWS_AS(make_graphlike(CellSet(sp, cells)), Error);

    // Touching the top row is not allowed either.
    std::vector<CellIndex> top;
    for (int c = 0; c < 16; ++c) top.push_back(sp.index(c, 15));
    CHECK_FALSE(validate_graphlike(CellSet(sp, top)).ok);
}

TEST_CASE("flow time above a flat row is -ln y") {
    auto fd = flow_decomposition(make_flat_row(128));
    const auto& sp = fd.field.space();
    const int mid = sp.width() / 2;
    for (int row = 0; row < sp.height(); ++row) {
        const CellIndex c = sp.index(mid, row);
        const double y = sp.center(c).y;
        if (y < 0.05 || y > 0.95) continue;
        CHECK(fd.time[static_cast<std::size_t>(c)] == doctest::Approx(-std::log(y)).epsilon(0.01));
    }
    for (CellIndex c : fd.source.cells.cells()) CHECK(std::isinf(fd.time[static_cast<std::size_t>(c)]));
}

TEST_CASE("flow decompositions have arc quotients") {
    for (auto make : {make_flat_row, make_cocarc, make_sin_one_over_x, make_cantor_square}) {
        auto fd = flow_decomposition(make(128));
        auto g = quotient_graph(fd.field, false);
        CHECK(g.is_path());
        CHECK(fd.field.plaque_at(fd.source.cells.cells().front()).is_subset_of(fd.field.domain()));
        CHECK(fd.source.cells.is_subset_of(fd.field.plaque(fd.c_plaque)));
        CHECK(static_cast<int>(fd.band_order.size()) == fd.field.plaque_count());
    }
}

TEST_CASE("contact sets of the flat row coincide, those of the cocarc do not") {
    auto flat = flow_decomposition(make_flat_row(64));
    CHECK(hausdorff_distance(flat.upper_contact, flat.lower_contact) == 0.0);
    auto coc = flow_decomposition(make_cocarc(64));
    CHECK(hausdorff_distance(coc.upper_contact, coc.lower_contact) >= 0.45);
}

TEST_CASE("cocarc semicontinuity is asymmetric") {
    DecompositionGenerator gen = [](int r) { return flow_decomposition(make_cocarc(r)).field; };
    auto at_x = semicontinuity_profile(gen, {0.0, 0.5}, {128});
    CHECK(at_x.entries.front().symmetric_defect <= 2 * at_x.entries.front().cell_size + 1e-12);
    CHECK(at_x.upper_semicontinuous());
    auto at_y = semicontinuity_profile(gen, {0.0, 0.0}, {64, 128});
    for (const auto& e : at_y.entries) CHECK(e.symmetric_defect >= 0.2);
    CHECK(at_y.upper_semicontinuous());
}

TEST_CASE("ternary to binary map on Cantor points") {
    CHECK(ternary_binary_map(0.0) == 0.0);
    CHECK(ternary_binary_map(2.0 / 3.0) == doctest::Approx(0.5));
    CHECK(ternary_binary_map(2.0 / 9.0) == doctest::Approx(0.25));
    CHECK(ternary_binary_map(2.0 / 3.0 + 2.0 / 9.0) == doctest::Approx(0.75));
    CHECK_THROWS_AS(ternary_binary_map(0.5), Error);
    CHECK(cantor_left_endpoint(2.0 / 3.0, 3));
    CHECK_FALSE(cantor_left_endpoint(0.5, 3));
}

TEST_CASE("backgammon space is one connected leaf") {
    auto b = make_backgammon(128);
    CHECK(is_connected(b.x));
    CHECK(b.depth >= 1);
    CHECK(b.q_u.domain().is_subset_of(b.x));
    CHECK(b.q_v.domain().is_subset_of(b.x));
}

TEST_CASE("anomalous stable set gains local components as the grid refines") {
    int previous = 0;
    for (int res : {64, 128, 256}) {
        auto f = make_anomalous_stable_set(res);
        CHECK(is_connected(f));
        const int count = punctured_component_count(f, {0, 0}, 0.1);
        CHECK(count > previous);
        previous = count;
    }
}
