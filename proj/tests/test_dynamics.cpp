#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cwlab/dynamics.hpp"
#include "cwlab/oracle.hpp"

using namespace cwlab;

namespace {
const double kPhi = (1.0 + std::sqrt(5.0)) / 2.0;
}

TEST_CASE("map and inverse are mutually inverse on both surfaces") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto m : {SurfaceMap::torus_anosov(), SurfaceMap::sphere_pseudo_anosov()})
        for (int t = 0; t < 200; ++t) {
            Point p = m.canonical({u(rng), u(rng)});
            CHECK(m.metric(m.inverse(m.forward(p)), p) < 1e-12);
            CHECK(m.metric(orbit(m, orbit(m, p, 5), -5), p) < 1e-9);
        }
}

TEST_CASE("sphere metric identifies antipodal points") {
    auto s = SurfaceMap::sphere_pseudo_anosov();
    CHECK(s.metric({0.2, 0.1}, s.canonical({-0.2, -0.1})) < 1e-12);
    CHECK(s.prongs().size() == 4);
    CHECK(SurfaceMap::torus_anosov().prongs().empty());
}

TEST_CASE("eigen-data of the cat map") {
    auto m = SurfaceMap::torus_anosov();
    CHECK(m.hyperbolic());
    CHECK(m.unstable_eigenvalue() == doctest::Approx(kPhi * kPhi));
    CHECK(m.stable_eigenvalue() * m.unstable_eigenvalue() == doctest::Approx(1.0));
    CHECK_FALSE(SurfaceMap::identity().hyperbolic());
    CHECK(map_kind_from_string(to_string(MapKind::SpherePseudoAnosov)) == MapKind::SpherePseudoAnosov);
    CHECK_THROWS_AS(map_kind_from_string("baker"), Error);
}

TEST_CASE("principal axes and line angles") {
    CHECK(line_angle_gap(0.1, 0.1 + std::numbers::pi) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(line_angle_gap(0.0, std::numbers::pi / 2) == doctest::Approx(std::numbers::pi / 2));
    std::vector<Point> line;
    for (int i = 0; i < 20; ++i) line.push_back({i * 0.1, i * 0.1});
    CHECK(principal_axis_angle(line) == doctest::Approx(std::numbers::pi / 4));
}

TEST_CASE("finite-horizon plaques follow the eigendirections") {
    auto m = SurfaceMap::torus_anosov();
    auto sp = m.make_space(256);
    auto st = finite_horizon_plaque(m, {{0.3, 0.7}, 0.15, 10, Direction::Stable}, sp);
    auto un = finite_horizon_plaque(m, {{0.3, 0.7}, 0.15, 10, Direction::Unstable}, sp);
    const double deg = std::numbers::pi / 180.0;
    CHECK(line_angle_gap(principal_axis_angle(st.lifts), std::atan(-kPhi)) <= 5 * deg);
    CHECK(line_angle_gap(principal_axis_angle(un.lifts), std::atan(1.0 / kPhi)) <= 5 * deg);
    for (double d : st.horizon_diameters) CHECK(d <= 0.15 + 1e-12);
    CHECK(st.cells.set().contains(st.base_cell));
    CHECK(st.lifts.size() == st.cells.set().size());
}

TEST_CASE("local stable sets contain the base and contract") {
    auto m = SurfaceMap::torus_anosov();
    auto sp = m.make_space(128);
    // Off-center points drift out of their own cell's orbit tube, so start at a center.
    Point p = sp.center(*sp.locate({0.41, 0.23}));
    CellSet w = local_stable_set(m, p, 0.1, 6, sp);
    CHECK(w.contains(*sp.locate(p)));
    for (CellIndex c : w.cells()) CHECK(m.metric(orbit(m, sp.center(c), 6), orbit(m, p, 6)) <= 0.1 + 1e-12);
}

TEST_CASE("cwn estimate on the torus and the sphere") {
    auto t = SurfaceMap::torus_anosov();
    auto rt = cwn_estimate(t, 0.15, 10, 12, 7, t.make_space(256));
    CHECK(rt.max_count == 1);
    CHECK(rt.samples.size() == 12);
    auto s = SurfaceMap::sphere_pseudo_anosov();
    auto rs = cwn_estimate(s, 0.15, 10, 12, 3, s.make_space(256));
    CHECK(rs.max_count <= 2);
    for (const auto& smp : rs.samples) CHECK(std::isfinite(smp.prong_distance));
    // Same seed, same report.
    auto again = cwn_estimate(t, 0.15, 10, 12, 7, t.make_space(256));
    CHECK(again.histogram == rt.histogram);
}

TEST_CASE("the identity map has no contracting plaques") {
    auto id = SurfaceMap::identity();
    CHECK_THROWS_AS(cwn_estimate(id, 0.15, 10, 3, 1, id.make_space(64)), Error);
}

TEST_CASE("expansivity floor matches the pairwise oracle") {
    for (auto m : {SurfaceMap::torus_anosov(), SurfaceMap::sphere_pseudo_anosov()}) {
        auto sp = m.make_space(20);
        auto fast = expansivity_floor(m, 2, sp);
        CHECK(fast.value == doctest::Approx(oracle::expansivity_floor(m, 2, sp)));
        CHECK(fast.resolution == 20);
    }
}

TEST_CASE("Cantor set inside a stable set") {
    auto m = SurfaceMap::sphere_pseudo_anosov();
    auto sp = m.make_space(256);
    CantorParams p;
    p.eps = 0.3;
    p.levels = 2;
    p.orbit_budget = 400;
    p.seed = 3;
    auto r = cantor_in_stable(m, p, sp);
    REQUIRE_MESSAGE(r.complete, r.diagnostic);
    CHECK(r.points.size() == 8);
    for (std::size_t i = 0; i < r.points.size(); ++i)
        for (std::size_t j = i + 1; j < r.points.size(); ++j) CHECK(m.metric(r.points[i], r.points[j]) > 0.0);
    CHECK(joint_stability(m, r.points, p.horizon) <= p.eps);
}
