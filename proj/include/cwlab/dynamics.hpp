#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cwlab/geometry.hpp"

namespace cwlab {

enum class MapKind { TorusAnosov, SpherePseudoAnosov, Identity };

std::string to_string(MapKind kind);
MapKind map_kind_from_string(const std::string& name);

/// A toral automorphism, optionally pushed to the sphere T^2 / (p ~ -p).
///
/// Points are handled in chart coordinates: the unit square for the torus and
/// the fundamental domain [0,1] x [0,1/2) for the sphere quotient.
class SurfaceMap {
public:
    static SurfaceMap torus_anosov();
    static SurfaceMap sphere_pseudo_anosov();
    static SurfaceMap identity();
    static SurfaceMap from_kind(MapKind kind);

    MapKind kind() const { return kind_; }
    bool quotient() const { return kind_ == MapKind::SpherePseudoAnosov; }
    SpaceKind space_kind() const { return quotient() ? SpaceKind::SphereQuotient : SpaceKind::Torus; }
    GridSpace make_space(int resolution) const;

    Point forward(Point p) const;
    Point inverse(Point p) const;
    /// Chart representative of a point of the plane.
    Point canonical(Point p) const;
    /// Distance in the surface (torus metric, or its quotient by p ~ -p).
    double metric(Point a, Point b) const;

    /// Integer matrix acting on the covering plane.
    const std::array<int, 4>& matrix() const { return m_; }
    bool hyperbolic() const { return hyperbolic_; }
    double stable_eigenvalue() const { return lambda_s_; }
    double unstable_eigenvalue() const { return lambda_u_; }
    /// Unit eigenvectors in the plane; meaningless unless hyperbolic().
    Point stable_direction() const { return e_s_; }
    Point unstable_direction() const { return e_u_; }
    /// Chart points of the quotient's cone points (the 1-prongs); empty on the torus.
    std::vector<Point> prongs() const;

private:
    explicit SurfaceMap(MapKind kind, std::array<int, 4> m);
    MapKind kind_;
    std::array<int, 4> m_;
    std::array<int, 4> inv_;
    bool hyperbolic_ = false;
    double lambda_s_ = 1.0, lambda_u_ = 1.0;
    Point e_s_{}, e_u_{};
};

/// f^n(p) for signed n.
Point orbit(const SurfaceMap& m, Point p, int n);

enum class Direction { Stable, Unstable };

struct StablePlaqueSpec {
    Point base;
    double delta = 0.1;
    int horizon = 0;
    Direction direction = Direction::Stable;
};

struct FiniteHorizonPlaque {
    Continuum cells;
    CellIndex base_cell = 0;
    /// Per cell of `cells` (same order), the evaluation point lifted to the plane.
    std::vector<Point> lifts;
    /// Diameter of the image of the evaluation points at each horizon step.
    std::vector<double> horizon_diameters;
};

/// Greedy connected set through the base with all iterates of diameter at most delta.
FiniteHorizonPlaque finite_horizon_plaque(const SurfaceMap& m, const StablePlaqueSpec& request, const GridSpace& space);

/// Angle in radians of the principal axis of a point cloud, in (-pi/2, pi/2].
double principal_axis_angle(const std::vector<Point>& pts);
/// Smallest angle between two undirected lines with the given angles.
double line_angle_gap(double a, double b);

/// Cells whose centers stay eps-close to the orbit of p for n in [0, N].
CellSet local_stable_set(const SurfaceMap& m, Point p, double eps, int horizon, const GridSpace& space);

struct CwnSample {
    Point x;
    Point y;
    int count = 0;
    double prong_distance = 0.0;  // distance of x to the nearest prong, +inf without prongs
};

struct CwnReport {
    std::vector<CwnSample> samples;
    int max_count = 0;
    std::vector<int> histogram;  // histogram[k] = samples with count k
    std::vector<std::size_t> witnesses;  // sample indices achieving the max
};

/// Intersects stable plaques at x with unstable plaques at nearby y.
/// Throws when a plaque never contracts below its diameter budget.
CwnReport cwn_estimate(const SurfaceMap& m, double delta, int horizon, int samples, std::uint64_t seed,
                       const GridSpace& space);

struct CantorParams {
    double eps = 0.2;
    int levels = 3;
    int orbit_budget = 2000;
    int horizon = 10;
    std::uint64_t seed = 1;
};

struct CantorResult {
    bool complete = false;
    int level_reached = -1;
    std::string diagnostic;
    Point base;
    std::vector<Point> points;
    std::vector<double> arc_parameters;  // signed unstable-arc length from the base
    std::vector<double> stable_offsets;  // shifts used at each level
};

CantorResult cantor_in_stable(const SurfaceMap& m, const CantorParams& params, const GridSpace& space);

/// Largest pairwise distance of the points' iterates over [0, N].
double joint_stability(const SurfaceMap& m, const std::vector<Point>& pts, int horizon);

struct CapacitorResult {
    std::optional<Continuum> crossing;
    int samples_tried = 0;
    int deepest_level = 0;
    std::string note;
};

/// Looks for an unstable continuum in clos(G) near x joining the plates A and B.
/// Throws naming the failed capacitor condition.
CapacitorResult capacitor_cross(const SurfaceMap& m, const CellSet& a, const CellSet& b, const CellSet& g, double r,
                                Point x, double delta, int horizon, const GridSpace& space);

struct ExpansivityFloor {
    int resolution = 0;
    double value = 0.0;
    bool at_grid_floor = false;
};

/// Largest grid multiple no pair of distinct cells stays within over n in [-N, N].
ExpansivityFloor expansivity_floor(const SurfaceMap& m, int horizon, const GridSpace& space);

}  // namespace cwlab
