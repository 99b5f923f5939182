#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cwlab {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using CellIndex = std::int32_t;

struct Point {
    double x = 0.0;
    double y = 0.0;
};

enum class SpaceKind { Rectangle, Torus, SphereQuotient };

std::string to_string(SpaceKind kind);
SpaceKind space_kind_from_string(const std::string& name);

struct Bounds {
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
};

/// Discretized compact surface chart.
///
/// Cells are indexed row-major, index = row * width + col, with row 0 at the
/// bottom. Torus is the unit square with periodic wrap; SphereQuotient is the
/// torus modulo p ~ -p, stored on the fundamental domain [0,1] x [0,1/2].
class GridSpace {
public:
    GridSpace() = default;

    static GridSpace rectangle(Bounds bounds, int resolution);
    /// Rectangle whose cell centers include the four edges of `bounds`:
    /// the boundary lines x = x0, x1 and y = y0, y1 are rows/columns of centers.
    static GridSpace node_rectangle(Bounds bounds, int resolution);
    static GridSpace torus(int resolution);
    static GridSpace sphere_quotient(int resolution);

    SpaceKind kind() const { return kind_; }
    int resolution() const { return resolution_; }
    double cell_size() const { return 1.0 / resolution_; }
    const Bounds& bounds() const { return bounds_; }
    int width() const { return width_; }
    int height() const { return height_; }
    CellIndex cell_count() const { return static_cast<CellIndex>(width_) * height_; }

    int col(CellIndex c) const { return c % width_; }
    int row(CellIndex c) const { return c / width_; }
    CellIndex index(int col, int row) const { return row * width_ + col; }
    bool in_range(CellIndex c) const { return c >= 0 && c < cell_count(); }

    Point center(CellIndex c) const;
    /// Cell containing `p`; nullopt outside a rectangle chart.
    std::optional<CellIndex> locate(Point p) const;

    /// Neighbor at integer offset, following the chart's identifications.
    std::optional<CellIndex> offset(CellIndex c, int dcol, int drow) const;
    void for_each_neighbor8(CellIndex c, const std::function<void(CellIndex)>& fn) const;
    void for_each_neighbor4(CellIndex c, const std::function<void(CellIndex)>& fn) const;

    double metric(Point a, Point b) const;
    double cell_metric(CellIndex a, CellIndex b) const { return metric(center(a), center(b)); }

    bool operator==(const GridSpace& o) const;

private:
    SpaceKind kind_ = SpaceKind::Rectangle;
    int resolution_ = 8;
    Bounds bounds_{};
    int width_ = 8;
    int height_ = 8;
};

/// Finite set of cells of one space, kept sorted and unique.
class CellSet {
public:
    CellSet() = default;
    explicit CellSet(GridSpace space) : space_(std::move(space)) {}
    CellSet(GridSpace space, std::vector<CellIndex> cells);

    static CellSet full(const GridSpace& space);
    static CellSet from_predicate(const GridSpace& space, const std::function<bool(Point)>& pred);

    const GridSpace& space() const { return space_; }
    std::span<const CellIndex> cells() const { return cells_; }
    std::size_t size() const { return cells_.size(); }
    bool empty() const { return cells_.empty(); }
    bool contains(CellIndex c) const;

    /// Dense membership mask over the whole space.
    std::vector<std::uint8_t> mask() const;

    CellSet unite(const CellSet& o) const;
    CellSet intersect(const CellSet& o) const;
    CellSet subtract(const CellSet& o) const;
    bool is_subset_of(const CellSet& o) const;

    bool operator==(const CellSet& o) const { return space_ == o.space_ && cells_ == o.cells_; }

private:
    GridSpace space_{};
    std::vector<CellIndex> cells_;
};

/// A CellSet with exactly one eight-connected component.
class Continuum {
public:
    /// Throws if `set` is empty or not connected.
    explicit Continuum(CellSet set);

    const CellSet& set() const { return set_; }
    operator const CellSet&() const { return set_; }

private:
    friend std::vector<Continuum> components(const CellSet& s);
    struct Trusted {};
    Continuum(CellSet set, Trusted) : set_(std::move(set)) {}
    CellSet set_;
};

/// Maximal eight-connected pieces, ordered by lowest cell index.
std::vector<Continuum> components(const CellSet& s);
bool is_connected(const CellSet& s);

/// Per-cell distance field over a space.
struct DistanceField {
    GridSpace space;
    std::vector<double> values;

    double at(CellIndex c) const { return values[static_cast<std::size_t>(c)]; }
};

DistanceField distance_transform(const CellSet& s);
double hausdorff_distance(const CellSet& a, const CellSet& b);
/// sup over a in A of dist(a, B).
double hausdorff_excess(const CellSet& a, const CellSet& b);
double diameter(const CellSet& s);
double whitney_size(const CellSet& a);

/// Cells within `radius` (center distance) of `p`.
CellSet ball(const GridSpace& space, Point p, double radius);

/// Cells of `s` having a four-neighbor outside `s` (or off a rectangle chart).
CellSet boundary_cells(const CellSet& s);

}  // namespace cwlab
