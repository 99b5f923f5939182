#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "cwlab/decomposition.hpp"
#include "cwlab/dynamics.hpp"
#include "cwlab/geometry.hpp"

namespace cwlab {

/// A closed chart piece with its rim marked.
struct Box {
    CellSet cells;
    CellSet boundary;
    double diameter = 0.0;  // left at 0 when the box was built without it

    /// Cells with col in [col0, col0 + width) and row in [row0, row0 + height); never wraps.
    static Box rectangle(const GridSpace& space, int col0, int row0, int width, int height,
                         bool with_diameter = true);
    static Box from_cells(CellSet cells, bool with_diameter = true);

    Disc disc() const { return Disc{cells, boundary}; }
};

struct AtlasChart {
    Box box;
    LabelField field;
};

struct PlaqueRef {
    int chart = 0;
    int plaque = 0;
    bool operator==(const PlaqueRef&) const = default;
};

/// Finite family of boxes, each carrying a monotone decomposition, over a working region.
class Atlas {
public:
    Atlas() = default;
    Atlas(Box region, std::vector<AtlasChart> charts);

    const GridSpace& space() const { return region_.cells.space(); }
    const Box& region() const { return region_; }
    const std::vector<AtlasChart>& charts() const { return charts_; }

    int plaque_count() const { return static_cast<int>(refs_.size()); }
    int global_id(PlaqueRef r) const { return offsets_.at(static_cast<std::size_t>(r.chart)) + r.plaque; }
    PlaqueRef ref(int id) const { return refs_.at(static_cast<std::size_t>(id)); }
    CellSet plaque(int id) const;
    double plaque_diameter(int id) const { return diameters_.at(static_cast<std::size_t>(id)); }

    /// Global ids of all plaques containing c, ascending.
    std::vector<int> plaques_at(CellIndex c) const;
    /// Plaques sharing at least one cell with the given plaque.
    const std::vector<int>& neighbors(int id) const { return adjacency_.at(static_cast<std::size_t>(id)); }
    /// Leaf id of a plaque; leaves are classes of the plaque intersection graph.
    int leaf_id(int id) const { return leaf_of_.at(static_cast<std::size_t>(id)); }
    int leaf_count() const { return leaf_count_; }

private:
    Box region_;
    std::vector<AtlasChart> charts_;
    std::vector<int> offsets_;
    std::vector<PlaqueRef> refs_;
    std::vector<double> diameters_;
    std::vector<int> cover_start_;  // CSR over space cells
    std::vector<int> cover_;
    std::vector<std::vector<int>> adjacency_;
    std::vector<int> leaf_of_;
    int leaf_count_ = 0;
};

struct CompatibilityReport {
    bool ok = true;
    int pairs_checked = 0;
    std::optional<std::pair<int, int>> failing_pair;
    std::optional<CellIndex> witness;
};

/// Overlapping charts must induce the same monotone restriction on their intersection.
CompatibilityReport compatibility_check(const Atlas& atlas);

/// Consecutive plaques intersect.
struct Chain {
    std::vector<int> plaques;

    bool valid(const Atlas& atlas) const;
    double weight(const Atlas& atlas) const;
};

CellSet leaf(const Atlas& atlas, CellIndex x);
/// Smallest chain weight joining x to y; +inf across leaves.
double plaque_metric(const Atlas& atlas, CellIndex x, CellIndex y);
/// A chain realising plaque_metric; empty across leaves.
Chain shortest_chain(const Atlas& atlas, CellIndex x, CellIndex y);

using FieldBuilder = std::function<LabelField(const Box&)>;

/// Boxes of side `scale` at stride scale/2 tiling the region, optionally closed under pairwise intersection.
Atlas tiled_atlas(const Box& region, double scale, const FieldBuilder& build, bool close_under_intersection = true);

/// Naive digital lines with the given direction, numbered globally so restrictions agree between boxes.
LabelField line_field(const CellSet& domain, Point direction);

Atlas horizontal_atlas(const Box& region, double scale);

/// Atlas whose plaques are delta-stable (or unstable) segments certified up to the horizon.
Atlas stable_atlas(const SurfaceMap& m, double delta, int horizon, double scale, const GridSpace& space,
                   Direction direction = Direction::Stable);

struct GenericityReport {
    int samples = 0;
    int branched = 0;
    double branch_free_fraction = 1.0;
    std::vector<CellIndex> branch_witnesses;
};

/// Fraction of sampled points whose leaf has no ramification; samples <= 0 uses every covered cell.
GenericityReport leaf_genericity_report(const Atlas& atlas, int samples, std::uint64_t seed);

struct CompactnessProbe {
    bool finite_cover = true;
    std::size_t leaf_cells = 0;
    int plaque_count = 0;
};

/// Whether the leaf closes up inside the region or escapes through a chart seam or region cut.
CompactnessProbe leaf_compactness_probe(const Atlas& atlas, CellIndex x);

}  // namespace cwlab
