#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cwlab/geometry.hpp"

namespace cwlab {

/// Monotone partition of a cell set into connected plaques.
///
/// Plaque ids are dense, numbered in order of each plaque's lowest cell.
class LabelField {
public:
    LabelField() = default;

    /// Arbitrary labels; throws if some label class is not eight-connected.
    static LabelField from_labels(CellSet domain, const std::vector<int>& labels);
    /// Splits every key class into its connected components.
    static LabelField from_key(CellSet domain, const std::function<std::int64_t(CellIndex)>& key);

    const CellSet& domain() const { return domain_; }
    const GridSpace& space() const { return domain_.space(); }
    int plaque_count() const { return static_cast<int>(plaques_.size()); }

    /// Label per domain cell, parallel to domain().cells().
    const std::vector<int>& labels() const { return labels_; }
    std::optional<int> find_label(CellIndex c) const;
    int label_of(CellIndex c) const;

    const std::vector<CellIndex>& plaque_cells(int id) const { return plaques_.at(static_cast<std::size_t>(id)); }
    CellSet plaque(int id) const { return CellSet(space(), plaque_cells(id)); }
    CellSet plaque_at(CellIndex c) const { return plaque(label_of(c)); }

    bool operator==(const LabelField& o) const { return domain_ == o.domain_ && labels_ == o.labels_; }

private:
    CellSet domain_;
    std::vector<int> labels_;
    std::vector<std::vector<CellIndex>> plaques_;
    std::vector<int> lookup_;  // dense over the space for large domains, otherwise empty
};

/// Discrete disc with its boundary marked at construction.
struct Disc {
    CellSet cells;
    CellSet boundary;

    static Disc from_cells(CellSet cells);
};

// ---------------------------------------------------------------------------
// Field builders

LabelField horizontal_foliation(const CellSet& domain);
LabelField vertical_foliation(const CellSet& domain);
/// Plaques y = c + slope * x, one cell thick per column.
LabelField sheared_foliation(const CellSet& domain, double slope);
/// Plaques col - row = const.
LabelField diagonal_foliation(const CellSet& domain);
/// Plaques y = x^2 + c. Connected only where |x| <= 1/2, where the slope stays within one cell per column.
LabelField quadratic_foliation(const CellSet& domain);
/// Horizontal below the x-axis and in the upper-left quadrant, vertical rays in
/// the upper-right quadrant: generated by the vertical foliation from one side only.
LabelField one_sided_field(const CellSet& domain);
/// Q_min: every cell its own plaque.
LabelField singleton_field(const CellSet& domain);
LabelField single_plaque_field(const CellSet& domain);

/// Cells {0 <= key < rows} for the sheared key floor((y - slope x)/h), on [0,1] x [0, 1 + slope].
CellSet sheared_square(int resolution, double slope);

// ---------------------------------------------------------------------------
// Operations

LabelField monotone_restriction(const LabelField& q, const CellSet& y);

struct QuotientGraph {
    int node_count = 0;
    std::vector<std::pair<int, int>> edges;  // a < b, sorted
    std::vector<std::vector<int>> adjacency;
    std::vector<double> diameters;
    std::vector<bool> boundary_contact;

    int degree(int node) const { return static_cast<int>(adjacency.at(static_cast<std::size_t>(node)).size()); }
    bool connected() const;
    bool is_tree() const;
    bool is_path() const;
    /// Some cycle of node ids, empty for forests.
    std::vector<int> find_cycle() const;
    /// Path order of nodes starting at the lower-id end; empty if not a path.
    std::vector<int> path_order() const;
};

/// Plaques are joined when they share a cell edge. Plaques themselves are 8-connected,
/// so corner contact alone does not count.
QuotientGraph quotient_graph(const LabelField& q, bool with_diameters = true);

struct DendriteCheck {
    bool is_dendrite = false;
    std::vector<int> cycle;
};

DendriteCheck is_dendrite_quotient(const LabelField& q);

/// Euler characteristic of the union of the closed unit squares of the cells.
int cubical_euler_characteristic(const CellSet& s);
bool has_solid_block(const CellSet& s, int k = 3);
/// Connected, Euler characteristic 1, no filled 3x3 block. Returns the failure reason.
std::optional<std::string> dendrite_proxy_failure(const CellSet& s);

struct CwReport {
    bool ok = true;
    std::vector<std::string> diagnostics;
    std::optional<int> failed_plaque;
};

CwReport is_cw_decomposition(const LabelField& q, const Disc& d);

struct PointClass {
    enum class Kind { End, Regular, Ramification };
    Kind kind = Kind::End;
    int degree = 0;
};

PointClass classify_quotient_point(const LabelField& q, int plaque);

struct Separation {
    std::optional<int> plaque;
    std::string explanation;
};

Separation separating_plaque(const LabelField& q, int p1, int p2, int p3);

/// Instantiates the same decomposition at a given resolution.
using DecompositionGenerator = std::function<LabelField(int resolution)>;

struct SemicontinuityEntry {
    int resolution = 0;
    double cell_size = 0.0;
    double upper_defect = 0.0;
    double symmetric_defect = 0.0;
    int worst_direction = 0;  // index into the compass, 0 = east, counter-clockwise
};

struct SemicontinuityReport {
    Point point;
    std::vector<SemicontinuityEntry> entries;

    /// Upper defect at the finest resolution within two cells.
    bool upper_semicontinuous() const;
};

SemicontinuityReport semicontinuity_profile(const DecompositionGenerator& gen, Point point,
                                            const std::vector<int>& resolutions);

/// Shortest path from x to y inside the plaque of x, lexicographic tie-breaking.
std::vector<CellIndex> plaque_arc(const LabelField& q, CellIndex x, CellIndex y);

/// Max over sampled arcs of the Hausdorff jump in excess of the perturbation.
double csmooth_defect(const LabelField& q, int samples_per_plaque, std::uint64_t seed);

struct ProductCoord {
    double u = 0.0;  // arc-length coordinate of the plaque's transversal point
    double v = 0.0;  // size ratio along the plaque
};

struct ProductStructure {
    bool ok = false;
    std::string diagnostic;
    std::vector<ProductCoord> coords;  // parallel to domain cells
    int transversal_cells = 0;
    double horizontality_error_cells = 0.0;
    bool injective = false;
};

ProductStructure product_structure(const LabelField& q, const Disc& d, double csmooth_threshold = -1.0);

struct PairProduct {
    bool ok = false;
    std::string diagnostic;
    std::optional<CellIndex> witness;
    std::vector<std::pair<int, int>> coords;  // (Q1 rank, Q2 rank), parallel to domain cells
};

PairProduct pair_product_structure(const LabelField& q1, const LabelField& q2, const Disc& d);

struct GeneratingResult {
    double delta = 0.0;
    std::optional<CellIndex> witness;
    std::string failing_side;  // "Q1(x)&Q2(y)" or "Q2(x)&Q1(y)" when a witness exists
};

GeneratingResult generating_pair_test(const LabelField& q1, const LabelField& q2, CellIndex x, double eps);

}  // namespace cwlab
