#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cwlab/decomposition.hpp"
#include "cwlab/geometry.hpp"

namespace cwlab {

/// A set in a rectangle meeting every column in one vertical run and avoiding
/// the top and bottom rows.
struct GraphLikeContinuum {
    CellSet cells;
    std::vector<int> slice_lo;  // per column, lowest row of the run
    std::vector<int> slice_hi;  // per column, highest row of the run

    const GridSpace& space() const { return cells.space(); }
};

struct GraphLikeCheck {
    bool ok = false;
    std::optional<int> column;
    std::string reason;
};

GraphLikeCheck validate_graphlike(const CellSet& c);
/// Validates and records the slices; throws with the checker's reason.
GraphLikeContinuum make_graphlike(const CellSet& c);

struct FlowDecomposition {
    GraphLikeContinuum source;
    std::vector<double> time;  // per space cell, time to reach the exit row; +inf on C
    LabelField field;
    std::vector<int> band_order;  // plaque ids from the top row band down to the bottom row band
    int c_plaque = -1;
    CellSet upper_contact;  // cells of C touching the region above
    CellSet lower_contact;  // cells of C touching the region below
};

FlowDecomposition flow_decomposition(const GraphLikeContinuum& c);

/// I x {0} inside [-1,1]^2.
GraphLikeContinuum make_flat_row(int resolution);
/// The flat segment plus a vertical spike {0} x [0, 1/2], inside [-1,1]^2.
GraphLikeContinuum make_cocarc(int resolution);
/// Topologist's sine curve closed up by {0} x [-1,1], inside [-2,2]^2.
GraphLikeContinuum make_sin_one_over_x(int resolution);
/// (K x [1/3,2/3]) u ([0,1] x {1/3}) for a finite-depth Cantor set K, inside [0,1]^2.
GraphLikeContinuum make_cantor_square(int resolution);

/// Depth of the Cantor approximation used by the generators at a resolution.
int cantor_depth(int resolution);
/// Whether x is within tolerance of the depth-`depth` Cantor approximation's left endpoints.
bool cantor_left_endpoint(double x, int depth);

/// g(sum 2/3^n_i) = sum 1/2^n_i. Throws if a ternary digit 1 appears.
double ternary_binary_map(double x, int depth = 40);

struct Backgammon {
    CellSet x;
    LabelField q_u;
    LabelField q_v;
    int depth = 0;
};

Backgammon make_backgammon(int resolution, int depth = -1);

/// The baseline plus the halved copies of the vertical comb, clipped to [-0.5,2.5] x [-0.5,1.5].
CellSet make_anomalous_stable_set(int resolution);
/// Components of F minus its baseline row inside the ball.
int punctured_component_count(const CellSet& f, Point center, double radius);

}  // namespace cwlab
