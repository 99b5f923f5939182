#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cwlab/atlas.hpp"
#include "cwlab/dynamics.hpp"
#include "cwlab/geometry.hpp"

// Slow reference implementations. Each is written for obviousness, not speed,
// and is only meant for small grids.
namespace cwlab::oracle {

/// Component id per cell of s (ascending cell order), by repeated flood fill.
std::vector<int> component_ids(const CellSet& s);
double distance_to_set(const CellSet& s, Point p);
double hausdorff(const CellSet& a, const CellSet& b);
double diameter(const CellSet& s);

/// min over distinct cell pairs of max_{|n| <= N} of the distance of their iterates,
/// rounded down to the grid as expansivity_floor does.
double expansivity_floor(const SurfaceMap& m, int horizon, const GridSpace& space);

/// Chain weight minimum by relaxation over all plaque pairs until nothing changes.
double plaque_metric(const Atlas& atlas, CellIndex x, CellIndex y);

/// Restriction agreement checked by comparing "same plaque" for every pair of overlap cells.
bool compatible(const Atlas& atlas);

struct Result {
    std::string name;
    bool ok = false;
    std::string detail;
};

/// Runs every oracle against the production code on small random inputs.
std::vector<Result> run_all(std::uint64_t seed);

}  // namespace cwlab::oracle
