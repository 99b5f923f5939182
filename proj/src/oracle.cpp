#include "cwlab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "cwlab/decomposition.hpp"

namespace cwlab::oracle {

std::vector<int> component_ids(const CellSet& s) {
    const auto& sp = s.space();
    const auto cells = s.cells();
    std::vector<int> id(cells.size(), -1);
    int next = 0;
    for (std::size_t seed = 0; seed < cells.size(); ++seed) {
        if (id[seed] >= 0) continue;
        id[seed] = next;
        // Sweep until no cell changes: quadratic, but obviously right.
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (id[i] >= 0) continue;
                for (std::size_t j = 0; j < cells.size(); ++j) {
                    if (id[j] != next) continue;
                    bool adjacent = false;
                    sp.for_each_neighbor8(cells[j], [&](CellIndex n) { adjacent = adjacent || n == cells[i]; });
                    if (adjacent) {
                        id[i] = next;
                        changed = true;
                        break;
                    }
                }
            }
        }
        ++next;
    }
    return id;
}

double distance_to_set(const CellSet& s, Point p) {
    double best = std::numeric_limits<double>::infinity();
    for (CellIndex c : s.cells()) best = std::min(best, s.space().metric(p, s.space().center(c)));
    return best;
}

double hausdorff(const CellSet& a, const CellSet& b) {
    double h = 0.0;
    for (CellIndex c : a.cells()) h = std::max(h, distance_to_set(b, a.space().center(c)));
    for (CellIndex c : b.cells()) h = std::max(h, distance_to_set(a, b.space().center(c)));
    return h;
}

double diameter(const CellSet& s) {
    double d = 0.0;
    for (CellIndex a : s.cells())
        for (CellIndex b : s.cells()) d = std::max(d, s.space().cell_metric(a, b));
    return d;
}

double expansivity_floor(const SurfaceMap& m, int horizon, const GridSpace& space) {
    const double h = space.cell_size();
    const CellIndex n = space.cell_count();
    std::vector<std::vector<Point>> orbits(static_cast<std::size_t>(n));
    for (CellIndex c = 0; c < n; ++c)
        for (int k = -horizon; k <= horizon; ++k) orbits[static_cast<std::size_t>(c)].push_back(orbit(m, space.center(c), k));
    double best = std::numeric_limits<double>::infinity();
    for (CellIndex a = 0; a < n; ++a)
        for (CellIndex b = a + 1; b < n; ++b) {
            double worst = 0.0;
            for (std::size_t k = 0; k < orbits[0].size(); ++k)
                worst = std::max(worst, m.metric(orbits[static_cast<std::size_t>(a)][k], orbits[static_cast<std::size_t>(b)][k]));
            best = std::min(best, worst);
        }
    const long k = static_cast<long>(std::ceil(best / h - 1e-9)) - 1;
    return static_cast<double>(std::max<long>(k, 1)) * h;
}

double plaque_metric(const Atlas& atlas, CellIndex x, CellIndex y) {
    const int n = atlas.plaque_count();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> d(static_cast<std::size_t>(n), inf);
    std::vector<CellSet> sets;
    for (int i = 0; i < n; ++i) sets.push_back(atlas.plaque(i));
    for (int i = 0; i < n; ++i)
        if (sets[static_cast<std::size_t>(i)].contains(x)) d[static_cast<std::size_t>(i)] = atlas.plaque_diameter(i);
    bool changed = true;
    while (changed) {
        changed = false;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j || d[static_cast<std::size_t>(i)] == inf) continue;
                if (sets[static_cast<std::size_t>(i)].intersect(sets[static_cast<std::size_t>(j)]).empty()) continue;
                const double nd = d[static_cast<std::size_t>(i)] + atlas.plaque_diameter(j);
                if (nd < d[static_cast<std::size_t>(j)] - 1e-15) {
                    d[static_cast<std::size_t>(j)] = nd;
                    changed = true;
                }
            }
    }
    double best = inf;
    for (int i = 0; i < n; ++i)
        if (sets[static_cast<std::size_t>(i)].contains(y)) best = std::min(best, d[static_cast<std::size_t>(i)]);
    return best;
}

bool compatible(const Atlas& atlas) {
    const auto& charts = atlas.charts();
    for (std::size_t i = 0; i < charts.size(); ++i)
        for (std::size_t j = i + 1; j < charts.size(); ++j) {
            const CellSet meet = charts[i].box.cells.intersect(charts[j].box.cells);
            if (meet.empty()) continue;
            // Two cells are together in a restriction iff they share a component of plaque ∩ meet.
            auto together = [&](const LabelField& f) {
                std::vector<std::vector<bool>> t(meet.size(), std::vector<bool>(meet.size(), false));
                for (int p = 0; p < f.plaque_count(); ++p) {
                    const CellSet piece = f.plaque(p).intersect(meet);
                    if (piece.empty()) continue;
                    const auto ids = component_ids(piece);
                    const auto pc = piece.cells();
                    for (std::size_t a = 0; a < pc.size(); ++a)
                        for (std::size_t b = 0; b < pc.size(); ++b) {
                            if (ids[a] != ids[b]) continue;
                            const auto ia = std::lower_bound(meet.cells().begin(), meet.cells().end(), pc[a]) - meet.cells().begin();
                            const auto ib = std::lower_bound(meet.cells().begin(), meet.cells().end(), pc[b]) - meet.cells().begin();
                            t[static_cast<std::size_t>(ia)][static_cast<std::size_t>(ib)] = true;
                        }
                }
                return t;
            };
            if (together(charts[i].field) != together(charts[j].field)) return false;
        }
    return true;
}

namespace {

CellSet random_set(const GridSpace& sp, double density, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(density);
    std::vector<CellIndex> cells;
    for (CellIndex c = 0; c < sp.cell_count(); ++c)
        if (coin(rng)) cells.push_back(c);
    if (cells.empty()) cells.push_back(0);
    return CellSet(sp, std::move(cells));
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)); }

std::string pair_text(double a, double b) {
    std::ostringstream os;
    os.precision(17);
    os << a << " vs " << b;
    return os.str();
}

}  // namespace

std::vector<Result> run_all(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Result> out;
    const std::vector<GridSpace> spaces{GridSpace::rectangle({0, 1, 0, 1}, 12), GridSpace::torus(12),
                                        GridSpace::sphere_quotient(12)};

    {
        Result r{"components", true, ""};
        for (const auto& sp : spaces)
            for (int t = 0; t < 5 && r.ok; ++t) {
                const CellSet s = random_set(sp, 0.35, rng);
                const auto ids = component_ids(s);
                const auto comps = components(s);
                const int expected = ids.empty() ? 0 : *std::max_element(ids.begin(), ids.end()) + 1;
                if (static_cast<int>(comps.size()) != expected) {
                    r.ok = false;
                    r.detail = to_string(sp.kind()) + ": " + std::to_string(comps.size()) + " vs " + std::to_string(expected);
                }
            }
        out.push_back(r);
    }
    {
        Result r{"distance_transform", true, ""};
        for (const auto& sp : spaces) {
            const CellSet s = random_set(sp, 0.05, rng);
            const auto df = distance_transform(s);
            for (CellIndex c = 0; c < sp.cell_count() && r.ok; ++c) {
                const double want = distance_to_set(s, sp.center(c));
                if (!close(df.at(c), want)) r = {r.name, false, to_string(sp.kind()) + ": " + pair_text(df.at(c), want)};
            }
        }
        out.push_back(r);
    }
    {
        Result r{"hausdorff_and_diameter", true, ""};
        for (const auto& sp : spaces) {
            const CellSet a = random_set(sp, 0.1, rng), b = random_set(sp, 0.1, rng);
            if (!close(hausdorff_distance(a, b), hausdorff(a, b)))
                r = {r.name, false, "hausdorff " + pair_text(hausdorff_distance(a, b), hausdorff(a, b))};
            if (!close(cwlab::diameter(a), oracle::diameter(a)))
                r = {r.name, false, "diameter " + pair_text(cwlab::diameter(a), oracle::diameter(a))};
        }
        out.push_back(r);
    }
    {
        Result r{"expansivity_floor", true, ""};
        for (MapKind k : {MapKind::TorusAnosov, MapKind::SpherePseudoAnosov}) {
            const SurfaceMap m = SurfaceMap::from_kind(k);
            const GridSpace sp = m.make_space(24);
            const double fast = cwlab::expansivity_floor(m, 3, sp).value, slow = oracle::expansivity_floor(m, 3, sp);
            if (!close(fast, slow)) r = {r.name, false, to_string(k) + ": " + pair_text(fast, slow)};
        }
        out.push_back(r);
    }
    {
        Result r{"plaque_metric_and_compatibility", true, ""};
        const GridSpace sp = GridSpace::rectangle({0, 1, 0, 1}, 16);
        const Box region = Box::rectangle(sp, 0, 0, sp.width(), sp.height(), false);
        const Atlas a = horizontal_atlas(region, 0.25);
        if (compatibility_check(a).ok != compatible(a)) r = {r.name, false, "compatibility verdicts differ"};
        std::uniform_int_distribution<CellIndex> pick(0, sp.cell_count() - 1);
        for (int t = 0; t < 6 && r.ok; ++t) {
            CellIndex x = pick(rng), y = pick(rng);
            if (t % 2 == 0) y = sp.index(sp.col(y), sp.row(x));
            const double fast = cwlab::plaque_metric(a, x, y), slow = oracle::plaque_metric(a, x, y);
            if (!(fast == slow || close(fast, slow))) r = {r.name, false, pair_text(fast, slow)};
        }
        out.push_back(r);
    }
    return out;
}

}  // namespace cwlab::oracle
