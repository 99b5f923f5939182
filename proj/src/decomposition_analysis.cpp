#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include "cwlab/decomposition.hpp"

namespace cwlab {

namespace {

// Pairwise Hausdorff distance for small point sets (arcs).
double small_hausdorff(const GridSpace& sp, const std::vector<CellIndex>& a, const std::vector<CellIndex>& b) {
    auto excess = [&](const std::vector<CellIndex>& from, const std::vector<CellIndex>& to) {
        double worst = 0.0;
        for (CellIndex p : from) {
            const Point pp = sp.center(p);
            double best = std::numeric_limits<double>::infinity();
            for (CellIndex q : to) best = std::min(best, sp.metric(pp, sp.center(q)));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(excess(a, b), excess(b, a));
}

std::vector<CellIndex> sorted_neighbors(const GridSpace& sp, CellIndex c) {
    std::vector<CellIndex> out;
    sp.for_each_neighbor8(c, [&](CellIndex n) { out.push_back(n); });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Semicontinuity

bool SemicontinuityReport::upper_semicontinuous() const {
    if (entries.empty()) return false;
    const auto& last = entries.back();
    return last.upper_defect <= 2.0 * last.cell_size + 1e-12;
}

SemicontinuityReport semicontinuity_profile(const DecompositionGenerator& gen, Point point,
                                            const std::vector<int>& resolutions) {
    SemicontinuityReport report;
    report.point = point;
    for (int res : resolutions) {
        const LabelField q = gen(res);
        const auto& sp = q.space();
        const auto base = sp.locate(point);
        if (!base || !q.find_label(*base)) throw Error("point outside the decomposition domain");
        const int base_label = q.label_of(*base);
        const CellSet here = q.plaque(base_label);
        const auto to_here = distance_transform(here);

        SemicontinuityEntry e;
        e.resolution = res;
        e.cell_size = sp.cell_size();
        for (int dir = 0; dir < 8; ++dir) {
            const double angle = dir * std::numbers::pi / 4.0;
            std::optional<CellIndex> limit;
            double d = 0.1;
            for (int k = 0; k <= 5; ++k, d *= 0.5) {
                const Point p{point.x + d * std::cos(angle), point.y + d * std::sin(angle)};
                const auto c = sp.locate(p);
                if (c && *c != *base && q.find_label(*c)) limit = c;
            }
            if (!limit) continue;
            const int l = q.label_of(*limit);
            if (l == base_label) continue;
            const CellSet lp = q.plaque(l);
            double upper = 0.0;
            for (CellIndex c : lp.cells()) upper = std::max(upper, to_here.at(c));
            const double sym = std::max(upper, hausdorff_excess(here, lp));
            e.upper_defect = std::max(e.upper_defect, upper);
            if (sym > e.symmetric_defect) {
                e.symmetric_defect = sym;
                e.worst_direction = dir;
            }
        }
        report.entries.push_back(e);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Plaque arcs and C-smoothness

std::vector<CellIndex> plaque_arc(const LabelField& q, CellIndex x, CellIndex y) {
    const int label = q.label_of(x);
    if (q.label_of(y) != label) throw Error("arc endpoints lie in different plaques");
    const auto& sp = q.space();
    if (x == y) return {x};
    std::map<CellIndex, CellIndex> parent;
    parent[x] = x;
    std::vector<CellIndex> frontier{x};
    for (std::size_t head = 0; head < frontier.size(); ++head) {
        const CellIndex u = frontier[head];
        for (CellIndex n : sorted_neighbors(sp, u)) {
            if (parent.count(n) || q.find_label(n) != label) continue;
            parent[n] = u;
            if (n == y) {
                std::vector<CellIndex> path{y};
                for (CellIndex v = y; v != x;) {
                    v = parent[v];
                    path.push_back(v);
                }
                std::reverse(path.begin(), path.end());
                return path;
            }
            frontier.push_back(n);
        }
    }
    throw Error("plaque is not connected");
}

double csmooth_defect(const LabelField& q, int samples_per_plaque, std::uint64_t seed) {
    for (int p = 0; p < q.plaque_count(); ++p)
        if (auto why = dendrite_proxy_failure(q.plaque(p)))
            throw Error("plaque " + std::to_string(p) + " fails the dendrite proxy: " + *why);

    const auto& sp = q.space();
    std::mt19937_64 rng(seed);
    static constexpr int kStep = 2;
    static constexpr int kOffsets[4][2] = {{0, kStep}, {0, -kStep}, {kStep, 0}, {-kStep, 0}};
    double worst = 0.0;
    for (int p = 0; p < q.plaque_count(); ++p) {
        const auto& cells = q.plaque_cells(p);
        if (cells.size() < 2) continue;
        std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
        for (int s = 0; s < samples_per_plaque; ++s) {
            const CellIndex x = cells[pick(rng)];
            const CellIndex y = cells[pick(rng)];
            std::optional<CellIndex> xp;
            for (const auto& o : kOffsets) {
                auto c = sp.offset(x, o[0], o[1]);
                if (c && q.find_label(*c) && q.label_of(*c) != p) {
                    xp = c;
                    break;
                }
            }
            if (!xp) continue;
            const auto& other = q.plaque_cells(q.label_of(*xp));
            const Point py = sp.center(y);
            CellIndex yp = other.front();
            double best = std::numeric_limits<double>::infinity();
            for (CellIndex c : other) {
                const double d = sp.metric(py, sp.center(c));
                if (d < best) {
                    best = d;
                    yp = c;
                }
            }
            const auto arc = plaque_arc(q, x, y);
            const auto arc2 = plaque_arc(q, *xp, yp);
            const double shift = std::max(sp.cell_metric(x, *xp), best);
            worst = std::max(worst, small_hausdorff(sp, arc, arc2) - shift);
        }
    }
    return std::max(0.0, worst);
}

// ---------------------------------------------------------------------------
// Product structures

ProductStructure product_structure(const LabelField& q, const Disc& d, double csmooth_threshold) {
    ProductStructure out;
    const auto& sp = q.space();
    if (csmooth_threshold < 0) csmooth_threshold = 6.0 * sp.cell_size();

    const auto cw = is_cw_decomposition(q, d);
    if (!cw.ok) {
        const auto& first = cw.diagnostics.front();
        out.diagnostic = first.find("misses boundary") != std::string::npos ? "plaque misses boundary: " + first
                                                                          : "plaque not arc-connected: " + first;
        return out;
    }
    const auto g = quotient_graph(q, false);
    const auto order = g.path_order();
    if (order.empty()) {
        out.diagnostic = "quotient not an arc";
        return out;
    }
    const auto bmask = d.boundary.mask();
    std::vector<int> in_boundary;
    for (int p = 0; p < q.plaque_count(); ++p) {
        const auto& cells = q.plaque_cells(p);
        if (std::all_of(cells.begin(), cells.end(), [&](CellIndex c) { return bmask[static_cast<std::size_t>(c)] != 0; }))
            in_boundary.push_back(p);
    }
    const int e1 = order.front(), e2 = order.back();
    if (in_boundary.size() != 2 || !std::count(in_boundary.begin(), in_boundary.end(), e1) ||
        !std::count(in_boundary.begin(), in_boundary.end(), e2)) {
        out.diagnostic = "expected exactly two boundary plaques at the ends of the quotient arc";
        return out;
    }
    if (q.plaque_cells(e1).size() < 2 || q.plaque_cells(e2).size() < 2) {
        out.diagnostic = "boundary plaque trivial";
        return out;
    }
    double defect = 0.0;
    try {
        defect = csmooth_defect(q, 4, 0x5eed);
    } catch (const Error& e) {
        out.diagnostic = std::string("plaque not arc-connected: ") + e.what();
        return out;
    }
    if (defect >= 0.5) {
        out.diagnostic = "plaque not arc-connected (arc jump " + std::to_string(defect) + ")";
        return out;
    }
    if (defect > csmooth_threshold) {
        out.diagnostic = "C-smooth defect exceeded";
        return out;
    }

    // Transversal: one component of the boundary with the two end plaques removed.
    CellSet rest = d.boundary.subtract(q.plaque(e1)).subtract(q.plaque(e2));
    const auto pieces = components(rest);
    if (pieces.empty()) {
        out.diagnostic = "no transversal arc";
        return out;
    }
    const CellSet& arc_set = pieces.front().set();
    // Order the transversal from the end touching E1.
    const CellSet e1set = q.plaque(e1);
    const auto to_e1 = distance_transform(e1set);
    std::vector<CellIndex> arc(arc_set.cells().begin(), arc_set.cells().end());
    CellIndex start = arc.front();
    for (CellIndex c : arc)
        if (to_e1.at(c) < to_e1.at(start)) start = c;
    std::vector<CellIndex> ordered;
    {
        std::set<CellIndex> left(arc.begin(), arc.end());
        CellIndex cur = start;
        ordered.push_back(cur);
        left.erase(cur);
        while (!left.empty()) {
            std::optional<CellIndex> next;
            for (CellIndex n : sorted_neighbors(sp, cur))
                if (left.count(n)) {
                    next = n;
                    break;
                }
            if (!next) break;
            cur = *next;
            ordered.push_back(cur);
            left.erase(cur);
        }
    }
    out.transversal_cells = static_cast<int>(ordered.size());
    const double denom = static_cast<double>(ordered.size() + 1);

    // pi: each plaque's transversal cell and its arc coordinate.
    std::vector<std::optional<CellIndex>> foot(static_cast<std::size_t>(q.plaque_count()));
    std::vector<double> coord(static_cast<std::size_t>(q.plaque_count()), -1.0);
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        const int l = q.label_of(ordered[i]);
        if (!foot[static_cast<std::size_t>(l)]) {
            foot[static_cast<std::size_t>(l)] = ordered[i];
            coord[static_cast<std::size_t>(l)] = static_cast<double>(i + 1) / denom;
        }
    }
    auto end_foot = [&](int plaque, CellIndex anchor) {
        CellIndex best = q.plaque_cells(plaque).front();
        double bd = std::numeric_limits<double>::infinity();
        for (CellIndex c : q.plaque_cells(plaque)) {
            const double dd = sp.cell_metric(c, anchor);
            if (dd < bd) {
                bd = dd;
                best = c;
            }
        }
        return best;
    };
    foot[static_cast<std::size_t>(e1)] = end_foot(e1, ordered.front());
    coord[static_cast<std::size_t>(e1)] = 0.0;
    foot[static_cast<std::size_t>(e2)] = end_foot(e2, ordered.back());
    coord[static_cast<std::size_t>(e2)] = 1.0;
    for (int p = 0; p < q.plaque_count(); ++p)
        if (!foot[static_cast<std::size_t>(p)]) {
            out.diagnostic = "plaque " + std::to_string(p) + " misses the transversal";
            return out;
        }

    std::vector<double> plaque_size(static_cast<std::size_t>(q.plaque_count()));
    for (int p = 0; p < q.plaque_count(); ++p) plaque_size[static_cast<std::size_t>(p)] = whitney_size(q.plaque(p));

    const auto cells = q.domain().cells();
    out.coords.resize(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const int l = q.labels()[i];
        const auto gamma = plaque_arc(q, cells[i], *foot[static_cast<std::size_t>(l)]);
        const double mu = whitney_size(CellSet(sp, gamma));
        out.coords[i] = {coord[static_cast<std::size_t>(l)], mu / plaque_size[static_cast<std::size_t>(l)]};
    }

    // Plaque images must stay inside one horizontal band of the target grid.
    std::vector<double> lo(static_cast<std::size_t>(q.plaque_count()), 2.0), hi(static_cast<std::size_t>(q.plaque_count()), -1.0);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto l = static_cast<std::size_t>(q.labels()[i]);
        lo[l] = std::min(lo[l], out.coords[i].u);
        hi[l] = std::max(hi[l], out.coords[i].u);
    }
    for (std::size_t l = 0; l < lo.size(); ++l)
        out.horizontality_error_cells = std::max(out.horizontality_error_cells, (hi[l] - lo[l]) * denom);

    std::set<std::pair<long long, long long>> seen;
    out.injective = true;
    for (const auto& c : out.coords)
        if (!seen.emplace(std::llround(c.u * 1e9), std::llround(c.v * 1e9)).second) out.injective = false;
    if (!out.injective) {
        out.diagnostic = "coordinate map not injective";
        return out;
    }
    if (out.horizontality_error_cells > 2.0) {
        out.diagnostic = "plaque image leaves its horizontal band";
        return out;
    }
    out.ok = true;
    return out;
}

PairProduct pair_product_structure(const LabelField& q1, const LabelField& q2, const Disc& d) {
    PairProduct out;
    if (!(q1.domain() == d.cells) || !(q2.domain() == d.cells)) throw Error("fields do not live on the disc");
    const auto cells = d.cells.cells();

    std::map<std::pair<int, int>, std::vector<CellIndex>> meet;
    for (std::size_t i = 0; i < cells.size(); ++i) meet[{q1.labels()[i], q2.labels()[i]}].push_back(cells[i]);
    for (const auto& [key, where] : meet)
        if (where.size() >= 2) {
            out.diagnostic = "plaques meet in more than one cell";
            out.witness = where.front();
            return out;
        }

    // Boundary must be covered by two plaques of each field, in alternating order.
    const auto bmask = d.boundary.mask();
    auto boundary_plaques = [&](const LabelField& q) {
        std::vector<int> out_ids;
        for (int p = 0; p < q.plaque_count(); ++p) {
            const auto& pc = q.plaque_cells(p);
            if (pc.size() > 1 && std::all_of(pc.begin(), pc.end(), [&](CellIndex c) { return bmask[static_cast<std::size_t>(c)] != 0; }))
                out_ids.push_back(p);
        }
        return out_ids;
    };
    const auto b1 = boundary_plaques(q1), b2 = boundary_plaques(q2);
    if (b1.size() != 2 || b2.size() != 2) {
        out.diagnostic = "boundary is not a (Q1,Q2)-rectangle";
        return out;
    }
    for (CellIndex c : d.boundary.cells()) {
        const int l1 = q1.label_of(c), l2 = q2.label_of(c);
        if (l1 != b1[0] && l1 != b1[1] && l2 != b2[0] && l2 != b2[1]) {
            out.diagnostic = "boundary is not a (Q1,Q2)-rectangle";
            out.witness = c;
            return out;
        }
    }

    auto ranks = [](const LabelField& q) {
        const auto g = quotient_graph(q, false);
        const auto order = g.path_order();
        std::vector<int> rank(static_cast<std::size_t>(q.plaque_count()), -1);
        for (std::size_t i = 0; i < order.size(); ++i) rank[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
        return rank;
    };
    const auto r1 = ranks(q1), r2 = ranks(q2);
    if (std::count(r1.begin(), r1.end(), -1) || std::count(r2.begin(), r2.end(), -1)) {
        out.diagnostic = "quotient not an arc";
        return out;
    }
    if (meet.size() != static_cast<std::size_t>(q1.plaque_count()) * static_cast<std::size_t>(q2.plaque_count())) {
        out.diagnostic = "some pair of plaques does not cross";
        return out;
    }
    out.coords.resize(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i)
        out.coords[i] = {r1[static_cast<std::size_t>(q1.labels()[i])], r2[static_cast<std::size_t>(q2.labels()[i])]};
    out.ok = true;
    return out;
}

GeneratingResult generating_pair_test(const LabelField& q1, const LabelField& q2, CellIndex x, double eps) {
    const auto& sp = q1.space();
    const CellSet b = ball(sp, sp.center(x), eps);
    if (!b.is_subset_of(q1.domain()) || !b.is_subset_of(q2.domain()))
        throw Error("point too close to the domain boundary for this radius");
    const auto r1 = monotone_restriction(q1, b);
    const auto r2 = monotone_restriction(q2, b);

    // Plaques of one restriction that meet the other restriction's plaque of x.
    std::set<int> meets_q1x, meets_q2x;
    for (CellIndex c : r1.plaque_cells(r1.label_of(x))) meets_q1x.insert(r2.label_of(c));
    for (CellIndex c : r2.plaque_cells(r2.label_of(x))) meets_q2x.insert(r1.label_of(c));

    std::vector<std::pair<double, CellIndex>> by_distance;
    for (CellIndex c : b.cells()) by_distance.emplace_back(sp.cell_metric(x, c), c);
    std::sort(by_distance.begin(), by_distance.end());

    GeneratingResult out;
    const double h = sp.cell_size();
    double first_fail = std::numeric_limits<double>::infinity();
    for (const auto& [dist, y] : by_distance) {
        const bool a = meets_q1x.count(r2.label_of(y)) > 0;
        const bool c = meets_q2x.count(r1.label_of(y)) > 0;
        if (!a || !c) {
            first_fail = dist;
            out.witness = y;
            out.failing_side = !a ? "Q1(x)&Q2(y)" : "Q2(x)&Q1(y)";
            break;
        }
    }
    if (!out.witness) {
        out.delta = std::floor(eps / h + 1e-9) * h;
        return out;
    }
    // A failure among the eight neighbours of x is the finest scale the grid resolves.
    if (first_fail <= std::sqrt(2.0) * h + 1e-12) return out;
    const double k = std::ceil(first_fail / h - 1e-9) - 1.0;
    out.delta = std::max(0.0, k) * h;
    return out;
}

}  // namespace cwlab
