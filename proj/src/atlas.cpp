#include "cwlab/atlas.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <set>

#include "dsu.hpp"

namespace cwlab {

namespace {

// Exact for sets whose chart extent is at most half the chart, where the chart
// distance equals the surface distance. The farthest pair lies on the convex
// hull, hence among the leftmost and rightmost cells of each row.
double set_diameter(const CellSet& s) {
    const auto& sp = s.space();
    const auto cells = s.cells();
    if (cells.empty()) throw Error("diameter of an empty set");
    if (sp.kind() == SpaceKind::SphereQuotient) return diameter(s);
    std::map<int, std::pair<int, int>> rows;
    int cmin = sp.width(), cmax = -1;
    for (CellIndex c : cells) {
        const int col = sp.col(c), row = sp.row(c);
        auto [it, inserted] = rows.try_emplace(row, col, col);
        if (!inserted) {
            it->second.first = std::min(it->second.first, col);
            it->second.second = std::max(it->second.second, col);
        }
        cmin = std::min(cmin, col);
        cmax = std::max(cmax, col);
    }
    const int rspan = rows.rbegin()->first - rows.begin()->first;
    if (sp.kind() == SpaceKind::Torus && (2 * (cmax - cmin) > sp.width() || 2 * rspan > sp.height())) return diameter(s);
    std::vector<std::pair<int, int>> pts;
    for (const auto& [row, ext] : rows) {
        pts.emplace_back(ext.first, row);
        if (ext.second != ext.first) pts.emplace_back(ext.second, row);
    }
    long long best = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const long long dx = pts[i].first - pts[j].first, dy = pts[i].second - pts[j].second;
            best = std::max(best, dx * dx + dy * dy);
        }
    return std::sqrt(static_cast<double>(best)) * sp.cell_size();
}

struct Rect {
    int c0, r0, c1, r1;  // inclusive
    bool empty() const { return c0 > c1 || r0 > r1; }
    Rect meet(const Rect& o) const {
        return {std::max(c0, o.c0), std::max(r0, o.r0), std::min(c1, o.c1), std::min(r1, o.r1)};
    }
    bool operator<(const Rect& o) const { return std::tie(c0, r0, c1, r1) < std::tie(o.c0, o.r0, o.c1, o.r1); }
    bool operator==(const Rect& o) const = default;
};

std::vector<int> tile_starts(int lo, int hi, int side, int stride) {
    std::vector<int> starts;
    if (hi - lo + 1 <= side) return {lo};
    for (int s = lo;; s += stride) {
        if (s + side - 1 >= hi) {
            starts.push_back(hi - side + 1);
            break;
        }
        starts.push_back(s);
    }
    starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
    return starts;
}

}  // namespace

// ---------------------------------------------------------------------------
// Box

Box Box::rectangle(const GridSpace& space, int col0, int row0, int width, int height, bool with_diameter) {
    if (width <= 0 || height <= 0) throw Error("box must have positive size");
    if (col0 < 0 || row0 < 0 || col0 + width > space.width() || row0 + height > space.height())
        throw Error("box leaves the chart");
    std::vector<CellIndex> cells;
    cells.reserve(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
    for (int r = row0; r < row0 + height; ++r)
        for (int c = col0; c < col0 + width; ++c) cells.push_back(space.index(c, r));
    return from_cells(CellSet(space, std::move(cells)), with_diameter);
}

Box Box::from_cells(CellSet cells, bool with_diameter) {
    if (cells.empty()) throw Error("box must not be empty");
    Box b;
    if (with_diameter) b.diameter = set_diameter(cells);
    b.boundary = boundary_cells(cells);
    b.cells = std::move(cells);
    return b;
}

// ---------------------------------------------------------------------------
// Atlas

Atlas::Atlas(Box region, std::vector<AtlasChart> charts) : region_(std::move(region)), charts_(std::move(charts)) {
    const auto& sp = space();
    for (std::size_t i = 0; i < charts_.size(); ++i) {
        const auto& ch = charts_[i];
        if (!(ch.box.cells.space() == sp) || !(ch.field.space() == sp)) throw Error("chart lives in a different space");
        if (!(ch.field.domain() == ch.box.cells))
            throw Error("chart " + std::to_string(i) + " field domain differs from its box");
        offsets_.push_back(static_cast<int>(refs_.size()));
        for (int p = 0; p < ch.field.plaque_count(); ++p) {
            refs_.push_back({static_cast<int>(i), p});
            diameters_.push_back(set_diameter(ch.field.plaque(p)));
        }
    }

    const auto n = static_cast<std::size_t>(sp.cell_count());
    cover_start_.assign(n + 1, 0);
    for (const auto& ch : charts_)
        for (CellIndex c : ch.box.cells.cells()) ++cover_start_[static_cast<std::size_t>(c) + 1];
    for (std::size_t i = 0; i < n; ++i) cover_start_[i + 1] += cover_start_[i];
    cover_.resize(static_cast<std::size_t>(cover_start_[n]));
    std::vector<int> fill(cover_start_.begin(), cover_start_.end() - 1);
    for (std::size_t i = 0; i < charts_.size(); ++i) {
        const auto& f = charts_[i].field;
        const auto cells = f.domain().cells();
        for (std::size_t k = 0; k < cells.size(); ++k) {
            const int id = offsets_[i] + f.labels()[k];
            cover_[static_cast<std::size_t>(fill[static_cast<std::size_t>(cells[k])]++)] = id;
        }
    }

    adjacency_.assign(refs_.size(), {});
    for (std::size_t c = 0; c < n; ++c) {
        const int b = cover_start_[c], e = cover_start_[c + 1];
        for (int i = b; i < e; ++i)
            for (int j = i + 1; j < e; ++j) {
                adjacency_[static_cast<std::size_t>(cover_[static_cast<std::size_t>(i)])].push_back(cover_[static_cast<std::size_t>(j)]);
                adjacency_[static_cast<std::size_t>(cover_[static_cast<std::size_t>(j)])].push_back(cover_[static_cast<std::size_t>(i)]);
            }
    }
    detail::DisjointSets dsu(refs_.size());
    for (std::size_t i = 0; i < adjacency_.size(); ++i) {
        auto& a = adjacency_[i];
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
        for (int j : a) dsu.unite(i, static_cast<std::size_t>(j));
    }
    leaf_of_.assign(refs_.size(), -1);
    std::vector<int> root_leaf(refs_.size(), -1);
    for (std::size_t i = 0; i < refs_.size(); ++i) {
        const std::size_t r = dsu.find(i);
        if (root_leaf[r] < 0) root_leaf[r] = leaf_count_++;
        leaf_of_[i] = root_leaf[r];
    }
}

CellSet Atlas::plaque(int id) const {
    const PlaqueRef r = ref(id);
    return charts_.at(static_cast<std::size_t>(r.chart)).field.plaque(r.plaque);
}

std::vector<int> Atlas::plaques_at(CellIndex c) const {
    if (!space().in_range(c)) throw Error("cell " + std::to_string(c) + " is outside the space");
    std::vector<int> out(cover_.begin() + cover_start_[static_cast<std::size_t>(c)],
                         cover_.begin() + cover_start_[static_cast<std::size_t>(c) + 1]);
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

// Labels of both fields on their common cells, by merging the sorted domains.
struct Overlap {
    std::vector<CellIndex> cells;
    std::vector<int> a, b;
};

Overlap overlap_of(const LabelField& fa, const LabelField& fb) {
    Overlap o;
    const auto ca = fa.domain().cells(), cb = fb.domain().cells();
    std::size_t i = 0, j = 0;
    while (i < ca.size() && j < cb.size()) {
        if (ca[i] < cb[j]) ++i;
        else if (cb[j] < ca[i]) ++j;
        else {
            o.cells.push_back(ca[i]);
            o.a.push_back(fa.labels()[i++]);
            o.b.push_back(fb.labels()[j++]);
        }
    }
    return o;
}

// Equal edge sets "adjacent with the same label" give equal component partitions.
bool same_edges(const GridSpace& sp, const Overlap& o) {
    for (std::size_t k = 0; k < o.cells.size(); ++k) {
        bool ok = true;
        sp.for_each_neighbor8(o.cells[k], [&](CellIndex n) {
            if (!ok || n < o.cells[k]) return;
            auto it = std::lower_bound(o.cells.begin(), o.cells.end(), n);
            if (it == o.cells.end() || *it != n) return;
            const auto m = static_cast<std::size_t>(it - o.cells.begin());
            if ((o.a[k] == o.a[m]) != (o.b[k] == o.b[m])) ok = false;
        });
        if (!ok) return false;
    }
    return true;
}

}  // namespace

CompatibilityReport compatibility_check(const Atlas& atlas) {
    CompatibilityReport rep;
    const auto& charts = atlas.charts();
    const auto& sp = atlas.space();
    std::vector<std::vector<int>> partners(charts.size());
    {
        std::vector<int> stamp(charts.size(), -1);
        for (std::size_t i = 0; i < charts.size(); ++i)
            for (CellIndex c : charts[i].box.cells.cells())
                for (int id : atlas.plaques_at(c)) {
                    const int j = atlas.ref(id).chart;
                    if (j > static_cast<int>(i) && stamp[static_cast<std::size_t>(j)] != static_cast<int>(i)) {
                        stamp[static_cast<std::size_t>(j)] = static_cast<int>(i);
                        partners[i].push_back(j);
                    }
                }
    }
    for (std::size_t i = 0; i < charts.size(); ++i) {
        std::sort(partners[i].begin(), partners[i].end());
        for (int j : partners[i]) {
            const auto& fi = charts[i].field;
            const auto& fj = charts[static_cast<std::size_t>(j)].field;
            ++rep.pairs_checked;
            if (same_edges(sp, overlap_of(fi, fj))) continue;
            const CellSet meet = fi.domain().intersect(fj.domain());
            const LabelField ri = monotone_restriction(fi, meet);
            const LabelField rj = monotone_restriction(fj, meet);
            if (ri.labels() == rj.labels()) continue;
            rep.ok = false;
            rep.failing_pair = {static_cast<int>(i), j};
            const auto cells = meet.cells();
            for (std::size_t k = 0; k < cells.size(); ++k)
                if (ri.labels()[k] != rj.labels()[k]) {
                    rep.witness = cells[k];
                    break;
                }
            return rep;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Chains and leaves

bool Chain::valid(const Atlas& atlas) const {
    if (plaques.empty()) return false;
    for (std::size_t i = 0; i + 1 < plaques.size(); ++i) {
        if (plaques[i] == plaques[i + 1]) continue;
        const auto& nb = atlas.neighbors(plaques[i]);
        if (!std::binary_search(nb.begin(), nb.end(), plaques[i + 1])) return false;
    }
    return true;
}

double Chain::weight(const Atlas& atlas) const {
    double w = 0.0;
    for (int p : plaques) w += atlas.plaque_diameter(p);
    return w;
}

namespace {

std::vector<int> covering(const Atlas& atlas, CellIndex x) {
    auto ps = atlas.plaques_at(x);
    if (ps.empty()) throw Error("cell " + std::to_string(x) + " is not covered by the atlas");
    return ps;
}

std::vector<int> leaf_plaques(const Atlas& atlas, int leaf) {
    std::vector<int> out;
    for (int id = 0; id < atlas.plaque_count(); ++id)
        if (atlas.leaf_id(id) == leaf) out.push_back(id);
    return out;
}

std::vector<CellIndex> leaf_cells(const Atlas& atlas, const std::vector<int>& plaques) {
    std::vector<CellIndex> cells;
    for (int id : plaques) {
        const PlaqueRef r = atlas.ref(id);
        const auto& pc = atlas.charts()[static_cast<std::size_t>(r.chart)].field.plaque_cells(r.plaque);
        cells.insert(cells.end(), pc.begin(), pc.end());
    }
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    return cells;
}

}  // namespace

CellSet leaf(const Atlas& atlas, CellIndex x) {
    const int l = atlas.leaf_id(covering(atlas, x).front());
    return CellSet(atlas.space(), leaf_cells(atlas, leaf_plaques(atlas, l)));
}

Chain shortest_chain(const Atlas& atlas, CellIndex x, CellIndex y) {
    const auto from = covering(atlas, x);
    const auto to = covering(atlas, y);
    if (atlas.leaf_id(from.front()) != atlas.leaf_id(to.front())) return {};
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(static_cast<std::size_t>(atlas.plaque_count()), inf);
    std::vector<int> prev(dist.size(), -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (int p : from) {
        dist[static_cast<std::size_t>(p)] = atlas.plaque_diameter(p);
        pq.emplace(dist[static_cast<std::size_t>(p)], p);
    }
    const std::set<int> targets(to.begin(), to.end());
    while (!pq.empty()) {
        const auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[static_cast<std::size_t>(u)]) continue;
        if (targets.count(u)) {
            Chain ch;
            for (int v = u; v >= 0; v = prev[static_cast<std::size_t>(v)]) ch.plaques.push_back(v);
            std::reverse(ch.plaques.begin(), ch.plaques.end());
            return ch;
        }
        for (int v : atlas.neighbors(u)) {
            const double nd = d + atlas.plaque_diameter(v);
            if (nd < dist[static_cast<std::size_t>(v)]) {
                dist[static_cast<std::size_t>(v)] = nd;
                prev[static_cast<std::size_t>(v)] = u;
                pq.emplace(nd, v);
            }
        }
    }
    return {};
}

double plaque_metric(const Atlas& atlas, CellIndex x, CellIndex y) {
    const Chain ch = shortest_chain(atlas, x, y);
    if (ch.plaques.empty()) return std::numeric_limits<double>::infinity();
    return ch.weight(atlas);
}

// ---------------------------------------------------------------------------
// Builders

Atlas tiled_atlas(const Box& region, double scale, const FieldBuilder& build, bool close_under_intersection) {
    const auto& sp = region.cells.space();
    if (!(scale > 0.0)) throw Error("atlas scale must be positive");
    Rect hull{sp.width(), sp.height(), -1, -1};
    for (CellIndex c : region.cells.cells()) {
        hull.c0 = std::min(hull.c0, sp.col(c));
        hull.c1 = std::max(hull.c1, sp.col(c));
        hull.r0 = std::min(hull.r0, sp.row(c));
        hull.r1 = std::max(hull.r1, sp.row(c));
    }
    int half = std::max(2, static_cast<int>(std::lround(scale * sp.resolution() / 2.0)));
    const int side = 2 * half + 1;  // boxes two strides apart share a column
    std::vector<Rect> rects;
    for (int r0 : tile_starts(hull.r0, hull.r1, side, half))
        for (int c0 : tile_starts(hull.c0, hull.c1, side, half))
            rects.push_back({c0, r0, std::min(c0 + side - 1, hull.c1), std::min(r0 + side - 1, hull.r1)});
    if (close_under_intersection) {
        std::set<Rect> seen(rects.begin(), rects.end());
        const std::size_t base = rects.size();
        for (std::size_t i = 0; i < base; ++i)
            for (std::size_t j = i + 1; j < base; ++j) {
                // Sliver overlaps of boxes two strides apart add nothing a chain needs.
                const Rect m = rects[i].meet(rects[j]);
                if (m.empty() || m.c1 - m.c0 < half || m.r1 - m.r0 < half) continue;
                if (seen.insert(m).second) rects.push_back(m);
            }
    }
    const auto region_mask = region.cells.mask();
    std::vector<AtlasChart> charts;
    for (const Rect& rc : rects) {
        std::vector<CellIndex> cells;
        for (int r = rc.r0; r <= rc.r1; ++r)
            for (int c = rc.c0; c <= rc.c1; ++c) {
                const CellIndex id = sp.index(c, r);
                if (region_mask[static_cast<std::size_t>(id)]) cells.push_back(id);
            }
        if (cells.empty()) continue;
        Box box = Box::from_cells(CellSet(sp, std::move(cells)));
        LabelField f = build(box);
        charts.push_back({std::move(box), std::move(f)});
    }
    return Atlas(region, std::move(charts));
}

namespace {

struct LineFrame {
    Point normal;
    double width;
};

LineFrame line_frame(Point direction, double h) {
    const double len = std::hypot(direction.x, direction.y);
    if (!(len > 0.0)) throw Error("line direction must be nonzero");
    const Point n{-direction.y / len, direction.x / len};
    return {n, h * std::max(std::abs(n.x), std::abs(n.y))};
}

std::int64_t line_key(Point c, const LineFrame& fr) {
    return static_cast<std::int64_t>(std::floor((c.x * fr.normal.x + c.y * fr.normal.y) / fr.width + 1e-9));
}

}  // namespace

LabelField line_field(const CellSet& domain, Point direction) {
    const auto& sp = domain.space();
    const LineFrame fr = line_frame(direction, sp.cell_size());
    return LabelField::from_key(domain, [&](CellIndex c) { return line_key(sp.center(c), fr); });
}

Atlas horizontal_atlas(const Box& region, double scale) {
    return tiled_atlas(region, scale, [](const Box& b) { return horizontal_foliation(b.cells); });
}

Atlas stable_atlas(const SurfaceMap& m, double delta, int horizon, double scale, const GridSpace& space,
                   Direction direction) {
    if (!m.hyperbolic()) throw Error("stable atlas needs a hyperbolic map");
    if (space.kind() != m.space_kind()) throw Error("grid space does not match the map's surface");
    if (!(delta > 0.0)) throw Error("delta must be positive");
    if (horizon < 0) throw Error("horizon must be nonnegative");
    if (scale > delta) throw Error("atlas scale exceeds delta");
    const bool stable = direction == Direction::Stable;
    const Point d = stable ? m.stable_direction() : m.unstable_direction();
    const LineFrame fr = line_frame(d, space.cell_size());
    const auto& a = m.matrix();

    // Stable plaques are pushed forward, unstable ones backward.
    const auto push = [&] {
        if (stable) return a;
        const int det = a[0] * a[3] - a[1] * a[2];
        return std::array<int, 4>{a[3] * det, -a[1] * det, -a[2] * det, a[0] * det};
    }();
    auto certify = [&](const LabelField& f) {
        for (int p = 0; p < f.plaque_count(); ++p) {
            const auto& cells = f.plaque_cells(p);
            // Evaluation points lie on the plaque's central line, so only the two extremes matter.
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (CellIndex c : cells) {
                const Point q = space.center(c);
                const double t = q.x * d.x + q.y * d.y;
                lo = std::min(lo, t);
                hi = std::max(hi, t);
            }
            Point v{(hi - lo) * d.x, (hi - lo) * d.y};
            for (int n = 0; n <= horizon; ++n) {
                if (std::hypot(v.x, v.y) > delta)
                    throw Error("plaque at cell " + std::to_string(cells.front()) + " is not delta-" +
                                (stable ? "stable" : "unstable") + " at step " + std::to_string(n));
                v = Point{push[0] * v.x + push[1] * v.y, push[2] * v.x + push[3] * v.y};
            }
        }
    };

    const Box region = Box::rectangle(space, 0, 0, space.width(), space.height(), false);
    Atlas atlas = tiled_atlas(region, scale, [&](const Box& b) {
        LabelField f = LabelField::from_key(b.cells, [&](CellIndex c) { return line_key(space.center(c), fr); });
        certify(f);
        return f;
    });
    const auto rep = compatibility_check(atlas);
    if (!rep.ok)
        throw Error("charts " + std::to_string(rep.failing_pair->first) + " and " +
                    std::to_string(rep.failing_pair->second) + " disagree at cell " + std::to_string(*rep.witness));
    return atlas;
}

// ---------------------------------------------------------------------------
// Leaf reports

namespace {

// Number of eight-connected runs of the leaf on the Chebyshev ring of radius 2 around c;
// nullopt when the ring leaves the region.
std::optional<int> ring_branches(const GridSpace& sp, CellIndex c, const std::vector<std::uint8_t>& in_leaf,
                                 const std::vector<std::uint8_t>& in_region) {
    static const std::array<std::pair<int, int>, 16> ring = [] {
        std::array<std::pair<int, int>, 16> r{};
        int k = 0;
        for (int dc = -2; dc <= 2; ++dc) r[static_cast<std::size_t>(k++)] = {dc, -2};
        for (int dr = -1; dr <= 2; ++dr) r[static_cast<std::size_t>(k++)] = {2, dr};
        for (int dc = 1; dc >= -2; --dc) r[static_cast<std::size_t>(k++)] = {dc, 2};
        for (int dr = 1; dr >= -1; --dr) r[static_cast<std::size_t>(k++)] = {-2, dr};
        return r;
    }();
    std::array<bool, 16> on{};
    for (std::size_t k = 0; k < ring.size(); ++k) {
        auto n = sp.offset(c, ring[k].first, ring[k].second);
        if (!n || !in_region[static_cast<std::size_t>(*n)]) return std::nullopt;
        on[k] = in_leaf[static_cast<std::size_t>(*n)] != 0;
    }
    // Ring neighbours along the cycle are eight-adjacent; count maximal runs.
    int runs = 0;
    bool all = true;
    for (std::size_t k = 0; k < on.size(); ++k) {
        if (!on[k]) all = false;
        if (on[k] && !on[(k + on.size() - 1) % on.size()]) ++runs;
    }
    return all ? 1 : runs;
}

bool leaf_branched(const Atlas& atlas, const std::vector<CellIndex>& cells, std::vector<std::uint8_t>& scratch,
                   const std::vector<std::uint8_t>& in_region, CellIndex* witness) {
    const auto& sp = atlas.space();
    for (CellIndex c : cells) scratch[static_cast<std::size_t>(c)] = 1;
    bool branched = false;
    for (CellIndex c : cells) {
        auto b = ring_branches(sp, c, scratch, in_region);
        if (b && *b >= 3) {
            branched = true;
            if (witness) *witness = c;
            break;
        }
    }
    for (CellIndex c : cells) scratch[static_cast<std::size_t>(c)] = 0;
    return branched;
}

}  // namespace

GenericityReport leaf_genericity_report(const Atlas& atlas, int samples, std::uint64_t seed) {
    const auto& sp = atlas.space();
    std::vector<CellIndex> covered;
    for (CellIndex c = 0; c < sp.cell_count(); ++c)
        if (!atlas.plaques_at(c).empty()) covered.push_back(c);
    if (covered.empty()) throw Error("atlas covers no cells");
    std::vector<CellIndex> picks;
    if (samples <= 0) {
        picks = covered;
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::size_t> pick(0, covered.size() - 1);
        for (int i = 0; i < samples; ++i) picks.push_back(covered[pick(rng)]);
    }

    std::vector<std::vector<int>> by_leaf(static_cast<std::size_t>(atlas.leaf_count()));
    for (int id = 0; id < atlas.plaque_count(); ++id) by_leaf[static_cast<std::size_t>(atlas.leaf_id(id))].push_back(id);
    std::vector<std::uint8_t> scratch(static_cast<std::size_t>(sp.cell_count()), 0);
    const auto in_region = atlas.region().cells.mask();
    std::map<int, std::optional<CellIndex>> verdict;  // leaf -> branch witness

    GenericityReport rep;
    for (CellIndex x : picks) {
        const int l = atlas.leaf_id(atlas.plaques_at(x).front());
        auto it = verdict.find(l);
        if (it == verdict.end()) {
            CellIndex w = -1;
            const auto cells = leaf_cells(atlas, by_leaf[static_cast<std::size_t>(l)]);
            const bool br = leaf_branched(atlas, cells, scratch, in_region, &w);
            it = verdict.emplace(l, br ? std::optional<CellIndex>(w) : std::nullopt).first;
        }
        ++rep.samples;
        if (it->second) {
            ++rep.branched;
            if (std::find(rep.branch_witnesses.begin(), rep.branch_witnesses.end(), *it->second) ==
                rep.branch_witnesses.end())
                rep.branch_witnesses.push_back(*it->second);
        }
    }
    rep.branch_free_fraction = 1.0 - static_cast<double>(rep.branched) / rep.samples;
    return rep;
}

CompactnessProbe leaf_compactness_probe(const Atlas& atlas, CellIndex x) {
    const auto& sp = atlas.space();
    const int l = atlas.leaf_id(covering(atlas, x).front());
    const auto plaques = leaf_plaques(atlas, l);
    const auto cells = leaf_cells(atlas, plaques);
    const auto in_region = atlas.region().cells.mask();
    CompactnessProbe pr;
    pr.leaf_cells = cells.size();
    pr.plaque_count = static_cast<int>(plaques.size());
    static const std::array<std::pair<int, int>, 4> steps{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
    for (CellIndex c : cells) {
        for (auto [dc, dr] : steps) {
            auto n = sp.offset(c, dc, dr);
            if (!n) continue;  // edge of a rectangle chart: the surface ends here
            const bool seam = sp.col(*n) != sp.col(c) + dc || sp.row(*n) != sp.row(c) + dr;
            if (seam || !in_region[static_cast<std::size_t>(*n)]) {
                pr.finite_cover = false;
                return pr;
            }
        }
    }
    return pr;
}

}  // namespace cwlab
