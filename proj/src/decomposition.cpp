#include "cwlab/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <unordered_set>

#include "dsu.hpp"

namespace cwlab {

namespace {

// Small domains use binary search over the sorted cells instead of a table over the space.
bool wants_dense(const CellSet& domain) {
    return domain.size() * 16 >= static_cast<std::size_t>(domain.space().cell_count());
}

std::vector<int> dense_lookup(const CellSet& domain) {
    std::vector<int> pos(static_cast<std::size_t>(domain.space().cell_count()), -1);
    const auto cells = domain.cells();
    for (std::size_t i = 0; i < cells.size(); ++i) pos[static_cast<std::size_t>(cells[i])] = static_cast<int>(i);
    return pos;
}

class Positions {
public:
    explicit Positions(const CellSet& domain) : cells_(domain.cells()) {
        if (wants_dense(domain)) dense_ = dense_lookup(domain);
    }
    int operator()(CellIndex c) const {
        if (!dense_.empty()) return dense_[static_cast<std::size_t>(c)];
        auto it = std::lower_bound(cells_.begin(), cells_.end(), c);
        return it != cells_.end() && *it == c ? static_cast<int>(it - cells_.begin()) : -1;
    }

private:
    std::span<const CellIndex> cells_;
    std::vector<int> dense_;
};

}  // namespace

// ---------------------------------------------------------------------------
// LabelField

LabelField LabelField::from_key(CellSet domain, const std::function<std::int64_t(CellIndex)>& key) {
    LabelField f;
    const auto& sp = domain.space();
    const auto cells = domain.cells();
    const Positions pos(domain);
    std::vector<std::int64_t> keys(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) keys[i] = key(cells[i]);

    detail::DisjointSets dsu(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        sp.for_each_neighbor8(cells[i], [&](CellIndex n) {
            const int j = pos(n);
            if (j > static_cast<int>(i) && keys[static_cast<std::size_t>(j)] == keys[i]) dsu.unite(i, static_cast<std::size_t>(j));
        });
    }
    std::vector<int> root_id(cells.size(), -1);
    f.labels_.resize(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const std::size_t r = dsu.find(i);
        if (root_id[r] < 0) {
            root_id[r] = static_cast<int>(f.plaques_.size());
            f.plaques_.emplace_back();
        }
        f.labels_[i] = root_id[r];
        f.plaques_[static_cast<std::size_t>(root_id[r])].push_back(cells[i]);
    }
    if (wants_dense(domain)) {
        f.lookup_ = dense_lookup(domain);
        for (std::size_t i = 0; i < cells.size(); ++i) f.lookup_[static_cast<std::size_t>(cells[i])] = f.labels_[i];
    }
    f.domain_ = std::move(domain);
    return f;
}

LabelField LabelField::from_labels(CellSet domain, const std::vector<int>& labels) {
    if (labels.size() != domain.size()) throw Error("label count does not match domain size");
    const Positions pos(domain);
    const auto cells = domain.cells();
    std::set<int> distinct(labels.begin(), labels.end());
    LabelField f = from_key(domain, [&](CellIndex c) { return labels[static_cast<std::size_t>(pos(c))]; });
    if (static_cast<std::size_t>(f.plaque_count()) != distinct.size()) {
        // Report the first label whose class split.
        std::map<int, int> first_plaque;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            auto [it, inserted] = first_plaque.emplace(labels[i], f.labels_[i]);
            if (!inserted && it->second != f.labels_[i])
                throw Error("plaque with label " + std::to_string(labels[i]) + " is not connected");
        }
    }
    return f;
}

std::optional<int> LabelField::find_label(CellIndex c) const {
    if (lookup_.empty()) {
        const auto cells = domain_.cells();
        auto it = std::lower_bound(cells.begin(), cells.end(), c);
        if (it == cells.end() || *it != c) return std::nullopt;
        return labels_[static_cast<std::size_t>(it - cells.begin())];
    }
    if (c < 0 || static_cast<std::size_t>(c) >= lookup_.size()) return std::nullopt;
    const int l = lookup_[static_cast<std::size_t>(c)];
    if (l < 0) return std::nullopt;
    return l;
}

int LabelField::label_of(CellIndex c) const {
    auto l = find_label(c);
    if (!l) throw Error("cell " + std::to_string(c) + " is outside the field domain");
    return *l;
}

Disc Disc::from_cells(CellSet cells) {
    if (cells.empty()) throw Error("empty disc");
    if (!is_connected(cells)) throw Error("disc domain is not connected");
    Disc d;
    d.boundary = boundary_cells(cells);
    d.cells = std::move(cells);
    return d;
}

// ---------------------------------------------------------------------------
// Builders

LabelField horizontal_foliation(const CellSet& domain) {
    const auto& sp = domain.space();
    return LabelField::from_key(domain, [&](CellIndex c) { return sp.row(c); });
}

LabelField vertical_foliation(const CellSet& domain) {
    const auto& sp = domain.space();
    return LabelField::from_key(domain, [&](CellIndex c) { return sp.col(c); });
}

LabelField sheared_foliation(const CellSet& domain, double slope) {
    const auto& sp = domain.space();
    return LabelField::from_key(domain, [&](CellIndex c) {
        const Point p = sp.center(c);
        return static_cast<std::int64_t>(std::floor((p.y - slope * p.x) / sp.cell_size()));
    });
}

LabelField diagonal_foliation(const CellSet& domain) {
    const auto& sp = domain.space();
    return LabelField::from_key(domain, [&](CellIndex c) { return sp.col(c) - sp.row(c); });
}

LabelField quadratic_foliation(const CellSet& domain) {
    const auto& sp = domain.space();
    return LabelField::from_key(domain, [&](CellIndex c) {
        const Point p = sp.center(c);
        return static_cast<std::int64_t>(std::floor((p.y - p.x * p.x) / sp.cell_size()));
    });
}

LabelField one_sided_field(const CellSet& domain) {
    const auto& sp = domain.space();
    const auto origin = sp.locate({0.0, 0.0});
    const int oc = origin ? sp.col(*origin) : 0;
    const int orow = origin ? sp.row(*origin) : 0;
    return LabelField::from_key(domain, [&](CellIndex c) -> std::int64_t {
        const int i = sp.col(c), j = sp.row(c);
        if (j > orow && i > oc) return (std::int64_t{1} << 40) + i;  // vertical rays
        return j;
    });
}

LabelField singleton_field(const CellSet& domain) {
    return LabelField::from_key(domain, [](CellIndex c) { return c; });
}

LabelField single_plaque_field(const CellSet& domain) {
    return LabelField::from_key(domain, [](CellIndex) { return 0; });
}

CellSet sheared_square(int resolution, double slope) {
    const auto sp = GridSpace::rectangle({0.0, 1.0, std::min(0.0, slope), std::max(1.0, 1.0 + slope)}, resolution);
    const double h = sp.cell_size();
    return CellSet::from_predicate(sp, [&](Point p) {
        const auto k = std::floor((p.y - slope * p.x) / h);
        return k >= 0 && k < resolution;
    });
}

// ---------------------------------------------------------------------------
// Restriction and quotient

LabelField monotone_restriction(const LabelField& q, const CellSet& y) {
    if (!(y.space() == q.space())) throw Error("restriction set lives in a different space");
    if (!y.is_subset_of(q.domain())) throw Error("restriction set is not contained in the field domain");
    return LabelField::from_key(y, [&](CellIndex c) { return q.label_of(c); });
}

bool QuotientGraph::connected() const {
    if (node_count == 0) return true;
    std::vector<char> seen(static_cast<std::size_t>(node_count), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int v : adjacency[static_cast<std::size_t>(u)])
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                ++count;
                stack.push_back(v);
            }
    }
    return count == node_count;
}

bool QuotientGraph::is_tree() const {
    return node_count > 0 && connected() && static_cast<int>(edges.size()) == node_count - 1;
}

bool QuotientGraph::is_path() const {
    if (!is_tree()) return false;
    for (int v = 0; v < node_count; ++v)
        if (degree(v) > 2) return false;
    return true;
}

std::vector<int> QuotientGraph::find_cycle() const {
    const auto n = static_cast<std::size_t>(node_count);
    std::vector<int> parent(n, -1), depth(n, -1);
    for (std::size_t root = 0; root < n; ++root) {
        if (depth[root] >= 0) continue;
        depth[root] = 0;
        std::queue<int> bfs;
        bfs.push(static_cast<int>(root));
        while (!bfs.empty()) {
            const int u = bfs.front();
            bfs.pop();
            for (int v : adjacency[static_cast<std::size_t>(u)]) {
                if (depth[static_cast<std::size_t>(v)] < 0) {
                    depth[static_cast<std::size_t>(v)] = depth[static_cast<std::size_t>(u)] + 1;
                    parent[static_cast<std::size_t>(v)] = u;
                    bfs.push(v);
                }
            }
        }
    }
    for (const auto& [a, b] : edges) {
        if (parent[static_cast<std::size_t>(a)] == b || parent[static_cast<std::size_t>(b)] == a) continue;
        // Non-tree edge closes a cycle through the BFS forest.
        std::vector<int> left{a}, right{b};
        int u = a, v = b;
        while (u != v) {
            if (depth[static_cast<std::size_t>(u)] >= depth[static_cast<std::size_t>(v)]) {
                u = parent[static_cast<std::size_t>(u)];
                left.push_back(u);
            } else {
                v = parent[static_cast<std::size_t>(v)];
                right.push_back(v);
            }
        }
        right.pop_back();
        left.insert(left.end(), right.rbegin(), right.rend());
        return left;
    }
    return {};
}

std::vector<int> QuotientGraph::path_order() const {
    if (!is_path()) return {};
    int start = 0;
    for (int v = 0; v < node_count; ++v)
        if (degree(v) <= 1) {
            start = v;
            break;
        }
    std::vector<int> order{start};
    int prev = -1, cur = start;
    while (static_cast<int>(order.size()) < node_count) {
        for (int nb : adjacency[static_cast<std::size_t>(cur)])
            if (nb != prev) {
                prev = cur;
                cur = nb;
                break;
            }
        order.push_back(cur);
    }
    return order;
}

QuotientGraph quotient_graph(const LabelField& q, bool with_diameters) {
    QuotientGraph g;
    g.node_count = q.plaque_count();
    const auto& sp = q.space();
    const auto cells = q.domain().cells();
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const int a = q.labels()[i];
        sp.for_each_neighbor4(cells[i], [&](CellIndex n) {
            if (auto b = q.find_label(n); b && *b > a) g.edges.emplace_back(a, *b);
        });
    }
    std::sort(g.edges.begin(), g.edges.end());
    g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
    g.adjacency.assign(static_cast<std::size_t>(g.node_count), {});
    for (const auto& [a, b] : g.edges) {
        g.adjacency[static_cast<std::size_t>(a)].push_back(b);
        g.adjacency[static_cast<std::size_t>(b)].push_back(a);
    }
    for (auto& adj : g.adjacency) std::sort(adj.begin(), adj.end());

    g.boundary_contact.assign(static_cast<std::size_t>(g.node_count), false);
    const CellSet rim = boundary_cells(q.domain());
    for (CellIndex c : rim.cells()) g.boundary_contact[static_cast<std::size_t>(q.label_of(c))] = true;
    if (with_diameters) {
        g.diameters.resize(static_cast<std::size_t>(g.node_count));
        for (int p = 0; p < g.node_count; ++p) g.diameters[static_cast<std::size_t>(p)] = diameter(q.plaque(p));
    }
    return g;
}

DendriteCheck is_dendrite_quotient(const LabelField& q) {
    if (!is_connected(q.domain())) throw Error("field domain is not connected");
    const auto g = quotient_graph(q, false);
    DendriteCheck r;
    r.is_dendrite = g.is_tree();
    if (!r.is_dendrite) r.cycle = g.find_cycle();
    return r;
}

// ---------------------------------------------------------------------------
// Dendrite proxy

int cubical_euler_characteristic(const CellSet& s) {
    const auto& sp = s.space();
    const bool wrap = sp.kind() == SpaceKind::Torus;
    const std::int64_t w = sp.width(), h = sp.height();
    const std::int64_t stride = w + 2;
    auto key = [&](std::int64_t x, std::int64_t y, int type) {
        if (wrap) {
            x = ((x % w) + w) % w;
            y = ((y % h) + h) % h;
        }
        return ((y * stride + x) << 2) | type;
    };
    std::unordered_set<std::int64_t> vertices, edges;
    vertices.reserve(s.size() * 4);
    edges.reserve(s.size() * 4);
    for (CellIndex c : s.cells()) {
        const std::int64_t i = sp.col(c), j = sp.row(c);
        vertices.insert(key(i, j, 0));
        vertices.insert(key(i + 1, j, 0));
        vertices.insert(key(i, j + 1, 0));
        vertices.insert(key(i + 1, j + 1, 0));
        edges.insert(key(i, j, 1));
        edges.insert(key(i, j + 1, 1));
        edges.insert(key(i, j, 2));
        edges.insert(key(i + 1, j, 2));
    }
    return static_cast<int>(vertices.size()) - static_cast<int>(edges.size()) + static_cast<int>(s.size());
}

bool has_solid_block(const CellSet& s, int k) {
    const auto& sp = s.space();
    const auto m = s.mask();
    for (CellIndex c : s.cells()) {
        bool full = true;
        for (int dj = 0; dj < k && full; ++dj)
            for (int di = 0; di < k && full; ++di) {
                auto n = sp.offset(c, di, dj);
                full = n && m[static_cast<std::size_t>(*n)];
            }
        if (full) return true;
    }
    return false;
}

std::optional<std::string> dendrite_proxy_failure(const CellSet& s) {
    if (s.empty()) return "empty plaque";
    if (!is_connected(s)) return "plaque is not connected";
    if (has_solid_block(s, 3)) return "plaque contains a filled 3x3 block";
    const int chi = cubical_euler_characteristic(s);
    if (chi != 1) return "plaque has Euler characteristic " + std::to_string(chi);
    return std::nullopt;
}

CwReport is_cw_decomposition(const LabelField& q, const Disc& d) {
    if (d.boundary.empty()) throw Error("domain without marked boundary");
    if (!(q.domain() == d.cells)) throw Error("field domain does not match the disc");
    CwReport r;
    const auto bmask = d.boundary.mask();
    for (int p = 0; p < q.plaque_count(); ++p) {
        const auto& cells = q.plaque_cells(p);
        const bool touches = std::any_of(cells.begin(), cells.end(),
                                         [&](CellIndex c) { return bmask[static_cast<std::size_t>(c)] != 0; });
        std::string why;
        if (!touches) {
            why = "plaque misses boundary";
        } else if (auto f = dendrite_proxy_failure(q.plaque(p))) {
            why = *f;
        }
        if (!why.empty()) {
            if (r.ok) r.failed_plaque = p;
            r.ok = false;
            r.diagnostics.push_back("plaque " + std::to_string(p) + ": " + why);
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Quotient tree points

PointClass classify_quotient_point(const LabelField& q, int plaque) {
    if (plaque < 0 || plaque >= q.plaque_count()) throw Error("plaque id out of range");
    const auto g = quotient_graph(q, false);
    if (!g.is_tree()) throw Error("quotient is not a dendrite");
    PointClass pc;
    pc.degree = g.degree(plaque);
    if (pc.degree <= 1)
        pc.kind = PointClass::Kind::End;
    else if (pc.degree == 2)
        pc.kind = PointClass::Kind::Regular;
    else
        pc.kind = PointClass::Kind::Ramification;
    return pc;
}

Separation separating_plaque(const LabelField& q, int p1, int p2, int p3) {
    const int n = q.plaque_count();
    for (int p : {p1, p2, p3})
        if (p < 0 || p >= n) throw Error("plaque id out of range");
    if (p1 == p2 || p2 == p3 || p1 == p3) throw Error("plaques must be pairwise distinct");
    const auto g = quotient_graph(q, false);
    if (!g.is_tree()) throw Error("quotient is not a dendrite");

    std::vector<int> parent(static_cast<std::size_t>(n), -1);
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::queue<int> bfs;
    bfs.push(p1);
    seen[static_cast<std::size_t>(p1)] = 1;
    while (!bfs.empty()) {
        const int u = bfs.front();
        bfs.pop();
        for (int v : g.adjacency[static_cast<std::size_t>(u)])
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                parent[static_cast<std::size_t>(v)] = u;
                bfs.push(v);
            }
    }
    auto path_from_root = [&](int t) {
        std::vector<int> path;
        for (int v = t; v != -1; v = parent[static_cast<std::size_t>(v)]) path.push_back(v);
        std::reverse(path.begin(), path.end());
        return path;
    };
    const auto a = path_from_root(p2), b = path_from_root(p3);
    int median = p1;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()) && a[i] == b[i]; ++i) median = a[i];

    Separation s;
    if (median == p1 || median == p2 || median == p3) {
        s.explanation = "plaque " + std::to_string(median) + " is the middle one and separates the others";
        return s;
    }
    s.plaque = median;
    s.explanation = "removing plaque " + std::to_string(median) + " leaves the three plaques in distinct components";
    return s;
}

}  // namespace cwlab
