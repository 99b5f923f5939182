#include "cwlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace cwlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double wrap_unit(double v) {
    double w = v - std::floor(v);
    return w >= 1.0 ? 0.0 : w;
}

double torus_delta(double d) {
    d = std::fabs(d);
    d -= std::floor(d);
    return std::min(d, 1.0 - d);
}

double torus_metric(Point a, Point b) {
    return std::hypot(torus_delta(a.x - b.x), torus_delta(a.y - b.y));
}

// One-dimensional squared distance transform (lower envelope of parabolas).
void dt1d(const double* f, double* d, int n, std::vector<int>& v, std::vector<double>& z) {
    v.assign(static_cast<std::size_t>(n), 0);
    z.assign(static_cast<std::size_t>(n) + 1, 0.0);
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[q] == kInf) continue;
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -kInf;
            z[1] = kInf;
            continue;
        }
        double s = 0.0;
        while (true) {
            const int p = v[static_cast<std::size_t>(k)];
            s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * q - 2.0 * p);
            if (s <= z[static_cast<std::size_t>(k)]) {
                --k;
                if (k < 0) break;
            } else {
                break;
            }
        }
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -kInf;
            z[1] = kInf;
            continue;
        }
        ++k;
        v[static_cast<std::size_t>(k)] = q;
        z[static_cast<std::size_t>(k)] = s;
        z[static_cast<std::size_t>(k) + 1] = kInf;
    }
    if (k < 0) {
        std::fill(d, d + n, kInf);
        return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
        while (z[static_cast<std::size_t>(j) + 1] < q) ++j;
        const double diff = q - v[static_cast<std::size_t>(j)];
        d[q] = diff * diff + f[v[static_cast<std::size_t>(j)]];
    }
}

// Squared distance transform in cell units over a w x h grid, optionally
// periodic in both directions.
std::vector<double> squared_edt(const std::vector<std::uint8_t>& mask, int w, int h, bool periodic) {
    std::vector<double> g(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) g[i] = mask[i] ? 0.0 : kInf;

    const int rep = periodic ? 3 : 1;
    std::vector<int> v;
    std::vector<double> z;
    std::vector<double> f, d;

    auto pass = [&](int lines, int len, auto get, auto set) {
        const int n = len * rep;
        f.resize(static_cast<std::size_t>(n));
        d.resize(static_cast<std::size_t>(n));
        for (int line = 0; line < lines; ++line) {
            for (int r = 0; r < rep; ++r)
                for (int i = 0; i < len; ++i) f[static_cast<std::size_t>(r * len + i)] = get(line, i);
            dt1d(f.data(), d.data(), n, v, z);
            const int off = periodic ? len : 0;
            for (int i = 0; i < len; ++i) set(line, i, d[static_cast<std::size_t>(off + i)]);
        }
    };

    std::vector<double> tmp(g.size());
    pass(
        w, h, [&](int x, int y) { return g[static_cast<std::size_t>(y * w + x)]; },
        [&](int x, int y, double val) { tmp[static_cast<std::size_t>(y * w + x)] = val; });
    pass(
        h, w, [&](int y, int x) { return tmp[static_cast<std::size_t>(y * w + x)]; },
        [&](int y, int x, double val) { g[static_cast<std::size_t>(y * w + x)] = val; });
    return g;
}

struct IPoint {
    long long x, y;
};

long long cross(const IPoint& o, const IPoint& a, const IPoint& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

std::vector<IPoint> convex_hull(std::vector<IPoint> pts) {
    std::sort(pts.begin(), pts.end(), [](const IPoint& a, const IPoint& b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    if (pts.size() < 3) return pts;
    std::vector<IPoint> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

std::vector<IPoint> hull_of(const CellSet& s) {
    const auto& sp = s.space();
    std::vector<IPoint> pts;
    pts.reserve(s.size());
    for (CellIndex c : s.cells()) pts.push_back({sp.col(c), sp.row(c)});
    return convex_hull(std::move(pts));
}

void require_nonempty(const CellSet& s, const char* what) {
    if (s.empty()) throw Error(std::string("empty set has no ") + what);
}

}  // namespace

std::string to_string(SpaceKind kind) {
    switch (kind) {
    case SpaceKind::Rectangle: return "rectangle";
    case SpaceKind::Torus: return "torus";
    case SpaceKind::SphereQuotient: return "sphere";
    }
    return "unknown";
}

SpaceKind space_kind_from_string(const std::string& name) {
    if (name == "rectangle") return SpaceKind::Rectangle;
    if (name == "torus") return SpaceKind::Torus;
    if (name == "sphere") return SpaceKind::SphereQuotient;
    throw Error("unknown space kind '" + name + "'");
}

// ---------------------------------------------------------------------------
// GridSpace

GridSpace GridSpace::rectangle(Bounds b, int resolution) {
    if (resolution < 8) throw Error("resolution must be at least 8");
    if (!(b.x1 > b.x0) || !(b.y1 > b.y0)) throw Error("degenerate rectangle bounds");
    GridSpace g;
    g.kind_ = SpaceKind::Rectangle;
    g.resolution_ = resolution;
    g.bounds_ = b;
    g.width_ = static_cast<int>(std::lround((b.x1 - b.x0) * resolution));
    g.height_ = static_cast<int>(std::lround((b.y1 - b.y0) * resolution));
    if (g.width_ < 1 || g.height_ < 1) throw Error("rectangle smaller than one cell");
    return g;
}

GridSpace GridSpace::node_rectangle(Bounds b, int resolution) {
    const double h = 0.5 / resolution;
    GridSpace g = rectangle({b.x0 - h, b.x1 + h, b.y0 - h, b.y1 + h}, resolution);
    return g;
}

GridSpace GridSpace::torus(int resolution) {
    if (resolution < 8) throw Error("resolution must be at least 8");
    GridSpace g;
    g.kind_ = SpaceKind::Torus;
    g.resolution_ = resolution;
    g.bounds_ = {0.0, 1.0, 0.0, 1.0};
    g.width_ = resolution;
    g.height_ = resolution;
    return g;
}

GridSpace GridSpace::sphere_quotient(int resolution) {
    if (resolution < 8) throw Error("resolution must be at least 8");
    if (resolution % 2 != 0) throw Error("sphere quotient needs an even resolution");
    GridSpace g;
    g.kind_ = SpaceKind::SphereQuotient;
    g.resolution_ = resolution;
    g.bounds_ = {0.0, 1.0, 0.0, 0.5};
    g.width_ = resolution;
    g.height_ = resolution / 2;
    return g;
}

bool GridSpace::operator==(const GridSpace& o) const {
    return kind_ == o.kind_ && resolution_ == o.resolution_ && width_ == o.width_ &&
           height_ == o.height_ && bounds_.x0 == o.bounds_.x0 && bounds_.x1 == o.bounds_.x1 &&
           bounds_.y0 == o.bounds_.y0 && bounds_.y1 == o.bounds_.y1;
}

Point GridSpace::center(CellIndex c) const {
    const double h = cell_size();
    return {bounds_.x0 + (col(c) + 0.5) * h, bounds_.y0 + (row(c) + 0.5) * h};
}

std::optional<CellIndex> GridSpace::locate(Point p) const {
    const double r = resolution_;
    if (kind_ == SpaceKind::Rectangle) {
        const int i = static_cast<int>(std::floor((p.x - bounds_.x0) * r));
        const int j = static_cast<int>(std::floor((p.y - bounds_.y0) * r));
        if (i < 0 || j < 0 || i >= width_ || j >= height_) return std::nullopt;
        return index(i, j);
    }
    double x = wrap_unit(p.x), y = wrap_unit(p.y);
    if (kind_ == SpaceKind::SphereQuotient && y >= 0.5) {
        x = wrap_unit(1.0 - x);
        y = wrap_unit(1.0 - y);
    }
    int i = std::min(static_cast<int>(std::floor(x * r)), width_ - 1);
    int j = std::min(static_cast<int>(std::floor(y * r)), height_ - 1);
    return index(i, j);
}

std::optional<CellIndex> GridSpace::offset(CellIndex c, int dcol, int drow) const {
    int i = col(c) + dcol;
    int j = row(c) + drow;
    switch (kind_) {
    case SpaceKind::Rectangle:
        if (i < 0 || j < 0 || i >= width_ || j >= height_) return std::nullopt;
        return index(i, j);
    case SpaceKind::Torus:
        i = ((i % width_) + width_) % width_;
        j = ((j % height_) + height_) % height_;
        return index(i, j);
    case SpaceKind::SphereQuotient: {
        // Lift to the full torus row range [0, 2h), then fold rows >= h by p -> -p.
        const int full = 2 * height_;
        j = ((j % full) + full) % full;
        i = ((i % width_) + width_) % width_;
        if (j >= height_) {
            j = full - 1 - j;
            i = width_ - 1 - i;
        }
        return index(i, j);
    }
    }
    return std::nullopt;
}

void GridSpace::for_each_neighbor8(CellIndex c, const std::function<void(CellIndex)>& fn) const {
    for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
            if (di == 0 && dj == 0) continue;
            if (auto n = offset(c, di, dj); n && *n != c) fn(*n);
        }
}

void GridSpace::for_each_neighbor4(CellIndex c, const std::function<void(CellIndex)>& fn) const {
    static constexpr int d[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (const auto& o : d)
        if (auto n = offset(c, o[0], o[1]); n && *n != c) fn(*n);
}

double GridSpace::metric(Point a, Point b) const {
    switch (kind_) {
    case SpaceKind::Rectangle: return std::hypot(a.x - b.x, a.y - b.y);
    case SpaceKind::Torus: return torus_metric(a, b);
    case SpaceKind::SphereQuotient: return std::min(torus_metric(a, b), torus_metric(a, {-b.x, -b.y}));
    }
    return kInf;
}

// ---------------------------------------------------------------------------
// CellSet

CellSet::CellSet(GridSpace space, std::vector<CellIndex> cells) : space_(std::move(space)), cells_(std::move(cells)) {
    std::sort(cells_.begin(), cells_.end());
    cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
    if (!cells_.empty() && (cells_.front() < 0 || cells_.back() >= space_.cell_count()))
        throw Error("cell index out of range of the space");
}

CellSet CellSet::full(const GridSpace& space) {
    std::vector<CellIndex> all(static_cast<std::size_t>(space.cell_count()));
    for (CellIndex i = 0; i < space.cell_count(); ++i) all[static_cast<std::size_t>(i)] = i;
    return CellSet(space, std::move(all));
}

CellSet CellSet::from_predicate(const GridSpace& space, const std::function<bool(Point)>& pred) {
    std::vector<CellIndex> out;
    for (CellIndex i = 0; i < space.cell_count(); ++i)
        if (pred(space.center(i))) out.push_back(i);
    return CellSet(space, std::move(out));
}

bool CellSet::contains(CellIndex c) const { return std::binary_search(cells_.begin(), cells_.end(), c); }

std::vector<std::uint8_t> CellSet::mask() const {
    std::vector<std::uint8_t> m(static_cast<std::size_t>(space_.cell_count()), 0);
    for (CellIndex c : cells_) m[static_cast<std::size_t>(c)] = 1;
    return m;
}

CellSet CellSet::unite(const CellSet& o) const {
    std::vector<CellIndex> out;
    std::set_union(cells_.begin(), cells_.end(), o.cells_.begin(), o.cells_.end(), std::back_inserter(out));
    return CellSet(space_, std::move(out));
}

CellSet CellSet::intersect(const CellSet& o) const {
    std::vector<CellIndex> out;
    std::set_intersection(cells_.begin(), cells_.end(), o.cells_.begin(), o.cells_.end(), std::back_inserter(out));
    return CellSet(space_, std::move(out));
}

CellSet CellSet::subtract(const CellSet& o) const {
    std::vector<CellIndex> out;
    std::set_difference(cells_.begin(), cells_.end(), o.cells_.begin(), o.cells_.end(), std::back_inserter(out));
    return CellSet(space_, std::move(out));
}

bool CellSet::is_subset_of(const CellSet& o) const {
    return std::includes(o.cells_.begin(), o.cells_.end(), cells_.begin(), cells_.end());
}

// ---------------------------------------------------------------------------
// Continuum / components

Continuum::Continuum(CellSet set) : set_(std::move(set)) {
    if (set_.empty()) throw Error("a continuum must be nonempty");
    if (!is_connected(set_)) throw Error("cell set is not connected");
}

std::vector<Continuum> components(const CellSet& s) {
    std::vector<Continuum> out;
    if (s.empty()) return out;
    const auto& sp = s.space();
    auto m = s.mask();  // 1 = unvisited member
    std::vector<CellIndex> queue;
    for (CellIndex seed : s.cells()) {
        if (m[static_cast<std::size_t>(seed)] != 1) continue;
        queue.clear();
        queue.push_back(seed);
        m[static_cast<std::size_t>(seed)] = 2;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            sp.for_each_neighbor8(queue[head], [&](CellIndex n) {
                if (m[static_cast<std::size_t>(n)] == 1) {
                    m[static_cast<std::size_t>(n)] = 2;
                    queue.push_back(n);
                }
            });
        }
        out.push_back(Continuum(CellSet(sp, queue), Continuum::Trusted{}));
    }
    return out;
}

bool is_connected(const CellSet& s) { return components(s).size() == 1; }

// ---------------------------------------------------------------------------
// Distances

DistanceField distance_transform(const CellSet& s) {
    require_nonempty(s, "distance transform");
    const auto& sp = s.space();
    DistanceField out{sp, std::vector<double>(static_cast<std::size_t>(sp.cell_count()))};
    const double h = sp.cell_size();
    switch (sp.kind()) {
    case SpaceKind::Rectangle:
    case SpaceKind::Torus: {
        auto d2 = squared_edt(s.mask(), sp.width(), sp.height(), sp.kind() == SpaceKind::Torus);
        for (std::size_t i = 0; i < d2.size(); ++i) out.values[i] = std::sqrt(d2[i]) * h;
        break;
    }
    case SpaceKind::SphereQuotient: {
        // Lift to the covering torus: cell (i, j) and its antipode (n-1-i, n-1-j).
        const int n = sp.resolution();
        std::vector<std::uint8_t> lifted(static_cast<std::size_t>(n) * n, 0);
        for (CellIndex c : s.cells()) {
            const int i = sp.col(c), j = sp.row(c);
            lifted[static_cast<std::size_t>(j * n + i)] = 1;
            lifted[static_cast<std::size_t>((n - 1 - j) * n + (n - 1 - i))] = 1;
        }
        auto d2 = squared_edt(lifted, n, n, true);
        for (CellIndex c = 0; c < sp.cell_count(); ++c)
            out.values[static_cast<std::size_t>(c)] =
                std::sqrt(d2[static_cast<std::size_t>(sp.row(c) * n + sp.col(c))]) * h;
        break;
    }
    }
    return out;
}

double hausdorff_excess(const CellSet& a, const CellSet& b) {
    require_nonempty(a, "Hausdorff distance");
    require_nonempty(b, "Hausdorff distance");
    if (!(a.space() == b.space())) throw Error("Hausdorff distance between sets of different spaces");
    const auto db = distance_transform(b);
    double m = 0.0;
    for (CellIndex c : a.cells()) m = std::max(m, db.at(c));
    return m;
}

double hausdorff_distance(const CellSet& a, const CellSet& b) {
    if (a.empty() || b.empty()) throw Error("empty set has no Hausdorff distance");
    return std::max(hausdorff_excess(a, b), hausdorff_excess(b, a));
}

double diameter(const CellSet& s) {
    require_nonempty(s, "diameter");
    const auto& sp = s.space();
    if (sp.kind() == SpaceKind::Rectangle && s.size() > 32) {
        const auto hull = hull_of(s);
        long long best = 0;
        for (std::size_t i = 0; i < hull.size(); ++i)
            for (std::size_t j = i + 1; j < hull.size(); ++j) {
                const long long dx = hull[i].x - hull[j].x, dy = hull[i].y - hull[j].y;
                best = std::max(best, dx * dx + dy * dy);
            }
        return std::sqrt(static_cast<double>(best)) * sp.cell_size();
    }
    const auto cells = s.cells();
    double best = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const Point p = sp.center(cells[i]);
        for (std::size_t j = i + 1; j < cells.size(); ++j) best = std::max(best, sp.metric(p, sp.center(cells[j])));
    }
    return best;
}

double whitney_size(const CellSet& a) {
    require_nonempty(a, "size");
    if (a.size() == 1) return 0.0;
    const auto& sp = a.space();
    const auto near = distance_transform(a);
    double total = 0.0;
    if (sp.kind() == SpaceKind::Rectangle) {
        // Farthest point of a set from any x is a vertex of its convex hull.
        const auto hull = hull_of(a);
        for (CellIndex x = 0; x < sp.cell_count(); ++x) {
            const long long cx = sp.col(x), cy = sp.row(x);
            long long far = 0;
            for (const auto& v : hull) {
                const long long dx = v.x - cx, dy = v.y - cy;
                far = std::max(far, dx * dx + dy * dy);
            }
            total += std::sqrt(static_cast<double>(far)) * sp.cell_size() - near.at(x);
        }
    } else {
        std::vector<Point> pts;
        for (CellIndex c : a.cells()) pts.push_back(sp.center(c));
        for (CellIndex x = 0; x < sp.cell_count(); ++x) {
            const Point px = sp.center(x);
            double far = 0.0;
            for (const auto& p : pts) far = std::max(far, sp.metric(px, p));
            total += far - near.at(x);
        }
    }
    return total / static_cast<double>(sp.cell_count());
}

CellSet ball(const GridSpace& space, Point p, double radius) {
    auto c0 = space.locate(p);
    std::vector<CellIndex> out;
    const int r = static_cast<int>(std::ceil(radius * space.resolution())) + 1;
    if (!c0) {
        for (CellIndex c = 0; c < space.cell_count(); ++c)
            if (space.metric(space.center(c), p) <= radius) out.push_back(c);
        return CellSet(space, std::move(out));
    }
    for (int dj = -r; dj <= r; ++dj)
        for (int di = -r; di <= r; ++di)
            if (auto c = space.offset(*c0, di, dj); c && space.metric(space.center(*c), p) <= radius)
                out.push_back(*c);
    return CellSet(space, std::move(out));
}

CellSet boundary_cells(const CellSet& s) {
    const auto& sp = s.space();
    const auto m = s.mask();
    std::vector<CellIndex> out;
    static constexpr int d[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (CellIndex c : s.cells()) {
        bool edge = false;
        for (const auto& o : d) {
            auto n = sp.offset(c, o[0], o[1]);
            if (!n || !m[static_cast<std::size_t>(*n)]) {
                edge = true;
                break;
            }
        }
        if (edge) out.push_back(c);
    }
    return CellSet(sp, std::move(out));
}

}  // namespace cwlab
