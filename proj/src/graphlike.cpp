#include "cwlab/graphlike.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "dsu.hpp"

namespace cwlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int row_of(const GridSpace& sp, double y) {
    const int r = static_cast<int>(std::lround((y - sp.bounds().y0) * sp.resolution() - 0.5));
    return std::clamp(r, 0, sp.height() - 1);
}

int col_of(const GridSpace& sp, double x) {
    const int c = static_cast<int>(std::lround((x - sp.bounds().x0) * sp.resolution() - 0.5));
    return std::clamp(c, 0, sp.width() - 1);
}

CellSet from_runs(const GridSpace& sp, const std::vector<int>& lo, const std::vector<int>& hi) {
    std::vector<CellIndex> cells;
    for (int c = 0; c < sp.width(); ++c)
        for (int r = lo[static_cast<std::size_t>(c)]; r <= hi[static_cast<std::size_t>(c)]; ++r)
            cells.push_back(sp.index(c, r));
    return CellSet(sp, std::move(cells));
}

}  // namespace

GraphLikeCheck validate_graphlike(const CellSet& c) {
    GraphLikeCheck out;
    const auto& sp = c.space();
    if (sp.kind() != SpaceKind::Rectangle) {
        out.reason = "graph-like sets live in a rectangle";
        return out;
    }
    const int w = sp.width(), h = sp.height();
    std::vector<int> lo(static_cast<std::size_t>(w), -1), hi(static_cast<std::size_t>(w), -1), count(static_cast<std::size_t>(w), 0);
    for (CellIndex cell : c.cells()) {
        const auto col = static_cast<std::size_t>(sp.col(cell));
        const int r = sp.row(cell);
        if (lo[col] < 0 || r < lo[col]) lo[col] = r;
        hi[col] = std::max(hi[col], r);
        ++count[col];
    }
    for (int col = 0; col < w; ++col) {
        const auto i = static_cast<std::size_t>(col);
        if (count[i] == 0) {
            out.column = col;
            out.reason = "empty column slice";
            return out;
        }
        if (count[i] != hi[i] - lo[i] + 1) {
            out.column = col;
            out.reason = "column slice is not a single run";
            return out;
        }
        if (lo[i] == 0 || hi[i] == h - 1) {
            out.column = col;
            out.reason = "set touches the top or bottom row";
            return out;
        }
        if (col > 0 && (lo[i] > hi[i - 1] || hi[i] < lo[i - 1])) {
            out.column = col;
            out.reason = "column run does not overlap its left neighbor";
            return out;
        }
    }
    if (has_solid_block(c, 3)) {
        out.reason = "set contains a filled 3x3 block";
        return out;
    }
    out.ok = true;
    return out;
}

GraphLikeContinuum make_graphlike(const CellSet& c) {
    const auto check = validate_graphlike(c);
    if (!check.ok) {
        std::string msg = "not graph-like: " + check.reason;
        if (check.column) msg += " at column " + std::to_string(*check.column);
        throw Error(msg);
    }
    const auto& sp = c.space();
    GraphLikeContinuum g{c, std::vector<int>(static_cast<std::size_t>(sp.width()), sp.height()),
                         std::vector<int>(static_cast<std::size_t>(sp.width()), -1)};
    for (CellIndex cell : c.cells()) {
        const auto col = static_cast<std::size_t>(sp.col(cell));
        g.slice_lo[col] = std::min(g.slice_lo[col], sp.row(cell));
        g.slice_hi[col] = std::max(g.slice_hi[col], sp.row(cell));
    }
    return g;
}

// ---------------------------------------------------------------------------
// Flow decomposition

namespace {

// Bands on one side of C. Each column lists its cells from the exit row towards
// C. Band k occupies positions [end[k-1], end[k]) of every column; the last band
// is the run of cells within two cells of C.
struct SideBands {
    std::vector<std::vector<int>> labels;  // per column, parallel to its cells
    int band_count = 0;
};

SideBands label_side(const std::vector<std::vector<CellIndex>>& cols, const DistanceField& dist,
                     const std::vector<double>& time, double h) {
    const std::size_t w = cols.size();
    std::vector<int> hug(w);
    for (std::size_t c = 0; c < w; ++c) {
        int k = static_cast<int>(cols[c].size());
        while (k > 1 && dist.at(cols[c][static_cast<std::size_t>(k - 1)]) <= 2.0 * h + 1e-12) --k;
        hug[c] = k;
    }
    int max_bands = std::numeric_limits<int>::max();
    for (std::size_t c = 0; c < w; ++c) {
        int g = hug[c];
        if (c > 0) g = std::min(g, hug[c - 1]);
        if (c + 1 < w) g = std::min(g, hug[c + 1]);
        max_bands = std::min(max_bands, g);
    }
    max_bands = std::max(max_bands, 1);

    // Uniform partition of 1 - exp(-T) into `bands` levels. Band k must end by
    // cap[k] so that the later bands still fit below it in every column, then
    // follows its flow level as closely as the neighbors allow. Where the flow
    // level stalls (valleys of C) the band is pushed down to its share of the
    // column so the valley is split into thin bands.
    const int bands = max_bands;
    std::vector<std::vector<int>> cap(static_cast<std::size_t>(std::max(bands - 1, 1)));
    cap.back() = hug;
    for (int k = bands - 3; k >= 0; --k) {
        const auto& next = cap[static_cast<std::size_t>(k + 1)];
        auto& cur = cap[static_cast<std::size_t>(k)];
        cur.resize(w);
        for (std::size_t c = 0; c < w; ++c) {
            int v = next[c];
            if (c > 0) v = std::min(v, next[c - 1]);
            if (c + 1 < w) v = std::min(v, next[c + 1]);
            cur[c] = v - 1;
        }
    }
    std::vector<std::vector<int>> ends(1, std::vector<int>(w, 1));  // the exit row is a band of its own
    for (int k = 1; k + 1 < bands; ++k) {
        const auto& prev = ends.back();
        const auto& top = cap[static_cast<std::size_t>(k)];
        std::vector<int> p(w);
        for (std::size_t c = 0; c < w; ++c) {
            int v = prev[c] + 1;
            if (c > 0) v = std::max(v, prev[c - 1] + 1);
            if (c + 1 < w) v = std::max(v, prev[c + 1] + 1);
            const auto& col = cols[c];
            int target = v;
            while (target < top[c]) {
                const double t = time[static_cast<std::size_t>(col[static_cast<std::size_t>(target)])];
                if (std::floor(bands * (1.0 - std::exp(-t))) > k) break;
                ++target;
            }
            const long share = 3L * (k + 1) * hug[c] + static_cast<long>(c % 3) * (bands - 1);
            target = std::max(target, static_cast<int>(share / (3L * (bands - 1))));
            p[c] = std::min(target, top[c]);
        }
        ends.push_back(std::move(p));
    }
    ends.back() = hug;

    SideBands out;
    out.band_count = static_cast<int>(ends.size()) + 1;
    out.labels.resize(w);
    for (std::size_t c = 0; c < w; ++c) {
        auto& lab = out.labels[c];
        lab.assign(cols[c].size(), out.band_count - 1);
        int j = 0;
        for (std::size_t k = 0; k < ends.size(); ++k)
            for (; j < ends[k][c]; ++j) lab[static_cast<std::size_t>(j)] = static_cast<int>(k);
    }
    return out;
}
}  // namespace

FlowDecomposition flow_decomposition(const GraphLikeContinuum& g) {
    const auto& sp = g.space();
    const int w = sp.width(), hgt = sp.height();
    const double h = sp.cell_size();
    const auto dist = distance_transform(g.cells);

    FlowDecomposition out;
    out.source = g;
    out.time.assign(static_cast<std::size_t>(sp.cell_count()), kInf);

    std::vector<std::vector<CellIndex>> up_rows(static_cast<std::size_t>(w)), down_rows(static_cast<std::size_t>(w));
    for (int c = 0; c < w; ++c) {
        const auto i = static_cast<std::size_t>(c);
        for (int r = hgt - 1; r > g.slice_hi[i]; --r) up_rows[i].push_back(sp.index(c, r));
        for (int r = 0; r < g.slice_lo[i]; ++r) down_rows[i].push_back(sp.index(c, r));
        for (const auto* side : {&up_rows[i], &down_rows[i]}) {
            double t = 0.0;
            for (std::size_t k = 0; k < side->size(); ++k) {
                const CellIndex cell = (*side)[k];
                if (k > 0) t += 0.5 * h * (1.0 / dist.at((*side)[k - 1]) + 1.0 / dist.at(cell));
                out.time[static_cast<std::size_t>(cell)] = t;
            }
        }
    }

    const auto upper = label_side(up_rows, dist, out.time, h);
    const auto lower = label_side(down_rows, dist, out.time, h);
    const int c_ord = upper.band_count;
    const int groups = upper.band_count + 1 + lower.band_count;

    // Ordinal per cell along the quotient arc: upper bands, C, lower bands reversed.
    std::vector<int> ord(static_cast<std::size_t>(sp.cell_count()), c_ord);
    for (int c = 0; c < w; ++c) {
        const auto i = static_cast<std::size_t>(c);
        for (std::size_t k = 0; k < up_rows[i].size(); ++k)
            ord[static_cast<std::size_t>(up_rows[i][k])] = upper.labels[i][k];
        for (std::size_t k = 0; k < down_rows[i].size(); ++k)
            ord[static_cast<std::size_t>(down_rows[i][k])] = groups - 1 - lower.labels[i][k];
    }

    out.field = LabelField::from_labels(CellSet::full(sp), ord);
    std::vector<int> plaque_of_ord(static_cast<std::size_t>(groups), -1);
    for (CellIndex cell = 0; cell < sp.cell_count(); ++cell)
        plaque_of_ord[static_cast<std::size_t>(ord[static_cast<std::size_t>(cell)])] = out.field.label_of(cell);
    for (int p : plaque_of_ord)
        if (p >= 0) out.band_order.push_back(p);
    out.c_plaque = plaque_of_ord[static_cast<std::size_t>(c_ord)];

    std::vector<CellIndex> up_contact, down_contact;
    for (CellIndex cell : g.cells.cells()) {
        bool up = false, down = false;
        sp.for_each_neighbor8(cell, [&](CellIndex n) {
            const auto col = static_cast<std::size_t>(sp.col(n));
            if (sp.row(n) > g.slice_hi[col]) up = true;
            if (sp.row(n) < g.slice_lo[col]) down = true;
        });
        if (up) up_contact.push_back(cell);
        if (down) down_contact.push_back(cell);
    }
    out.upper_contact = CellSet(sp, std::move(up_contact));
    out.lower_contact = CellSet(sp, std::move(down_contact));
    return out;
}

// ---------------------------------------------------------------------------
// Generators

GraphLikeContinuum make_flat_row(int resolution) {
    const auto sp = GridSpace::node_rectangle({-1, 1, -1, 1}, resolution);
    const int r = row_of(sp, 0.0);
    return make_graphlike(from_runs(sp, std::vector<int>(static_cast<std::size_t>(sp.width()), r),
                                    std::vector<int>(static_cast<std::size_t>(sp.width()), r)));
}

GraphLikeContinuum make_cocarc(int resolution) {
    const auto sp = GridSpace::node_rectangle({-1, 1, -1, 1}, resolution);
    const int r = row_of(sp, 0.0);
    std::vector<int> lo(static_cast<std::size_t>(sp.width()), r), hi = lo;
    hi[static_cast<std::size_t>(col_of(sp, 0.0))] = row_of(sp, 0.5);
    return make_graphlike(from_runs(sp, lo, hi));
}

GraphLikeContinuum make_sin_one_over_x(int resolution) {
    const auto sp = GridSpace::node_rectangle({-2, 2, -2, 2}, resolution);
    const int w = sp.width();
    const int zero = col_of(sp, 0.0);
    auto sample = [&](int col) {
        const double x = sp.center(sp.index(col, 0)).x;
        return row_of(sp, std::sin(1.0 / x));
    };
    // Samples on every second column away from x = 0; turning points then sit
    // at least two columns apart, which keeps the run completion thin.
    std::vector<int> r(static_cast<std::size_t>(w), 0);
    for (int side : {1, -1}) {
        const int reach = side > 0 ? w - 1 - zero : zero;
        for (int k = 2; k <= reach; k += 2) r[static_cast<std::size_t>(zero + side * k)] = sample(zero + side * k);
        for (int k = 1; k <= reach; k += 2) {
            const auto i = static_cast<std::size_t>(zero + side * k);
            if (k == 1) r[i] = reach >= 2 ? r[static_cast<std::size_t>(zero + side * 2)] : sample(zero + side);
            else if (k == reach) r[i] = sample(zero + side * k);
            else r[i] = (r[static_cast<std::size_t>(zero + side * (k - 1))] + r[static_cast<std::size_t>(zero + side * (k + 1))]) / 2;
        }
    }
    std::vector<int> lo(static_cast<std::size_t>(w)), hi(static_cast<std::size_t>(w));
    for (int c = 0; c < w; ++c) {
        const auto i = static_cast<std::size_t>(c);
        if (c == zero) {
            lo[i] = row_of(sp, -1.0);
            hi[i] = row_of(sp, 1.0);
            continue;
        }
        const int toward_edge = c > zero ? c + 1 : c - 1;
        int a = r[i], b = r[i];
        if (toward_edge >= 0 && toward_edge < w) b = r[static_cast<std::size_t>(toward_edge)];
        lo[i] = std::min(a, b);
        hi[i] = std::max(a, b);
    }
    return make_graphlike(from_runs(sp, lo, hi));
}

int cantor_depth(int resolution) {
    int d = 0;
    double width = 1.0;
    while (width / 3.0 >= 3.0 / resolution - 1e-12) {
        width /= 3.0;
        ++d;
    }
    return d;
}

bool cantor_left_endpoint(double x, int depth) {
    constexpr double tol = 1e-9;
    if (x < -tol || x > 1.0 + tol) return false;
    double rest = std::max(0.0, x);
    for (int n = 0; n < depth; ++n) {
        rest *= 3.0;
        int digit = static_cast<int>(std::floor(rest + tol));
        digit = std::min(digit, 2);
        if (digit == 1) return false;
        rest -= digit;
        if (rest < 0) rest = 0;
    }
    return rest < tol * std::pow(3.0, depth);
}

namespace {

std::vector<double> cantor_left_endpoints(int depth) {
    std::vector<double> out;
    const int count = 1 << depth;
    for (int b = 0; b < count; ++b) {
        double x = 0.0, scale = 1.0;
        for (int n = depth - 1; n >= 0; --n) {
            scale /= 3.0;
            if (b & (1 << n)) x += 2.0 * scale;
        }
        out.push_back(x);
    }
    return out;
}

}  // namespace

GraphLikeContinuum make_cantor_square(int resolution) {
    const auto sp = GridSpace::node_rectangle({0, 1, 0, 1}, resolution);
    const int base = row_of(sp, 1.0 / 3.0);
    std::vector<int> lo(static_cast<std::size_t>(sp.width()), base), hi = lo;
    for (double x : cantor_left_endpoints(cantor_depth(resolution)))
        hi[static_cast<std::size_t>(col_of(sp, x))] = row_of(sp, 2.0 / 3.0);
    return make_graphlike(from_runs(sp, lo, hi));
}

double ternary_binary_map(double x, int depth) {
    if (depth < 1 || depth > 40) throw Error("ternary depth must be between 1 and 40");
    if (!(x >= 0.0 && x <= 1.0)) throw Error("point outside [0,1]");
    double rest = x, g = 0.0, half = 1.0;
    double err = 4.0 * std::numeric_limits<double>::epsilon();
    for (int n = 1; n <= depth; ++n) {
        half *= 0.5;
        if (rest <= err) break;
        if (rest >= 1.0 - err) {
            g += 2.0 * half;  // trailing digits are all 2
            break;
        }
        rest *= 3.0;
        err *= 3.0;
        int digit = static_cast<int>(std::floor(rest));
        if (digit == 1) {
            if (rest - 1.0 <= err) digit = 0;
            else if (2.0 - rest <= err) digit = 2;
            else throw Error("ternary digit 1 at position " + std::to_string(n) + ": point not in the Cantor set");
        }
        digit = std::min(digit, 2);
        rest -= digit;
        if (digit == 2) g += half;
        if (err > 1e-3) break;
    }
    return g;
}

// ---------------------------------------------------------------------------
// Devil's backgammon

Backgammon make_backgammon(int resolution, int depth) {
    if (depth < 0) depth = cantor_depth(resolution);
    const auto sp = GridSpace::node_rectangle({0, 1, 0, 1}, resolution);
    const int top = sp.height() - 1;

    // Segment feet are the endpoints of the depth-level intervals; right endpoints
    // carry g = (b+1)/2^depth and share it with the next interval's left endpoint.
    struct Segment {
        double foot, head;
        int fiber;
    };
    std::vector<Segment> segments;
    const auto lefts = cantor_left_endpoints(depth);
    const double len = std::pow(3.0, -depth);
    const int n = 1 << depth;
    for (int b = 0; b < n; ++b) {
        const double gl = static_cast<double>(b) / n, gr = static_cast<double>(b + 1) / n;
        segments.push_back({lefts[static_cast<std::size_t>(b)], gl, b});
        segments.push_back({lefts[static_cast<std::size_t>(b)] + len, gr, b + 1});
    }

    const int w = sp.width();
    std::vector<int> owner(static_cast<std::size_t>(sp.cell_count()), -1);
    std::vector<std::uint8_t> in_x(static_cast<std::size_t>(sp.cell_count()), 0);
    const int base = row_of(sp, 0.0);
    for (int c = 0; c < w; ++c) in_x[static_cast<std::size_t>(sp.index(c, base))] = 1;
    for (const auto& s : segments) {
        for (int r = base; r <= top; ++r) {
            const double t = std::clamp(sp.center(sp.index(0, r)).y, 0.0, 1.0);
            const auto idx = static_cast<std::size_t>(sp.index(col_of(sp, s.foot + (s.head - s.foot) * t), r));
            in_x[idx] = 1;
            if (owner[idx] < 0) owner[idx] = s.fiber;
        }
    }
    // The top edge lies in X; its unresolved points go to the nearest resolved fiber.
    std::vector<int> fiber_col(static_cast<std::size_t>(n + 1));
    for (int f = 0; f <= n; ++f) fiber_col[static_cast<std::size_t>(f)] = col_of(sp, static_cast<double>(f) / n);
    for (int c = 0; c < w; ++c) {
        const auto idx = static_cast<std::size_t>(sp.index(c, top));
        in_x[idx] = 1;
        if (owner[idx] >= 0) continue;
        int best = 0;
        for (int f = 1; f <= n; ++f)
            if (std::abs(fiber_col[static_cast<std::size_t>(f)] - c) < std::abs(fiber_col[static_cast<std::size_t>(best)] - c)) best = f;
        owner[idx] = best;
    }

    std::vector<CellIndex> xs, us, vs;
    for (CellIndex cell = 0; cell < sp.cell_count(); ++cell) {
        if (!in_x[static_cast<std::size_t>(cell)]) continue;
        xs.push_back(cell);
        const double y = sp.center(cell).y;
        if (y < 2.0 / 3.0) us.push_back(cell);
        if (y > 1.0 / 3.0) vs.push_back(cell);
    }
    Backgammon out;
    out.depth = depth;
    out.x = CellSet(sp, std::move(xs));
    const CellSet u(sp, std::move(us));
    out.q_u = single_plaque_field(u);
    const CellSet v(sp, std::move(vs));
    out.q_v = LabelField::from_key(v, [&](CellIndex c) { return static_cast<std::int64_t>(owner[static_cast<std::size_t>(c)]); });
    return out;
}

// ---------------------------------------------------------------------------
// Anomalous stable set

CellSet make_anomalous_stable_set(int resolution) {
    const auto sp = GridSpace::node_rectangle({-0.5, 2.5, -0.5, 1.5}, resolution);
    const double h = sp.cell_size();
    // Segment abscissae x with heights: E has x in {1} u {1 + 1/n}, n >= 2, and
    // the halving map contributes x / 2^m with height 2^-m.
    std::vector<std::pair<double, double>> candidates;
    for (int m = 0;; ++m) {
        const double s = std::ldexp(1.0, -m);
        if (s < h) break;
        candidates.emplace_back(s, s);
        for (int k = 2; s / k >= h; ++k) candidates.emplace_back(s * (1.0 + 1.0 / k), s);
    }
    std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

    const int base = row_of(sp, 0.0);
    std::vector<CellIndex> cells;
    for (int c = 0; c < sp.width(); ++c) cells.push_back(sp.index(c, base));
    int last_col = std::numeric_limits<int>::max();
    for (const auto& [x, height] : candidates) {
        const int col = col_of(sp, x);
        if (col > last_col - 2) continue;  // keep one empty column between kept segments
        last_col = col;
        const int r1 = row_of(sp, std::min(height, 1.5));
        for (int r = base; r <= r1; ++r) cells.push_back(sp.index(col, r));
    }
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    return CellSet(sp, std::move(cells));
}

int punctured_component_count(const CellSet& f, Point center, double radius) {
    const auto& sp = f.space();
    const int base = sp.locate({center.x, 0.0}) ? sp.row(*sp.locate({center.x, 0.0})) : -1;
    const CellSet b = ball(sp, center, radius);
    std::vector<CellIndex> keep;
    const CellSet near = f.intersect(b);
    for (CellIndex c : near.cells())
        if (sp.row(c) != base) keep.push_back(c);
    return static_cast<int>(components(CellSet(sp, std::move(keep))).size());
}

}  // namespace cwlab
