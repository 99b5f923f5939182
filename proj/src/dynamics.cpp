#include "cwlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <random>

namespace cwlab {

namespace {

double wrap_unit(double v) {
    double w = v - std::floor(v);
    return w >= 1.0 ? 0.0 : w;
}

double torus_gap(double d) { return d - std::nearbyint(d); }

double torus_norm(Point a, Point b) { return std::hypot(torus_gap(a.x - b.x), torus_gap(a.y - b.y)); }

Point unit(Point v) {
    const double n = std::hypot(v.x, v.y);
    return {v.x / n, v.y / n};
}

Point eigenvector(const std::array<int, 4>& m, double lambda) {
    if (m[1] != 0) return unit({static_cast<double>(m[1]), lambda - m[0]});
    if (m[2] != 0) return unit({lambda - m[3], static_cast<double>(m[2])});
    return std::abs(lambda - m[0]) < 1e-12 ? Point{1.0, 0.0} : Point{0.0, 1.0};
}

}  // namespace

std::string to_string(MapKind kind) {
    switch (kind) {
    case MapKind::TorusAnosov: return "torus-anosov";
    case MapKind::SpherePseudoAnosov: return "sphere-pseudo-anosov";
    case MapKind::Identity: return "identity";
    }
    return "?";
}

MapKind map_kind_from_string(const std::string& name) {
    if (name == "torus-anosov") return MapKind::TorusAnosov;
    if (name == "sphere-pseudo-anosov") return MapKind::SpherePseudoAnosov;
    if (name == "identity") return MapKind::Identity;
    throw Error("unknown map kind: " + name);
}

SurfaceMap::SurfaceMap(MapKind kind, std::array<int, 4> m) : kind_(kind), m_(m) {
    const int det = m[0] * m[3] - m[1] * m[2];
    if (det != 1 && det != -1) throw Error("matrix is not invertible over the integers");
    inv_ = {det * m[3], -det * m[1], -det * m[2], det * m[0]};
    const double tr = m[0] + m[3];
    const double disc = tr * tr - 4.0 * det;
    if (disc > 0.0) {
        const double root = std::sqrt(disc);
        const double l1 = (tr + root) / 2.0, l2 = (tr - root) / 2.0;
        const double big = std::abs(l1) >= std::abs(l2) ? l1 : l2;
        const double small = std::abs(l1) >= std::abs(l2) ? l2 : l1;
        if (std::abs(big) > 1.0 + 1e-12) {
            hyperbolic_ = true;
            lambda_u_ = big;
            lambda_s_ = small;
            e_u_ = eigenvector(m, big);
            e_s_ = eigenvector(m, small);
        }
    }
}

SurfaceMap SurfaceMap::torus_anosov() { return SurfaceMap(MapKind::TorusAnosov, {2, 1, 1, 1}); }
SurfaceMap SurfaceMap::sphere_pseudo_anosov() { return SurfaceMap(MapKind::SpherePseudoAnosov, {2, 1, 1, 1}); }
SurfaceMap SurfaceMap::identity() { return SurfaceMap(MapKind::Identity, {1, 0, 0, 1}); }

SurfaceMap SurfaceMap::from_kind(MapKind kind) {
    switch (kind) {
    case MapKind::TorusAnosov: return torus_anosov();
    case MapKind::SpherePseudoAnosov: return sphere_pseudo_anosov();
    case MapKind::Identity: return identity();
    }
    throw Error("unknown map kind");
}

GridSpace SurfaceMap::make_space(int resolution) const {
    return quotient() ? GridSpace::sphere_quotient(resolution) : GridSpace::torus(resolution);
}

Point SurfaceMap::canonical(Point p) const {
    double x = wrap_unit(p.x), y = wrap_unit(p.y);
    if (quotient() && y >= 0.5) {
        x = wrap_unit(1.0 - x);
        y = wrap_unit(1.0 - y);
    }
    return {x, y};
}

Point SurfaceMap::forward(Point p) const {
    return canonical({m_[0] * p.x + m_[1] * p.y, m_[2] * p.x + m_[3] * p.y});
}

Point SurfaceMap::inverse(Point p) const {
    return canonical({inv_[0] * p.x + inv_[1] * p.y, inv_[2] * p.x + inv_[3] * p.y});
}

double SurfaceMap::metric(Point a, Point b) const {
    const double d = torus_norm(a, b);
    if (!quotient()) return d;
    return std::min(d, torus_norm(a, {-b.x, -b.y}));
}

std::vector<Point> SurfaceMap::prongs() const {
    if (!quotient()) return {};
    return {canonical({0.0, 0.0}), canonical({0.5, 0.0}), canonical({0.0, 0.5}), canonical({0.5, 0.5})};
}

Point orbit(const SurfaceMap& m, Point p, int n) {
    Point q = m.canonical(p);
    for (int i = 0; i < n; ++i) q = m.forward(q);
    for (int i = 0; i > n; --i) q = m.inverse(q);
    return q;
}

namespace {

// Lift of a chart cell's center that lies closest to a point of the plane.
Point nearest_lift(const SurfaceMap& m, Point center, Point near) {
    Point best{center.x + std::nearbyint(near.x - center.x), center.y + std::nearbyint(near.y - center.y)};
    if (m.quotient()) {
        const Point neg{-center.x + std::nearbyint(near.x + center.x), -center.y + std::nearbyint(near.y + center.y)};
        if (std::hypot(neg.x - near.x, neg.y - near.y) < std::hypot(best.x - near.x, best.y - near.y)) best = neg;
    }
    return best;
}

// Point of the square [c - h/2, c + h/2]^2 closest to the line anchor + t e.
Point square_point_near_line(Point c, double h, Point anchor, Point e) {
    const double half = h / 2.0;
    const double t0 = (c.x - anchor.x) * e.x + (c.y - anchor.y) * e.y;
    double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
    bool hits = true;
    auto clip = [&](double a, double d, double lower, double upper) {
        if (std::abs(d) < 1e-15) {
            if (a < lower || a > upper) hits = false;
            return;
        }
        double t1 = (lower - a) / d, t2 = (upper - a) / d;
        if (t1 > t2) std::swap(t1, t2);
        lo = std::max(lo, t1);
        hi = std::min(hi, t2);
    };
    clip(anchor.x, e.x, c.x - half, c.x + half);
    clip(anchor.y, e.y, c.y - half, c.y + half);
    if (hits && lo <= hi) {
        const double t = std::clamp(t0, lo, hi);
        return {anchor.x + t * e.x, anchor.y + t * e.y};
    }
    const Point nrm{-e.y, e.x};
    Point best = c;
    double best_off = std::numeric_limits<double>::infinity();
    for (int sx : {-1, 1})
        for (int sy : {-1, 1}) {
            const Point k{c.x + sx * half, c.y + sy * half};
            const double off = std::abs((k.x - anchor.x) * nrm.x + (k.y - anchor.y) * nrm.y);
            if (off < best_off) {
                best_off = off;
                best = k;
            }
        }
    return best;
}

struct Frontier {
    double key;
    CellIndex cell;
    Point lift;
    bool operator>(const Frontier& o) const { return key != o.key ? key > o.key : cell > o.cell; }
};

}  // namespace

FiniteHorizonPlaque finite_horizon_plaque(const SurfaceMap& m, const StablePlaqueSpec& request, const GridSpace& space) {
    const double h = space.cell_size();
    if (space.kind() != m.space_kind()) throw Error("grid space does not match the map's surface");
    if (request.horizon < 0) throw Error("horizon must be non-negative");
    if (request.delta < 4.0 * h) throw Error("delta below resolution floor (4 cells)");

    const bool stable = request.direction == Direction::Stable;
    const Point anchor = m.canonical(request.base);
    const Point dir = stable ? m.stable_direction() : m.unstable_direction();
    const int steps = request.horizon;
    auto images_of = [&](Point p) {
        std::vector<Point> out(static_cast<std::size_t>(steps) + 1);
        Point q = m.canonical(p);
        out[0] = q;
        for (int n = 1; n <= steps; ++n) out[static_cast<std::size_t>(n)] = q = stable ? m.forward(q) : m.inverse(q);
        return out;
    };

    const CellIndex base_cell = *space.locate(anchor);
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(space.cell_count()), 0);
    std::priority_queue<Frontier, std::vector<Frontier>, std::greater<>> frontier;
    frontier.push({0.0, base_cell, anchor});

    std::vector<CellIndex> cells;
    std::vector<Point> lifts;
    std::vector<std::vector<Point>> images(static_cast<std::size_t>(steps) + 1);
    std::vector<double> diam(static_cast<std::size_t>(steps) + 1, 0.0);

    while (!frontier.empty()) {
        const Frontier f = frontier.top();
        frontier.pop();
        auto& mark = seen[static_cast<std::size_t>(f.cell)];
        if (mark) continue;
        mark = 1;

        const auto img = images_of(f.lift);
        std::vector<double> grown = diam;
        bool ok = true;
        for (std::size_t n = 0; ok && n < img.size(); ++n)
            for (const Point& q : images[n]) {
                const double d = m.metric(img[n], q);
                if (d > request.delta) {
                    ok = false;
                    break;
                }
                grown[n] = std::max(grown[n], d);
            }
        if (!ok) continue;

        diam = std::move(grown);
        cells.push_back(f.cell);
        lifts.push_back(f.lift);
        for (std::size_t n = 0; n < img.size(); ++n) images[n].push_back(img[n]);

        for (int dj = -1; dj <= 1; ++dj)
            for (int di = -1; di <= 1; ++di) {
                if (di == 0 && dj == 0) continue;
                const auto nb = space.offset(f.cell, di, dj);
                if (!nb || seen[static_cast<std::size_t>(*nb)]) continue;
                const Point c = nearest_lift(m, space.center(*nb), f.lift);
                const Point rep = m.hyperbolic() ? square_point_near_line(c, h, anchor, dir) : c;
                frontier.push({std::hypot(rep.x - anchor.x, rep.y - anchor.y), *nb, rep});
            }
    }

    // Report cells in index order with their evaluation points alongside.
    std::vector<std::size_t> order(cells.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cells[a] < cells[b]; });
    std::vector<CellIndex> sorted;
    std::vector<Point> sorted_lifts;
    for (std::size_t i : order) {
        sorted.push_back(cells[i]);
        sorted_lifts.push_back(lifts[i]);
    }
    return FiniteHorizonPlaque{Continuum(CellSet(space, std::move(sorted))), base_cell, std::move(sorted_lifts),
                               std::move(diam)};
}

double principal_axis_angle(const std::vector<Point>& pts) {
    if (pts.size() < 2) return 0.0;
    double mx = 0.0, my = 0.0;
    for (const Point& p : pts) {
        mx += p.x;
        my += p.y;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (const Point& p : pts) {
        sxx += (p.x - mx) * (p.x - mx);
        syy += (p.y - my) * (p.y - my);
        sxy += (p.x - mx) * (p.y - my);
    }
    double a = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
    if (a <= -std::numbers::pi / 2) a += std::numbers::pi;
    return a;
}

double line_angle_gap(double a, double b) {
    double d = std::fmod(std::abs(a - b), std::numbers::pi);
    return std::min(d, std::numbers::pi - d);
}

CellSet local_stable_set(const SurfaceMap& m, Point p, double eps, int horizon, const GridSpace& space) {
    if (space.kind() != m.space_kind()) throw Error("grid space does not match the map's surface");
    if (eps < 4.0 * space.cell_size()) throw Error("eps below resolution floor (4 cells)");
    std::vector<Point> ref(static_cast<std::size_t>(horizon) + 1);
    ref[0] = m.canonical(p);
    for (int n = 1; n <= horizon; ++n) ref[static_cast<std::size_t>(n)] = m.forward(ref[static_cast<std::size_t>(n) - 1]);
    std::vector<CellIndex> out;
    for (CellIndex c = 0; c < space.cell_count(); ++c) {
        Point q = space.center(c);
        bool ok = m.metric(q, ref[0]) <= eps;
        for (int n = 1; ok && n <= horizon; ++n) {
            q = m.forward(q);
            ok = m.metric(q, ref[static_cast<std::size_t>(n)]) <= eps;
        }
        if (ok) out.push_back(c);
    }
    return CellSet(space, std::move(out));
}

CwnReport cwn_estimate(const SurfaceMap& m, double delta, int horizon, int samples, std::uint64_t seed,
                       const GridSpace& space) {
    if (samples <= 0) throw Error("samples must be positive");
    const double h = space.cell_size();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit01(0.0, 1.0);
    const auto prongs = m.prongs();
    auto disc_offset = [&](double radius) {
        const double r = radius * std::sqrt(unit01(rng));
        const double t = 2.0 * std::numbers::pi * unit01(rng);
        return Point{r * std::cos(t), r * std::sin(t)};
    };

    CwnReport rep;
    for (int i = 0; i < samples; ++i) {
        Point x, y;
        if (!prongs.empty() && i % 4 == 3) {
            // Every fourth sample is steered toward a cone point.
            const Point c = prongs[static_cast<std::size_t>(i / 4) % prongs.size()];
            const Point ox = disc_offset(0.04), oy = disc_offset(0.04);
            x = m.canonical({c.x + ox.x, c.y + ox.y});
            y = m.canonical({c.x + oy.x, c.y + oy.y});
        } else {
            x = m.canonical({unit01(rng), unit01(rng)});
            const Point o = disc_offset(0.25 * delta);
            y = m.canonical({x.x + o.x, x.y + o.y});
        }
        const auto ps = finite_horizon_plaque(m, {x, delta, horizon, Direction::Stable}, space);
        const auto pu = finite_horizon_plaque(m, {y, delta, horizon, Direction::Unstable}, space);
        for (const auto* p : {&ps, &pu})
            if (*std::min_element(p->horizon_diameters.begin(), p->horizon_diameters.end()) >= delta - 2.0 * h)
                throw Error("plaque exceeded diameter budget at every horizon");
        CwnSample s{x, y, 0, std::numeric_limits<double>::infinity()};
        s.count = static_cast<int>(components(ps.cells.set().intersect(pu.cells.set())).size());
        for (const Point& c : prongs) s.prong_distance = std::min(s.prong_distance, m.metric(x, c));
        rep.samples.push_back(s);
    }
    for (const auto& s : rep.samples) rep.max_count = std::max(rep.max_count, s.count);
    rep.histogram.assign(static_cast<std::size_t>(rep.max_count) + 1, 0);
    for (std::size_t i = 0; i < rep.samples.size(); ++i) {
        ++rep.histogram[static_cast<std::size_t>(rep.samples[i].count)];
        if (rep.samples[i].count == rep.max_count) rep.witnesses.push_back(i);
    }
    return rep;
}

double joint_stability(const SurfaceMap& m, const std::vector<Point>& pts, int horizon) {
    std::vector<Point> cur;
    for (const Point& p : pts) cur.push_back(m.canonical(p));
    double worst = 0.0;
    for (int n = 0; n <= horizon; ++n) {
        for (std::size_t i = 0; i < cur.size(); ++i)
            for (std::size_t j = i + 1; j < cur.size(); ++j) worst = std::max(worst, m.metric(cur[i], cur[j]));
        for (Point& p : cur) p = m.forward(p);
    }
    return worst;
}

}  // namespace cwlab
